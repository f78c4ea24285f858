#include "dupweight/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "dupweight/error.hpp"

namespace dupweight {

namespace {

bool all_ascii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

// Decodes one UTF-8 codepoint at s[i], advancing i. Throws on malformed
// sequences (overlong forms are tolerated; ICU validated upstream for NFC).
char32_t decode_utf8(std::string_view s, size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra;
  char32_t cp;
  if ((c & 0xE0) == 0xC0) {
    extra = 1;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    extra = 2;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    extra = 3;
    cp = c & 0x07;
  } else {
    throw DataError("invalid UTF-8 lead byte");
  }
  if (i + static_cast<size_t>(extra) >= s.size()) {
    throw DataError("truncated UTF-8 sequence");
  }
  for (int k = 1; k <= extra; ++k) {
    unsigned char cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) throw DataError("invalid UTF-8 continuation byte");
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += static_cast<size_t>(extra) + 1;
  return cp;
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw InternalError("ICU NFC normalizer unavailable");
  }
  return *n;
}

}  // namespace

std::string nfc(std::string_view utf8) {
  if (all_ascii(utf8)) return std::string(utf8);
  // Validate: ICU's fromUTF8 silently substitutes U+FFFD, which would hide
  // corrupt input; decode once to reject it instead.
  for (size_t i = 0; i < utf8.size();) decode_utf8(utf8, i);

  icu::UnicodeString us = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc_instance().normalize(us, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

bool is_unicode_space(char32_t cp) {
  return u_hasBinaryProperty(static_cast<UChar32>(cp), UCHAR_WHITE_SPACE);
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  size_t i = 0;
  size_t token_start = std::string_view::npos;
  while (i < text.size()) {
    size_t cp_start = i;
    char32_t cp = decode_utf8(text, i);
    if (is_unicode_space(cp)) {
      if (token_start != std::string_view::npos) {
        out.push_back(text.substr(token_start, cp_start - token_start));
        token_start = std::string_view::npos;
      }
    } else if (token_start == std::string_view::npos) {
      token_start = cp_start;
    }
  }
  if (token_start != std::string_view::npos) {
    out.push_back(text.substr(token_start));
  }
  return out;
}

}  // namespace dupweight
