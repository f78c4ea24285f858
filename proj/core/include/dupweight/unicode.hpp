#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dupweight {

// Canonical composition (NFC) of a UTF-8 string. Pure-ASCII input returns
// unchanged without touching the normalizer. Throws DataError on invalid
// UTF-8 (JSON ingestion normally rejects that earlier).
std::string nfc(std::string_view utf8);

// Unicode White_Space property.
bool is_unicode_space(char32_t cp);

// Splits NFC-normalized text on runs of Unicode whitespace. Returned views
// point into `text` and are empty-free; whitespace-only input yields {}.
std::vector<std::string_view> split_whitespace(std::string_view text);

}  // namespace dupweight
