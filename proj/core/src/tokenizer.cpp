#include "dupweight/tokenizer.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "dupweight/error.hpp"
#include "dupweight/hashing.hpp"
#include "dupweight/unicode.hpp"

namespace dupweight {

namespace {
constexpr std::string_view kUnkSurface = "<unk>";
constexpr std::string_view kBosSurface = "<s>";
constexpr std::string_view kEosSurface = "</s>";

bool is_reserved_surface(std::string_view s) {
  return s == kUnkSurface || s == kBosSurface || s == kEosSurface;
}
}  // namespace

Vocabulary Vocabulary::freeze_whitespace(std::vector<std::string> surfaces) {
  Vocabulary v;
  v.mode_ = Mode::kWhitespace;
  v.surfaces_ = std::move(surfaces);
  v.data_size_ = v.surfaces_.size();
  v.index_.reserve(v.surfaces_.size());
  for (size_t i = 0; i < v.surfaces_.size(); ++i) {
    if (i > 0 && !(v.surfaces_[i - 1] < v.surfaces_[i])) {
      throw InternalError("vocabulary surfaces not sorted/unique");
    }
    v.index_.emplace(v.surfaces_[i], static_cast<TokenId>(i));
  }
  return v;
}

Vocabulary Vocabulary::freeze_passthrough(uint64_t data_size) {
  Vocabulary v;
  v.mode_ = Mode::kPassthrough;
  v.data_size_ = static_cast<size_t>(data_size);
  return v;
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
  if (mode_ == Mode::kPassthrough) {
    uint64_t id = 0;
    auto [p, ec] = std::from_chars(surface.data(),
                                   surface.data() + surface.size(), id);
    if (ec != std::errc() || p != surface.data() + surface.size()) {
      return std::nullopt;
    }
    if (id >= data_size_) return std::nullopt;
    return static_cast<TokenId>(id);
  }
  auto it = index_.find(surface);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::surface(TokenId id) const {
  if (id == unk_id()) return std::string(kUnkSurface);
  if (id == bos_id()) return std::string(kBosSurface);
  if (id == eos_id()) return std::string(kEosSurface);
  if (id >= size()) throw InternalError("token id out of range");
  if (mode_ == Mode::kPassthrough) return std::to_string(id);
  return surfaces_[id];
}

uint64_t Vocabulary::fingerprint() const {
  uint64_t h = fnv1a64(mode_ == Mode::kWhitespace ? "ws" : "pt");
  if (mode_ == Mode::kWhitespace) {
    for (const auto& s : surfaces_) {
      h = fnv1a64(s, h);
      // Unit separator: surfaces never contain it.
      h = fnv1a64(std::string_view("\x1f", 1), h);
    }
  } else {
    uint64_t n = data_size_;
    h = fnv1a64(&n, sizeof(n), h);
  }
  return h;
}

void Vocabulary::save(const std::string& path,
                      std::string_view config_digest) const {
  std::ostringstream out;
  out << "# dupweight-vocabulary v1\n";
  out << "# mode " << (mode_ == Mode::kWhitespace ? "whitespace" : "passthrough")
      << "\n";
  out << "# config " << config_digest << "\n";
  out << "# data-size " << data_size_ << "\n";
  out << "# reserved unk=" << unk_id() << " bos=" << bos_id()
      << " eos=" << eos_id() << "\n";
  if (mode_ == Mode::kWhitespace) {
    for (size_t i = 0; i < surfaces_.size(); ++i) {
      out << i << '\t' << surfaces_[i] << '\n';
    }
  }
  out << unk_id() << '\t' << kUnkSurface << '\n';
  out << bos_id() << '\t' << kBosSurface << '\n';
  out << eos_id() << '\t' << kEosSurface << '\n';
  write_file(path, out.str());
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  std::string line;
  Mode mode = Mode::kWhitespace;
  bool saw_mode = false;
  uint64_t declared_data_size = 0;
  bool saw_data_size = false;
  std::vector<std::string> surfaces;
  uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "mode") {
        std::string m;
        hs >> m;
        if (m == "whitespace") {
          mode = Mode::kWhitespace;
        } else if (m == "passthrough") {
          mode = Mode::kPassthrough;
        } else {
          throw DataError(path + ": unknown vocabulary mode: " + m);
        }
        saw_mode = true;
      } else if (key == "data-size") {
        hs >> declared_data_size;
        saw_data_size = true;
      }
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected <id>\\t<surface>");
    }
    uint64_t id = 0;
    auto [p, ec] = std::from_chars(line.data(), line.data() + tab, id);
    if (ec != std::errc() || p != line.data() + tab) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad id");
    }
    std::string surface = line.substr(tab + 1);
    if (surface == kUnkSurface || surface == kBosSurface ||
        surface == kEosSurface) {
      continue;  // reserved rows are informational; layout is derived
    }
    if (id != surfaces.size()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": ids must be contiguous from 0");
    }
    surfaces.push_back(std::move(surface));
  }
  if (!saw_mode || !saw_data_size) {
    throw DataError(path + ": missing vocabulary header");
  }
  if (mode == Mode::kPassthrough) {
    return freeze_passthrough(declared_data_size);
  }
  if (surfaces.size() != declared_data_size) {
    throw DataError(path + ": data-size header disagrees with surface count");
  }
  return freeze_whitespace(std::move(surfaces));
}

void VocabularyBuilder::add_text(std::string_view text) {
  std::string normalized = nfc(text);
  for (std::string_view tok : split_whitespace(normalized)) {
    if (is_reserved_surface(tok)) {
      // Reserved ids must never be producible from surface text.
      throw DataError("surface text contains reserved token \"" +
                      std::string(tok) + "\"");
    }
    auto it = counts_.find(tok);
    if (it == counts_.end()) {
      counts_.emplace(std::string(tok), 1);
    } else {
      ++it->second;
    }
  }
}

void VocabularyBuilder::add_tokens(const std::vector<TokenId>& tokens) {
  for (TokenId t : tokens) {
    uint64_t top = static_cast<uint64_t>(t) + 1;
    if (top > passthrough_size_) passthrough_size_ = top;
  }
}

void VocabularyBuilder::merge(VocabularyBuilder&& other) {
  if (counts_.size() < other.counts_.size()) std::swap(counts_, other.counts_);
  for (auto& [surface, count] : other.counts_) {
    counts_[surface] += count;
  }
  passthrough_size_ = std::max(passthrough_size_, other.passthrough_size_);
}

Vocabulary VocabularyBuilder::freeze(Vocabulary::Mode mode) const {
  if (mode == Vocabulary::Mode::kPassthrough) {
    return Vocabulary::freeze_passthrough(passthrough_size_);
  }
  std::vector<std::string> surfaces;
  surfaces.reserve(counts_.size());
  for (const auto& [surface, count] : counts_) surfaces.push_back(surface);
  std::sort(surfaces.begin(), surfaces.end());
  return Vocabulary::freeze_whitespace(std::move(surfaces));
}

TokenizedDocument tokenize(const RawRecord& rec, const Vocabulary& vocab) {
  TokenizedDocument doc;
  doc.id = rec.id;
  if (vocab.mode() == Vocabulary::Mode::kPassthrough) {
    if (!rec.tokens.has_value()) {
      throw DataError("document \"" + rec.id +
                      "\": passthrough mode requires a `tokens` field");
    }
    doc.tokens.reserve(rec.tokens->size());
    for (TokenId t : *rec.tokens) {
      // Out-of-range ids (including anything at or above the reserved
      // block) are unseen events and map to <unk>.
      doc.tokens.push_back(t < vocab.data_size() ? t : vocab.unk_id());
    }
  } else {
    std::string normalized = nfc(rec.text);
    for (std::string_view tok : split_whitespace(normalized)) {
      if (is_reserved_surface(tok)) {
        throw DataError("document \"" + rec.id +
                        "\": surface text contains reserved token \"" +
                        std::string(tok) + "\"");
      }
      auto id = vocab.find(tok);
      doc.tokens.push_back(id.has_value() ? *id : vocab.unk_id());
    }
  }
  if (doc.tokens.empty()) {
    throw DataError("document \"" + rec.id +
                    "\" is empty after normalization");
  }
  return doc;
}

TokenizedDocument tokenize_adhoc(const Document& doc) {
  TokenizedDocument out;
  out.id = doc.id;
  std::string normalized = nfc(doc.text);
  StringMap<TokenId> first_seen;
  for (std::string_view tok : split_whitespace(normalized)) {
    auto it = first_seen.find(tok);
    if (it == first_seen.end()) {
      TokenId id = static_cast<TokenId>(first_seen.size());
      first_seen.emplace(std::string(tok), id);
      out.tokens.push_back(id);
    } else {
      out.tokens.push_back(it->second);
    }
  }
  if (out.tokens.empty()) {
    throw DataError("document \"" + doc.id + "\" is empty after normalization");
  }
  return out;
}

uint64_t count_tokens(const RawRecord& rec, Vocabulary::Mode mode) {
  if (mode == Vocabulary::Mode::kPassthrough) {
    if (!rec.tokens.has_value()) {
      throw DataError("document \"" + rec.id +
                      "\": passthrough mode requires a `tokens` field");
    }
    return rec.tokens->size();
  }
  return split_whitespace(nfc(rec.text)).size();
}

}  // namespace dupweight
