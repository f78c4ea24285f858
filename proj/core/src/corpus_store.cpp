#include "dupweight/corpus_store.hpp"

#include <json.hpp>

#include "dupweight/error.hpp"

namespace dupweight {

using nlohmann::json;

JsonlReader::JsonlReader(std::vector<std::string> paths, IngestOptions opts)
    : paths_(std::move(paths)), opts_(opts) {
  if (paths_.empty()) throw UsageError("no input files given");
}

bool JsonlReader::open_next_file() {
  while (file_index_ < paths_.size()) {
    current_file_ = paths_[file_index_++];
    stream_ = std::make_unique<std::ifstream>(current_file_, std::ios::binary);
    if (!*stream_) throw DataError("cannot open corpus file: " + current_file_);
    line_no_ = 0;
    return true;
  }
  stream_.reset();
  return false;
}

// Token ids must leave headroom for the three reserved ids appended above
// the data range in passthrough mode.
static constexpr uint64_t kMaxTokenIdValue = 0xFFFFFFF0ull;

bool JsonlReader::parse_line(const std::string& line, RawRecord& out,
                             std::string* error) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    *error = "not a JSON object";
    return false;
  }
  auto text_it = j.find("text");
  if (text_it == j.end() || !text_it->is_string()) {
    *error = "missing or non-string `text` field";
    return false;
  }
  out.text = text_it->get<std::string>();
  out.id.clear();
  auto id_it = j.find("id");
  if (id_it != j.end()) {
    if (!id_it->is_string() || id_it->get<std::string>().empty()) {
      *error = "`id` must be a non-empty string";
      return false;
    }
    out.id = id_it->get<std::string>();
  }
  out.tokens.reset();
  auto tok_it = j.find("tokens");
  if (tok_it != j.end()) {
    if (!tok_it->is_array()) {
      *error = "`tokens` must be an array of non-negative integers";
      return false;
    }
    std::vector<TokenId> toks;
    toks.reserve(tok_it->size());
    for (const auto& v : *tok_it) {
      if (!v.is_number_unsigned() || v.get<uint64_t>() > kMaxTokenIdValue) {
        *error = "`tokens` entries must be integers in [0, 2^32-16]";
        return false;
      }
      toks.push_back(static_cast<TokenId>(v.get<uint64_t>()));
    }
    out.tokens = std::move(toks);
  }
  bool has_content = !out.text.empty() ||
                     (out.tokens.has_value() && !out.tokens->empty());
  if (!has_content && !opts_.allow_empty) {
    *error = "empty document (set allow_empty to accept)";
    return false;
  }
  return true;
}

bool JsonlReader::next(RawRecord& out) {
  std::string line;
  while (true) {
    if (!stream_) {
      if (!open_next_file()) return false;
    }
    if (!std::getline(*stream_, line)) {
      stream_.reset();
      if (file_index_ >= paths_.size()) return false;
      continue;
    }
    ++line_no_;
    std::string error;
    if (!parse_line(line, out, &error)) {
      if (opts_.policy == LinePolicy::kFailFast) {
        throw DataError(current_file_ + ":" + std::to_string(line_no_) + ": " +
                        error);
      }
      ++skipped_;
      continue;
    }
    if (out.id.empty()) {
      out.id = current_file_ + ":" + std::to_string(line_no_);
    }
    if (!seen_ids_.insert(out.id).second) {
      // Duplicate ids corrupt every downstream artifact; never skippable.
      throw DataError(current_file_ + ":" + std::to_string(line_no_) +
                      ": duplicate document id \"" + out.id + "\"");
    }
    out.source_file = current_file_;
    out.line_no = line_no_;
    if (opts_.keep_raw) {
      out.raw = line;
    } else {
      out.raw.clear();
    }
    ++accepted_;
    byte_count_ += out.text.size();
    return true;
  }
}

std::vector<RawRecord> read_corpus(const std::vector<std::string>& paths,
                                   const IngestOptions& opts) {
  JsonlReader reader(paths, opts);
  std::vector<RawRecord> docs;
  RawRecord rec;
  while (reader.next(rec)) docs.push_back(std::move(rec));
  return docs;
}

void for_each_batch(const std::vector<std::string>& paths,
                    const IngestOptions& opts, size_t batch_size,
                    const std::function<void(std::vector<RawRecord>&)>& fn,
                    CorpusStats* stats_out) {
  JsonlReader reader(paths, opts);
  std::vector<RawRecord> batch;
  batch.reserve(batch_size);
  RawRecord rec;
  while (reader.next(rec)) {
    batch.push_back(std::move(rec));
    if (batch.size() >= batch_size) {
      fn(batch);
      batch.clear();
    }
  }
  if (!batch.empty()) fn(batch);
  if (stats_out) {
    stats_out->doc_count = reader.accepted();
    stats_out->byte_count = reader.byte_count();
    stats_out->skipped_lines = reader.skipped();
  }
}

}  // namespace dupweight
