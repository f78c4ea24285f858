#include "dupweight/decontaminate.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "dupweight/error.hpp"
#include "dupweight/hashing.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/parallel.hpp"

namespace dupweight {

using json = nlohmann::json;

namespace {

struct WindowRef {
  uint32_t doc = 0;
  uint32_t pos = 0;
};

uint64_t fill_window_hash(RollingTokenHash& rh, std::span<const TokenId> tokens,
                          size_t start, size_t w) {
  rh.reset();
  for (size_t i = 0; i < w; ++i) rh.push(tokens[start + i]);
  return rh.digest();
}

bool windows_equal(std::span<const TokenId> a, size_t i, std::span<const TokenId> b,
                   size_t j, size_t w) {
  for (size_t t = 0; t < w; ++t) {
    if (a[i + t] != b[j + t]) return false;
  }
  return true;
}

}  // namespace

std::vector<ContaminationFinding> find_contaminated(
    std::span<const TokenizedDocument> train,
    std::span<const TokenizedDocument> test, uint64_t threshold, int workers) {
  const size_t w = static_cast<size_t>(threshold) + 1;

  std::unordered_map<uint64_t, std::vector<WindowRef>> index;
  {
    RollingTokenHash rh(w);
    for (size_t d = 0; d < test.size(); ++d) {
      const auto& tokens = test[d].tokens;
      if (tokens.size() < w) continue;
      uint64_t h = fill_window_hash(rh, tokens, 0, w);
      index[h].push_back(WindowRef{static_cast<uint32_t>(d), 0});
      for (size_t i = w; i < tokens.size(); ++i) {
        rh.roll(tokens[i], tokens[i - w]);
        index[rh.digest()].push_back(
            WindowRef{static_cast<uint32_t>(d), static_cast<uint32_t>(i - w + 1)});
      }
    }
  }

  // Per-chunk finding lists concatenated in chunk order keep the result
  // independent of worker count.
  const int nchunks = workers < 1 ? 1 : workers;
  std::vector<std::vector<ContaminationFinding>> found(
      static_cast<size_t>(nchunks));
  parallel_chunks(train.size(), nchunks, [&](size_t begin, size_t end, int chunk) {
    RollingTokenHash rh(w);
    for (size_t t = begin; t < end; ++t) {
      const auto& tokens = train[t].tokens;
      if (tokens.size() < w || index.empty()) continue;
      uint64_t best_len = 0;
      const std::string* best_test = nullptr;
      for (size_t i = 0; i + w <= tokens.size(); ++i) {
        uint64_t h = i == 0 ? fill_window_hash(rh, tokens, 0, w)
                            : (rh.roll(tokens[i + w - 1], tokens[i - 1]), rh.digest());
        auto it = index.find(h);
        if (it == index.end()) continue;
        for (const WindowRef& ref : it->second) {
          const auto& ttk = test[ref.doc].tokens;
          if (!windows_equal(tokens, i, ttk, ref.pos, w)) continue;
          // Extend the verified window to the maximal shared run.
          size_t left = 0;
          while (left < i && left < ref.pos &&
                 tokens[i - left - 1] == ttk[ref.pos - left - 1]) {
            ++left;
          }
          size_t right = 0;
          while (i + w + right < tokens.size() && ref.pos + w + right < ttk.size() &&
                 tokens[i + w + right] == ttk[ref.pos + w + right]) {
            ++right;
          }
          const uint64_t len = w + left + right;
          if (len > best_len ||
              (len == best_len && best_test && test[ref.doc].id < *best_test)) {
            best_len = len;
            best_test = &test[ref.doc].id;
          }
        }
      }
      if (best_len > 0) {
        found[static_cast<size_t>(chunk)].push_back(
            ContaminationFinding{train[t].id, *best_test, best_len});
      }
    }
  });

  std::vector<ContaminationFinding> findings;
  for (auto& part : found) {
    findings.insert(findings.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
  }
  std::sort(findings.begin(), findings.end(),
            [](const ContaminationFinding& a, const ContaminationFinding& b) {
              return a.train_doc_id < b.train_doc_id;
            });
  return findings;
}

std::string surviving_digest(const std::vector<std::string>& paths,
                             const IngestOptions& opts,
                             std::span<const std::string> flagged) {
  StringMap<char> flagged_set;
  for (const auto& id : flagged) flagged_set.emplace(id, char{1});
  uint64_t h = 0xCBF29CE484222325ULL;
  JsonlReader reader(paths, opts);
  RawRecord rec;
  while (reader.next(rec)) {
    if (flagged_set.find(rec.id) != flagged_set.end()) continue;
    h = fnv1a64(rec.id, h);
    h = fnv1a64(rec.text, h);
  }
  return hex64(h);
}

void write_contamination(const std::string& path, const ContaminationReport& report,
                         const std::string& config_digest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  json header;
  header["artifact"] = "contamination";
  header["config_digest"] = config_digest;
  header["threshold"] = report.threshold;
  header["train_docs"] = report.train_docs;
  header["test_docs"] = report.test_docs;
  header["keep_digest"] = report.keep_digest;
  header["n_findings"] = report.findings.size();
  out << header.dump() << '\n';
  for (const auto& f : report.findings) {
    json j;
    j["train_doc_id"] = f.train_doc_id;
    j["test_doc_id"] = f.test_doc_id;
    j["overlap_len"] = f.overlap_len;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

ContaminationFile read_contamination(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open contamination report: " + path);
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) throw DataError(path + ": empty report");
  ++line_no;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("artifact", "") != "contamination") {
    throw fail("not a contamination artifact");
  }
  ContaminationFile result;
  result.config_digest = header.value("config_digest", "");
  result.report.threshold = header.value("threshold", uint64_t{50});
  result.report.train_docs = header.value("train_docs", uint64_t{0});
  result.report.test_docs = header.value("test_docs", uint64_t{0});
  result.report.keep_digest = header.value("keep_digest", "");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("train_doc_id") ||
        !j.contains("test_doc_id") || !j.contains("overlap_len")) {
      throw fail("malformed contamination finding");
    }
    result.report.findings.push_back(ContaminationFinding{
        j["train_doc_id"].get<std::string>(), j["test_doc_id"].get<std::string>(),
        j["overlap_len"].get<uint64_t>()});
  }
  return result;
}

ApplyStats apply_contamination(const ContaminationReport& report,
                               const std::vector<std::string>& corpus_paths,
                               const IngestOptions& opts,
                               const std::string& out_path) {
  std::vector<std::string> flagged;
  flagged.reserve(report.findings.size());
  for (const auto& f : report.findings) flagged.push_back(f.train_doc_id);

  const std::string digest = surviving_digest(corpus_paths, opts, flagged);
  if (!report.keep_digest.empty() && digest != report.keep_digest) {
    throw DataError("contamination report does not match this corpus "
                    "(surviving-set digest mismatch: report " +
                    report.keep_digest + ", corpus " + digest + ")");
  }

  StringMap<char> flagged_set;
  for (const auto& id : flagged) flagged_set.emplace(id, char{1});

  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + out_path);

  ApplyStats stats;
  IngestOptions raw_opts = opts;
  raw_opts.keep_raw = true;
  JsonlReader reader(corpus_paths, raw_opts);
  RawRecord rec;
  while (reader.next(rec)) {
    if (flagged_set.find(rec.id) != flagged_set.end()) {
      ++stats.removed;
      continue;
    }
    out << rec.raw << '\n';
    ++stats.kept;
  }
  if (!out) throw DataError("write failed: " + out_path);
  return stats;
}

}  // namespace dupweight
