#include "dupweight/commonness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "dupweight/error.hpp"
#include "dupweight/parallel.hpp"

namespace dupweight {

using json = nlohmann::json;

CommonnessRecord score_document(const NgramModel& model, std::string doc_id,
                                std::span<const TokenId> tokens) {
  // Compensated summation: documents can run to 10^6+ positions and the
  // per-position logs are same-signed, so plain accumulation drifts.
  double sum = 0.0;
  double comp = 0.0;
  auto add = [&](double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };
  for (size_t i = 0; i < tokens.size(); ++i) {
    add(model.log_prob(tokens.first(i), tokens[i]));
  }
  add(model.log_prob(tokens, model.eos_id()));

  CommonnessRecord rec;
  rec.doc_id = std::move(doc_id);
  rec.n_tokens = tokens.size() + 1;
  rec.log_commonness = sum / static_cast<double>(rec.n_tokens);
  rec.commonness = std::exp(rec.log_commonness);
  return rec;
}

std::vector<CommonnessRecord> score_documents(const NgramModel& model,
                                              std::span<const TokenizedDocument> docs,
                                              int workers) {
  std::vector<CommonnessRecord> out(docs.size());
  parallel_chunks(docs.size(), workers, [&](size_t begin, size_t end, int) {
    for (size_t i = begin; i < end; ++i) {
      out[i] = score_document(model, docs[i].id, docs[i].tokens);
    }
  });
  return out;
}

void sort_by_doc_id(std::vector<CommonnessRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const CommonnessRecord& a, const CommonnessRecord& b) {
              return a.doc_id < b.doc_id;
            });
}

void write_commonness(const std::string& path,
                      std::span<const CommonnessRecord> records,
                      const std::string& config_digest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  json header;
  header["artifact"] = "commonness";
  header["config_digest"] = config_digest;
  header["n_records"] = records.size();
  out << header.dump() << '\n';
  for (const auto& rec : records) {
    json j;
    j["doc_id"] = rec.doc_id;
    j["commonness"] = rec.commonness;
    j["log_commonness"] = rec.log_commonness;
    j["n_tokens"] = rec.n_tokens;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

CommonnessFile read_commonness(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open commonness records: " + path);
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  auto parse = [&](const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw fail("malformed JSON record");
    return j;
  };

  if (!std::getline(in, line)) throw DataError(path + ": empty commonness file");
  ++line_no;
  json header = parse(line);
  if (header.value("artifact", "") != "commonness") {
    throw fail("not a commonness artifact");
  }
  CommonnessFile result;
  result.config_digest = header.value("config_digest", "");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = parse(line);
    CommonnessRecord rec;
    if (!j.contains("doc_id") || !j["doc_id"].is_string() ||
        !j.contains("commonness") || !j["commonness"].is_number() ||
        !j.contains("n_tokens") || !j["n_tokens"].is_number_unsigned()) {
      throw fail("missing or mistyped commonness fields");
    }
    rec.doc_id = j["doc_id"].get<std::string>();
    rec.commonness = j["commonness"].get<double>();
    rec.log_commonness = j.value("log_commonness", std::log(rec.commonness));
    rec.n_tokens = j["n_tokens"].get<uint64_t>();
    if (!(rec.commonness > 0.0 && rec.commonness <= 1.0)) {
      throw fail("commonness out of (0,1] for " + rec.doc_id);
    }
    if (rec.n_tokens == 0) throw fail("zero-length record for " + rec.doc_id);
    result.records.push_back(std::move(rec));
  }
  if (header.contains("n_records") &&
      header["n_records"].get<uint64_t>() != result.records.size()) {
    throw DataError(path + ": record count disagrees with header");
  }
  return result;
}

}  // namespace dupweight
