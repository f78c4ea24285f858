#include "dupweight/sampler.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "dupweight/corpus_store.hpp"
#include "dupweight/error.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/rng.hpp"

namespace dupweight {

using json = nlohmann::json;

SamplingManifest sample(const SegmentPlan& plan,
                        std::span<const CommonnessRecord> records,
                        uint64_t token_budget, uint64_t seed,
                        std::string plan_digest) {
  if (token_budget == 0) throw UsageError("token budget must be positive");
  if (plan.weights.size() != static_cast<size_t>(plan.K) || plan.K < 1) {
    throw UsageError("plan has no weights; run partition/assign_weights first");
  }

  StringMap<size_t> by_id;
  by_id.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    by_id.emplace(records[i].doc_id, i);
  }

  // Per-segment decks hold record indices in assignment order (sorted by
  // doc_id); every epoch reshuffles a deck in place from the shared stream.
  std::vector<std::vector<size_t>> decks(static_cast<size_t>(plan.K));
  for (const auto& [doc_id, segment] : plan.assignment) {
    auto it = by_id.find(doc_id);
    if (it == by_id.end()) {
      throw DataError("plan document missing from commonness records: " + doc_id);
    }
    decks[static_cast<size_t>(segment - 1)].push_back(it->second);
  }
  for (size_t k = 0; k < decks.size(); ++k) {
    if (decks[k].empty()) {
      throw InternalError("segment " + std::to_string(k + 1) + " is empty");
    }
  }

  // Cumulative weights for CDF inversion; the final edge is pinned to 1 so
  // uniform01() in [0,1) always lands in a segment.
  std::vector<double> cdf(decks.size());
  double acc = 0.0;
  for (size_t k = 0; k < decks.size(); ++k) {
    acc += plan.weights[k];
    cdf[k] = acc;
  }
  cdf.back() = 1.0;

  SamplingManifest manifest;
  manifest.seed = seed;
  manifest.token_budget = token_budget;
  manifest.plan_digest = std::move(plan_digest);
  manifest.per_segment_draws.assign(decks.size(), 0);

  SplitMix64 rng(seed);
  std::vector<size_t> positions(decks.size(), 0);
  std::vector<bool> shuffled(decks.size(), false);

  uint64_t achieved = 0;
  uint64_t draw_index = 0;
  while (achieved < token_budget) {
    const double u = rng.uniform01();
    size_t k = static_cast<size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u,
                         [](double edge, double v) { return edge <= v; }) -
        cdf.begin());
    if (k >= decks.size()) k = decks.size() - 1;

    auto& deck = decks[k];
    auto& pos = positions[k];
    if (!shuffled[k] || pos == deck.size()) {
      rng.shuffle(deck);
      shuffled[k] = true;
      pos = 0;
    }
    const size_t rec_index = deck[pos++];
    const CommonnessRecord& rec = records[rec_index];

    achieved += rec.n_tokens;
    manifest.entries.push_back(
        ManifestEntry{draw_index, rec.doc_id, static_cast<int>(k + 1)});
    ++manifest.per_segment_draws[k];
    ++draw_index;
  }
  manifest.achieved_tokens = achieved;
  return manifest;
}

void write_manifest(const std::string& path, const SamplingManifest& manifest,
                    const std::string& config_digest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  json header;
  header["artifact"] = "manifest";
  header["config_digest"] = config_digest;
  header["seed"] = manifest.seed;
  header["token_budget"] = manifest.token_budget;
  header["achieved_tokens"] = manifest.achieved_tokens;
  header["plan_digest"] = manifest.plan_digest;
  header["per_segment_draws"] = manifest.per_segment_draws;
  header["n_draws"] = manifest.entries.size();
  out << header.dump() << '\n';
  for (const auto& e : manifest.entries) {
    json j;
    j["draw_index"] = e.draw_index;
    j["doc_id"] = e.doc_id;
    j["segment"] = e.segment;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

ManifestFile read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest: " + path);
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  if (!std::getline(in, line)) throw DataError(path + ": empty manifest");
  ++line_no;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("artifact", "") != "manifest") {
    throw fail("not a manifest artifact");
  }
  ManifestFile result;
  result.config_digest = header.value("config_digest", "");
  try {
    result.manifest.seed = header.at("seed").get<uint64_t>();
    result.manifest.token_budget = header.at("token_budget").get<uint64_t>();
    result.manifest.achieved_tokens = header.at("achieved_tokens").get<uint64_t>();
    result.manifest.plan_digest = header.value("plan_digest", "");
    result.manifest.per_segment_draws =
        header.at("per_segment_draws").get<std::vector<uint64_t>>();
  } catch (const json::exception& e) {
    throw fail(std::string("malformed manifest header: ") + e.what());
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("doc_id") || !j.contains("draw_index") ||
        !j.contains("segment")) {
      throw fail("malformed manifest entry");
    }
    result.manifest.entries.push_back(ManifestEntry{
        j["draw_index"].get<uint64_t>(), j["doc_id"].get<std::string>(),
        j["segment"].get<int>()});
  }
  if (header.contains("n_draws") &&
      header["n_draws"].get<uint64_t>() != result.manifest.entries.size()) {
    throw DataError(path + ": draw count disagrees with header");
  }
  return result;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "id-list") return ExportFormat::kIdList;
  if (name == "text") return ExportFormat::kText;
  throw UsageError("export format must be 'id-list' or 'text', got '" + name + "'");
}

void export_manifest(const SamplingManifest& manifest,
                     const std::vector<std::string>& corpus_paths,
                     ExportFormat format, const std::string& out_path) {
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + out_path);

  if (format == ExportFormat::kIdList) {
    for (const auto& e : manifest.entries) out << e.doc_id << '\n';
    if (!out) throw DataError("write failed: " + out_path);
    return;
  }

  // Materialized export: fetch each drawn document's text once, then emit
  // in draw order.
  StringMap<std::string> texts;
  for (const auto& e : manifest.entries) texts.emplace(e.doc_id, std::string());
  StringMap<char> found;

  IngestOptions opts;
  opts.allow_empty = true;  // filtering happened upstream; export everything
  JsonlReader reader(corpus_paths, opts);
  RawRecord rec;
  while (reader.next(rec)) {
    auto it = texts.find(rec.id);
    if (it != texts.end() && found.find(rec.id) == found.end()) {
      it->second = rec.text;
      found.emplace(rec.id, char{1});
    }
  }
  for (const auto& e : manifest.entries) {
    if (found.find(e.doc_id) == found.end()) {
      throw DataError("manifest document missing from corpus: " + e.doc_id);
    }
    out << texts.find(e.doc_id)->second << '\n';
  }
  if (!out) throw DataError("write failed: " + out_path);
}

}  // namespace dupweight
