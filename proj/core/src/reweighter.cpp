#include "dupweight/reweighter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "dupweight/error.hpp"

namespace dupweight {

using json = nlohmann::json;

QuantileStat parse_quantile_stat(const std::string& name) {
  if (name == "upper") return QuantileStat::kUpper;
  if (name == "median") return QuantileStat::kMedian;
  throw UsageError("quantile_stat must be 'upper' or 'median', got '" + name + "'");
}

std::string quantile_stat_name(QuantileStat stat) {
  return stat == QuantileStat::kUpper ? "upper" : "median";
}

SegmentPlan partition(std::span<const CommonnessRecord> records, int K,
                      QuantileStat stat) {
  const uint64_t m = records.size();
  if (K < 1) throw UsageError("segment count K must be >= 1");
  if (static_cast<uint64_t>(K) > m) {
    throw UsageError("segment count K=" + std::to_string(K) +
                     " exceeds document count M=" + std::to_string(m));
  }

  // (commonness, doc_id) ascending; doc_id breaks ties so reruns and
  // permuted inputs produce identical plans.
  std::vector<const CommonnessRecord*> order;
  order.reserve(m);
  for (const auto& rec : records) order.push_back(&rec);
  std::sort(order.begin(), order.end(),
            [](const CommonnessRecord* a, const CommonnessRecord* b) {
              if (a->commonness != b->commonness) return a->commonness < b->commonness;
              return a->doc_id < b->doc_id;
            });

  SegmentPlan plan;
  plan.K = K;
  plan.stat = stat;
  plan.quantiles.resize(static_cast<size_t>(K));
  plan.segment_sizes.assign(static_cast<size_t>(K), 0);
  plan.assignment.reserve(m);

  // Rank r (1-based) belongs to segment ceil(r*K/M).
  uint64_t seg_begin = 0;  // first 0-based rank of the current segment
  for (int k = 1; k <= K; ++k) {
    const uint64_t seg_end = (static_cast<uint64_t>(k) * m) / static_cast<uint64_t>(K);
    if (seg_end <= seg_begin) throw InternalError("empty quantile segment");
    plan.segment_sizes[static_cast<size_t>(k - 1)] = seg_end - seg_begin;
    for (uint64_t r = seg_begin; r < seg_end; ++r) {
      plan.assignment.emplace_back(order[r]->doc_id, k);
    }
    if (stat == QuantileStat::kUpper) {
      plan.quantiles[static_cast<size_t>(k - 1)] = order[seg_end - 1]->commonness;
    } else {
      const uint64_t mid = seg_begin + (seg_end - seg_begin - 1) / 2;
      plan.quantiles[static_cast<size_t>(k - 1)] = order[mid]->commonness;
    }
    seg_begin = seg_end;
  }

  std::sort(plan.assignment.begin(), plan.assignment.end());
  return plan;
}

void assign_weights(SegmentPlan& plan, double T) {
  if (!(T >= 0.0)) throw UsageError("exponent T must be >= 0");
  double denom = 0.0;
  std::vector<double> unnorm(plan.quantiles.size());
  for (size_t k = 0; k < plan.quantiles.size(); ++k) {
    const double p = plan.quantiles[k];
    if (!(p > 0.0)) {
      throw DataError("segment quantile p_" + std::to_string(k + 1) +
                      " is not positive");
    }
    unnorm[k] = std::pow(1.0 / p, T);
    denom += unnorm[k];
  }
  plan.T = T;
  plan.C = 1.0 / denom;
  plan.weights.resize(unnorm.size());
  for (size_t k = 0; k < unnorm.size(); ++k) plan.weights[k] = unnorm[k] / denom;
}

double solve_exponent(const SegmentPlan& plan, double target_ratio) {
  if (!(target_ratio >= 1.0)) throw UsageError("target weight ratio must be >= 1");
  if (target_ratio == 1.0) return 0.0;
  if (plan.quantiles.empty()) throw UsageError("plan has no segments");
  const double p1 = plan.quantiles.front();
  const double pk = plan.quantiles.back();
  if (!(pk > p1)) {
    throw DataError("degenerate commonness spread: p_K (" + std::to_string(pk) +
                    ") must exceed p_1 (" + std::to_string(p1) +
                    ") to hit a weight ratio above 1");
  }
  return std::log(target_ratio) / std::log(pk / p1);
}

void write_plan(const std::string& path, const SegmentPlan& plan,
                const std::string& config_digest) {
  if (plan.weights.size() != plan.quantiles.size()) {
    throw InternalError("plan serialized before assign_weights");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  json header;
  header["artifact"] = "plan";
  header["config_digest"] = config_digest;
  header["K"] = plan.K;
  header["T"] = plan.T;
  header["C"] = plan.C;
  header["quantile_stat"] = quantile_stat_name(plan.stat);
  header["quantiles"] = plan.quantiles;
  header["weights"] = plan.weights;
  header["segment_sizes"] = plan.segment_sizes;
  out << header.dump() << '\n';
  for (const auto& [doc_id, segment] : plan.assignment) {
    json j;
    j["doc_id"] = doc_id;
    j["segment"] = segment;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

PlanFile read_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open plan: " + path);
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  };

  if (!std::getline(in, line)) throw DataError(path + ": empty plan file");
  ++line_no;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("artifact", "") != "plan") {
    throw fail("not a plan artifact");
  }

  PlanFile result;
  result.config_digest = header.value("config_digest", "");
  SegmentPlan& plan = result.plan;
  try {
    plan.K = header.at("K").get<int>();
    plan.T = header.at("T").get<double>();
    plan.C = header.at("C").get<double>();
    plan.stat = parse_quantile_stat(header.at("quantile_stat").get<std::string>());
    plan.quantiles = header.at("quantiles").get<std::vector<double>>();
    plan.weights = header.at("weights").get<std::vector<double>>();
    plan.segment_sizes = header.at("segment_sizes").get<std::vector<uint64_t>>();
  } catch (const json::exception& e) {
    throw fail(std::string("malformed plan header: ") + e.what());
  }
  if (plan.quantiles.size() != static_cast<size_t>(plan.K) ||
      plan.weights.size() != static_cast<size_t>(plan.K) ||
      plan.segment_sizes.size() != static_cast<size_t>(plan.K)) {
    throw fail("plan header K disagrees with its tables");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("doc_id") || !j.contains("segment")) {
      throw fail("malformed assignment line");
    }
    int segment = j["segment"].get<int>();
    if (segment < 1 || segment > plan.K) throw fail("segment index out of range");
    plan.assignment.emplace_back(j["doc_id"].get<std::string>(), segment);
  }

  uint64_t expected = 0;
  for (uint64_t s : plan.segment_sizes) expected += s;
  if (expected != plan.assignment.size()) {
    throw DataError(path + ": assignment count disagrees with segment sizes");
  }
  return result;
}

}  // namespace dupweight
