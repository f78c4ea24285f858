#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dupweight/commonness.hpp"

namespace dupweight {

// Which per-segment statistic stands in as the segment's commonness p_k.
enum class QuantileStat {
  kUpper,   // maximum commonness in the segment (the k-th quantile boundary)
  kMedian,  // lower median of the segment's commonness values
};

QuantileStat parse_quantile_stat(const std::string& name);
std::string quantile_stat_name(QuantileStat stat);

// K equal-count segments of the corpus ordered by ascending commonness,
// with per-segment sampling masses W_k = C * (1/p_k)^T.
struct SegmentPlan {
  int K = 0;
  double T = 0.0;
  double C = 0.0;  // normalization constant; C = 1 / sum_j (1/p_j)^T
  QuantileStat stat = QuantileStat::kUpper;
  std::vector<double> quantiles;       // p_1..p_K ascending
  std::vector<double> weights;         // W_1..W_K; empty until assign_weights
  std::vector<uint64_t> segment_sizes; // documents per segment
  // doc_id -> segment index (1-based), sorted by doc_id.
  std::vector<std::pair<std::string, int>> assignment;
};

// Sorts by (commonness, doc_id) ascending and places rank r (1-based) into
// segment ceil(r*K/M), so segment k covers ranks ((k-1)*M/K, k*M/K] and
// sizes differ by at most one.
SegmentPlan partition(std::span<const CommonnessRecord> records, int K,
                      QuantileStat stat = QuantileStat::kUpper);

// W_k = (1/p_k)^T / sum_j (1/p_j)^T. Requires T >= 0 and every p_k > 0.
void assign_weights(SegmentPlan& plan, double T);

// T such that W_1/W_K equals target_ratio after assign_weights:
// T = ln(target_ratio) / ln(p_K / p_1).
double solve_exponent(const SegmentPlan& plan, double target_ratio);

void write_plan(const std::string& path, const SegmentPlan& plan,
                const std::string& config_digest);

struct PlanFile {
  std::string config_digest;
  SegmentPlan plan;
};

PlanFile read_plan(const std::string& path);

}  // namespace dupweight
