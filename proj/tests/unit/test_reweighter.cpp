#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dupweight/error.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/reweighter.hpp"
#include "dupweight/rng.hpp"
#include "support/fixtures.hpp"

using namespace dupweight;

namespace {

// Records with commonness values 0.1, 0.2, ... assigned to ids doc-0000...
std::vector<CommonnessRecord> ladder(int m, double step = 0.1) {
  std::vector<CommonnessRecord> recs(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    recs[i].doc_id = fx::padded_id("doc-", i);
    recs[i].commonness = step * (i + 1);
    recs[i].log_commonness = std::log(recs[i].commonness);
    recs[i].n_tokens = 1;
  }
  return recs;
}

std::vector<CommonnessRecord> random_records(int m, uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<CommonnessRecord> recs(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    recs[i].doc_id = fx::padded_id("doc-", i);
    recs[i].commonness = 0.05 + 0.9 * rng.uniform01();
    recs[i].log_commonness = std::log(recs[i].commonness);
    recs[i].n_tokens = 1 + rng.below(40);
  }
  return recs;
}

}  // namespace

TEST_CASE("partition computes upper-quantile boundaries on an even split") {
  const auto recs = ladder(10);  // commonness 0.1 .. 1.0
  const SegmentPlan plan = partition(recs, 5, QuantileStat::kUpper);
  REQUIRE(plan.K == 5);
  REQUIRE(plan.quantiles.size() == 5);
  const double want[] = {0.2, 0.4, 0.6, 0.8, 1.0};
  for (int k = 0; k < 5; ++k) {
    CHECK(plan.quantiles[k] == doctest::Approx(want[k]).epsilon(1e-15));
    CHECK(plan.segment_sizes[k] == 2);
  }

  const SegmentPlan med = partition(recs, 5, QuantileStat::kMedian);
  const double want_med[] = {0.1, 0.3, 0.5, 0.7, 0.9};  // lower median of pairs
  for (int k = 0; k < 5; ++k) {
    CHECK(med.quantiles[k] == doctest::Approx(want_med[k]).epsilon(1e-15));
  }
}

TEST_CASE("partition splits a non-divisible corpus with sizes differing by one") {
  const auto recs = ladder(7);
  const SegmentPlan plan = partition(recs, 3);
  // rank r -> segment ceil(3r/7): ranks 1-2, 3-4, 5-7.
  REQUIRE(plan.segment_sizes.size() == 3);
  CHECK(plan.segment_sizes[0] == 2);
  CHECK(plan.segment_sizes[1] == 2);
  CHECK(plan.segment_sizes[2] == 3);
  CHECK(plan.quantiles[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(plan.quantiles[1] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(plan.quantiles[2] == doctest::Approx(0.7).epsilon(1e-15));

  // Assignment is sorted by doc_id, uses 1-based segments, covers every doc.
  REQUIRE(plan.assignment.size() == 7);
  std::vector<uint64_t> counts(4, 0);
  for (size_t i = 0; i < plan.assignment.size(); ++i) {
    if (i > 0) CHECK(plan.assignment[i - 1].first < plan.assignment[i].first);
    REQUIRE(plan.assignment[i].second >= 1);
    REQUIRE(plan.assignment[i].second <= 3);
    ++counts[static_cast<size_t>(plan.assignment[i].second)];
  }
  CHECK(counts[1] == 2);
  CHECK(counts[2] == 2);
  CHECK(counts[3] == 3);
  // Ladder order equals id order here, so the mapping itself is fixed.
  CHECK(plan.assignment[0] == std::pair<std::string, int>("doc-0000", 1));
  CHECK(plan.assignment[4] == std::pair<std::string, int>("doc-0004", 3));
}

TEST_CASE("equal commonness ties are broken by doc id") {
  std::vector<CommonnessRecord> recs(4);
  for (int i = 0; i < 4; ++i) {
    recs[i].doc_id = fx::padded_id("doc-", 3 - i);  // ids shuffled vs input order
    recs[i].commonness = 0.5;
    recs[i].n_tokens = 1;
  }
  const SegmentPlan plan = partition(recs, 2);
  // Sorted by (commonness, doc_id): doc-0000, doc-0001 | doc-0002, doc-0003.
  for (const auto& [id, seg] : plan.assignment) {
    CHECK(seg == (id < "doc-0002" ? 1 : 2));
  }
}

TEST_CASE("inverse-power weights match hand arithmetic") {
  // p = {1/4, 1/2, 1}, T = 2: raw masses {16, 4, 1}, C = 1/21.
  std::vector<CommonnessRecord> recs(3);
  recs[0] = {"a", 0.25, std::log(0.25), 1};
  recs[1] = {"b", 0.5, std::log(0.5), 1};
  recs[2] = {"c", 1.0, 0.0, 1};
  SegmentPlan plan = partition(recs, 3);
  assign_weights(plan, 2.0);
  CHECK(plan.T == 2.0);
  CHECK(plan.C == doctest::Approx(1.0 / 21.0).epsilon(1e-15));
  CHECK(plan.weights[0] == doctest::Approx(16.0 / 21.0).epsilon(1e-15));
  CHECK(plan.weights[1] == doctest::Approx(4.0 / 21.0).epsilon(1e-15));
  CHECK(plan.weights[2] == doctest::Approx(1.0 / 21.0).epsilon(1e-15));

  assign_weights(plan, 0.0);  // T = 0 collapses to uniform
  for (double w : plan.weights) {
    CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
}

TEST_CASE("assign_weights validates inputs") {
  auto recs = ladder(6);
  SegmentPlan plan = partition(recs, 3);
  CHECK_THROWS_AS(assign_weights(plan, -0.5), UsageError);

  plan.quantiles[1] = 0.0;  // corrupted quantile
  CHECK_THROWS_AS(assign_weights(plan, 1.0), DataError);
}

TEST_CASE("weights normalize and hit the target ratio across configurations") {
  const auto recs = random_records(3000, 20260814);
  for (int K : {10, 20, 50, 100}) {
    for (double ratio : {2.0, 5.0, 10.0}) {
      SegmentPlan plan = partition(recs, K);
      const double T = solve_exponent(plan, ratio);
      assign_weights(plan, T);

      double sum = 0.0;
      for (double w : plan.weights) sum += w;
      CHECK(std::abs(sum - 1.0) <= 1e-12);
      const double got_ratio = plan.weights.front() / plan.weights.back();
      CHECK(std::abs(got_ratio - ratio) <= 1e-9 * ratio);
      // Lower-commonness segments never get less mass than higher ones.
      for (int k = 1; k < K; ++k) {
        CHECK(plan.weights[k - 1] >= plan.weights[k] - 1e-15);
      }
    }
  }
}

TEST_CASE("solve_exponent handles edge targets") {
  const auto recs = ladder(10);
  SegmentPlan plan = partition(recs, 5);
  CHECK(solve_exponent(plan, 1.0) == 0.0);
  CHECK_THROWS_AS(solve_exponent(plan, 0.5), UsageError);

  // All quantiles equal: no exponent can produce a ratio > 1.
  std::vector<CommonnessRecord> flat(4);
  for (int i = 0; i < 4; ++i) {
    flat[i] = {fx::padded_id("doc-", i), 0.5, std::log(0.5), 1};
  }
  SegmentPlan degenerate = partition(flat, 2);
  CHECK_THROWS_AS(solve_exponent(degenerate, 10.0), DataError);
}

TEST_CASE("partition validates K against the corpus") {
  const auto recs = ladder(5);
  CHECK_THROWS_AS(partition(recs, 0), UsageError);
  CHECK_THROWS_AS(partition(recs, 6), UsageError);
  CHECK_NOTHROW(partition(recs, 5));
}

TEST_CASE("segment plans round-trip through the artifact file") {
  fx::TempDir dir;
  const auto recs = random_records(53, 99);
  SegmentPlan plan = partition(recs, 7, QuantileStat::kMedian);
  assign_weights(plan, solve_exponent(plan, 6.0));

  const std::string path = dir.file("plan.json");
  write_plan(path, plan, "cfg-7");
  const PlanFile loaded = read_plan(path);
  CHECK(loaded.config_digest == "cfg-7");
  CHECK(loaded.plan.K == plan.K);
  CHECK(loaded.plan.T == plan.T);  // bitwise: doubles survive the round trip
  CHECK(loaded.plan.C == plan.C);
  CHECK(loaded.plan.stat == plan.stat);
  CHECK(loaded.plan.quantiles == plan.quantiles);
  CHECK(loaded.plan.weights == plan.weights);
  CHECK(loaded.plan.segment_sizes == plan.segment_sizes);
  CHECK(loaded.plan.assignment == plan.assignment);

  write_plan(dir.file("again.json"), plan, "cfg-7");
  CHECK(read_file(path) == read_file(dir.file("again.json")));
}

TEST_CASE("write_plan refuses a plan without weights") {
  fx::TempDir dir;
  const auto recs = ladder(6);
  const SegmentPlan plan = partition(recs, 2);  // assign_weights never ran
  CHECK_THROWS_AS(write_plan(dir.file("p.json"), plan, "d"), InternalError);
}

TEST_CASE("read_plan rejects malformed input") {
  fx::TempDir dir;
  const std::string path = dir.file("bad.json");
  CHECK_THROWS_AS(read_plan(path), DataError);  // missing file

  fx::write_raw_lines(path, {"not json"});
  CHECK_THROWS_AS(read_plan(path), DataError);

  fx::write_raw_lines(path, {R"({"artifact": "commonness"})"});
  CHECK_THROWS_AS(read_plan(path), DataError);
}

TEST_CASE("quantile stat names parse and print") {
  CHECK(parse_quantile_stat("upper") == QuantileStat::kUpper);
  CHECK(parse_quantile_stat("median") == QuantileStat::kMedian);
  CHECK_THROWS_AS(parse_quantile_stat("mean"), UsageError);
  CHECK(quantile_stat_name(QuantileStat::kUpper) == "upper");
  CHECK(quantile_stat_name(QuantileStat::kMedian) == "median");
}
