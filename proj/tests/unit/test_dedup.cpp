#include <doctest.h>

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dupweight/dedup.hpp"
#include "dupweight/error.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/rng.hpp"
#include "oracles/bfs_components.hpp"
#include "support/fixtures.hpp"

using namespace dupweight;

namespace {

// Map arbitrary component labels to each component's smallest member index.
template <typename T>
std::vector<uint32_t> canonical_labels(const std::vector<T>& labels) {
  std::map<T, uint32_t> first_seen;
  std::vector<uint32_t> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = first_seen.emplace(labels[i], static_cast<uint32_t>(i));
    out[i] = it->second;
  }
  return out;
}

DedupParams dedup_params(KeepPolicy policy) {
  DedupParams p;
  p.minhash.num_hashes = 128;
  p.minhash.shingle_width = 5;
  p.minhash.seed = 7;
  p.lsh.bands = 16;
  p.lsh.rows = 8;
  p.policy = policy;
  return p;
}

// b-short and z-long share an identical shingle set (guaranteed cluster);
// c-dup1/c-dup2 are byte-identical; a-solo is disjoint from everything.
std::vector<TokenizedDocument> cluster_fixture() {
  return {
      {"z-long", {1, 2, 3, 4, 5, 1, 2, 3, 4, 5}},
      {"c-dup2", {7, 7, 8, 9, 10, 11, 12, 13}},
      {"a-solo", {100, 101, 102, 103, 104, 105, 106, 107, 108}},
      {"b-short", {1, 2, 3, 4, 5, 1, 2, 3, 4}},
      {"c-dup1", {7, 7, 8, 9, 10, 11, 12, 13}},
  };
}

}  // namespace

TEST_CASE("union-find components agree with a breadth-first search oracle") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const size_t n = 1 + rng.below(200);
    std::vector<std::pair<uint32_t, uint32_t>> edges;
    const size_t m = rng.below(2 * n);
    for (size_t e = 0; e < m; ++e) {
      edges.emplace_back(static_cast<uint32_t>(rng.below(n)),
                         static_cast<uint32_t>(rng.below(n)));
    }
    const auto got = canonical_labels(cluster_components(n, edges));
    const auto want = canonical_labels(oracle::bfs_components(n, edges));
    CHECK(got == want);
  }

  CHECK(cluster_components(0, {}).empty());
  const std::vector<std::pair<uint32_t, uint32_t>> bad{{0, 5}};
  CHECK_THROWS_AS(cluster_components(3, bad), InternalError);
}

TEST_CASE("hard_dedup clusters duplicates and keeps the first id") {
  const auto docs = cluster_fixture();
  const auto decisions = hard_dedup(docs, dedup_params(KeepPolicy::kFirstId), 1);

  REQUIRE(decisions.size() == 5);
  // Sorted by doc_id.
  const std::vector<std::string> want_ids{"a-solo", "b-short", "c-dup1", "c-dup2",
                                          "z-long"};
  for (size_t i = 0; i < 5; ++i) CHECK(decisions[i].doc_id == want_ids[i]);

  // Dense cluster ids ordered by each cluster's smallest doc_id.
  std::map<std::string, const DedupDecision*> by_id;
  for (const auto& d : decisions) by_id[d.doc_id] = &d;
  CHECK(by_id["a-solo"]->cluster_id == 0);
  CHECK(by_id["b-short"]->cluster_id == 1);
  CHECK(by_id["z-long"]->cluster_id == 1);
  CHECK(by_id["c-dup1"]->cluster_id == 2);
  CHECK(by_id["c-dup2"]->cluster_id == 2);

  CHECK(by_id["a-solo"]->keep);   // singleton keeps itself
  CHECK(by_id["b-short"]->keep);  // smallest id in its cluster
  CHECK_FALSE(by_id["z-long"]->keep);
  CHECK(by_id["c-dup1"]->keep);
  CHECK_FALSE(by_id["c-dup2"]->keep);
}

TEST_CASE("the longest policy keeps the longest doc and breaks ties by id") {
  const auto docs = cluster_fixture();
  const auto decisions = hard_dedup(docs, dedup_params(KeepPolicy::kLongest), 1);
  std::map<std::string, const DedupDecision*> by_id;
  for (const auto& d : decisions) by_id[d.doc_id] = &d;

  CHECK(by_id["z-long"]->keep);  // 10 tokens beats b-short's 9
  CHECK_FALSE(by_id["b-short"]->keep);
  CHECK(by_id["c-dup1"]->keep);  // equal length, smaller id wins
  CHECK_FALSE(by_id["c-dup2"]->keep);
  CHECK(by_id["a-solo"]->keep);

  // Exactly one keep per cluster either way.
  std::map<uint64_t, int> keeps;
  for (const auto& d : decisions) keeps[d.cluster_id] += d.keep ? 1 : 0;
  for (const auto& [cluster, count] : keeps) CHECK(count == 1);
}

TEST_CASE("dedup decisions are independent of the worker count") {
  auto docs = fx::synthetic_token_docs(60, 12, 40, 31);
  // Seed some duplicates at scattered positions.
  docs[10].tokens = docs[3].tokens;
  docs[40].tokens = docs[3].tokens;
  docs[55].tokens = docs[22].tokens;
  const auto params = dedup_params(KeepPolicy::kFirstId);

  const auto one = hard_dedup(docs, params, 1);
  const auto four = hard_dedup(docs, params, 4);
  REQUIRE(one.size() == four.size());
  for (size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].doc_id == four[i].doc_id);
    CHECK(one[i].cluster_id == four[i].cluster_id);
    CHECK(one[i].keep == four[i].keep);
  }

  // The planted duplicates share clusters and produce exactly one keeper.
  std::map<std::string, const DedupDecision*> by_id;
  for (const auto& d : one) by_id[d.doc_id] = &d;
  CHECK(by_id[docs[3].id]->cluster_id == by_id[docs[10].id]->cluster_id);
  CHECK(by_id[docs[3].id]->cluster_id == by_id[docs[40].id]->cluster_id);
  CHECK(by_id[docs[3].id]->keep);
  CHECK_FALSE(by_id[docs[10].id]->keep);
  CHECK_FALSE(by_id[docs[40].id]->keep);
}

TEST_CASE("dedup decisions round-trip through the artifact file") {
  fx::TempDir dir;
  const auto docs = cluster_fixture();
  const auto params = dedup_params(KeepPolicy::kLongest);
  const auto decisions = hard_dedup(docs, params, 1);

  const std::string path = dir.file("dedup.jsonl");
  write_dedup(path, decisions, params, "digest-d");
  const DedupFile loaded = read_dedup(path);
  CHECK(loaded.config_digest == "digest-d");
  REQUIRE(loaded.decisions.size() == decisions.size());
  for (size_t i = 0; i < decisions.size(); ++i) {
    CHECK(loaded.decisions[i].doc_id == decisions[i].doc_id);
    CHECK(loaded.decisions[i].cluster_id == decisions[i].cluster_id);
    CHECK(loaded.decisions[i].keep == decisions[i].keep);
  }

  // The header records the dedup parameters.
  const std::string first_line =
      read_file(path).substr(0, read_file(path).find('\n'));
  const auto header = nlohmann::json::parse(first_line);
  CHECK(header.at("num_hashes") == 128);
  CHECK(header.at("shingle_width") == 5);
  CHECK(header.at("bands") == 16);
  CHECK(header.at("rows") == 8);
  CHECK(header.at("policy") == "longest");

  fx::write_raw_lines(dir.file("bad.jsonl"), {R"({"artifact": "manifest"})"});
  CHECK_THROWS_AS(read_dedup(dir.file("bad.jsonl")), DataError);
  CHECK_THROWS_AS(read_dedup(dir.file("absent.jsonl")), DataError);
}

TEST_CASE("keep policy names parse and print") {
  CHECK(parse_keep_policy("first-id") == KeepPolicy::kFirstId);
  CHECK(parse_keep_policy("longest") == KeepPolicy::kLongest);
  CHECK_THROWS_AS(parse_keep_policy("newest"), UsageError);
  CHECK(keep_policy_name(KeepPolicy::kFirstId) == "first-id");
  CHECK(keep_policy_name(KeepPolicy::kLongest) == "longest");
}
