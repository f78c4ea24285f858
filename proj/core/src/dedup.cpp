#include "dupweight/dedup.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "dupweight/error.hpp"
#include "dupweight/union_find.hpp"

namespace dupweight {

using json = nlohmann::json;

KeepPolicy parse_keep_policy(const std::string& name) {
  if (name == "first-id") return KeepPolicy::kFirstId;
  if (name == "longest") return KeepPolicy::kLongest;
  throw UsageError("keep policy must be 'first-id' or 'longest', got '" + name + "'");
}

std::string keep_policy_name(KeepPolicy policy) {
  return policy == KeepPolicy::kFirstId ? "first-id" : "longest";
}

std::vector<size_t> cluster_components(
    size_t n, std::span<const std::pair<uint32_t, uint32_t>> pairs) {
  UnionFind uf(n);
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n) throw InternalError("candidate pair references unknown document");
    uf.unite(a, b);
  }
  std::vector<size_t> root(n);
  for (size_t i = 0; i < n; ++i) root[i] = uf.find(i);
  return root;
}

std::vector<DedupDecision> hard_dedup(std::span<const TokenizedDocument> docs,
                                      const DedupParams& params, int workers) {
  const auto signatures = minhash_corpus(docs, params.minhash, workers);
  const auto pairs = lsh_candidate_pairs(signatures, params.lsh);
  const auto root = cluster_components(docs.size(), pairs);

  // Group members per component root, then order clusters by their smallest
  // doc_id so cluster ids are corpus-order independent.
  std::vector<std::vector<size_t>> members(docs.size());
  for (size_t i = 0; i < docs.size(); ++i) members[root[i]].push_back(i);

  std::vector<size_t> cluster_roots;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (!members[i].empty()) cluster_roots.push_back(i);
  }
  auto min_doc_id = [&](size_t r) -> const std::string& {
    size_t best = members[r].front();
    for (size_t i : members[r]) {
      if (docs[i].id < docs[best].id) best = i;
    }
    return docs[best].id;
  };
  std::sort(cluster_roots.begin(), cluster_roots.end(),
            [&](size_t a, size_t b) { return min_doc_id(a) < min_doc_id(b); });

  std::vector<DedupDecision> decisions(docs.size());
  for (size_t c = 0; c < cluster_roots.size(); ++c) {
    const auto& group = members[cluster_roots[c]];
    size_t rep = group.front();
    for (size_t i : group) {
      if (params.policy == KeepPolicy::kFirstId) {
        if (docs[i].id < docs[rep].id) rep = i;
      } else {
        if (docs[i].tokens.size() > docs[rep].tokens.size() ||
            (docs[i].tokens.size() == docs[rep].tokens.size() &&
             docs[i].id < docs[rep].id)) {
          rep = i;
        }
      }
    }
    for (size_t i : group) {
      decisions[i] = DedupDecision{docs[i].id, static_cast<uint64_t>(c), i == rep};
    }
  }
  std::sort(decisions.begin(), decisions.end(),
            [](const DedupDecision& a, const DedupDecision& b) {
              return a.doc_id < b.doc_id;
            });
  return decisions;
}

void write_dedup(const std::string& path, std::span<const DedupDecision> decisions,
                 const DedupParams& params, const std::string& config_digest) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  json header;
  header["artifact"] = "dedup";
  header["config_digest"] = config_digest;
  header["num_hashes"] = params.minhash.num_hashes;
  header["shingle_width"] = params.minhash.shingle_width;
  header["bands"] = params.lsh.bands;
  header["rows"] = params.lsh.rows;
  header["seed"] = params.minhash.seed;
  header["policy"] = keep_policy_name(params.policy);
  header["n_docs"] = decisions.size();
  out << header.dump() << '\n';
  for (const auto& d : decisions) {
    json j;
    j["doc_id"] = d.doc_id;
    j["cluster_id"] = d.cluster_id;
    j["keep"] = d.keep;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

DedupFile read_dedup(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dedup decisions: " + path);
  std::string line;
  size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line)) throw DataError(path + ": empty dedup file");
  ++line_no;
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("artifact", "") != "dedup") {
    throw fail("not a dedup artifact");
  }
  DedupFile result;
  result.config_digest = header.value("config_digest", "");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("doc_id") || !j.contains("cluster_id") ||
        !j.contains("keep")) {
      throw fail("malformed dedup decision");
    }
    result.decisions.push_back(DedupDecision{j["doc_id"].get<std::string>(),
                                             j["cluster_id"].get<uint64_t>(),
                                             j["keep"].get<bool>()});
  }
  if (header.contains("n_docs") &&
      header["n_docs"].get<uint64_t>() != result.decisions.size()) {
    throw DataError(path + ": decision count disagrees with header");
  }
  return result;
}

}  // namespace dupweight
