#include "dupweight/ngram_counts.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "dupweight/error.hpp"
#include "dupweight/parallel.hpp"

namespace dupweight {

namespace {

constexpr char kShardMagic[8] = {'D', 'W', 'C', 'O', 'U', 'N', 'T', 'S'};
constexpr uint32_t kShardVersion = 1;

void bump(StringMap<uint64_t>& map, std::string_view key) {
  auto it = map.find(key);
  if (it == map.end()) {
    map.emplace(std::string(key), uint64_t{1});
  } else {
    ++it->second;
  }
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("truncated count shard: " + path);
  return v;
}

}  // namespace

CountTable::CountTable(int order) : order_(order) {
  if (order < 1) throw UsageError("n-gram order must be >= 1");
  grams_.resize(static_cast<size_t>(order));
}

void CountTable::append_token(std::string& key, TokenId t) {
  key.push_back(static_cast<char>((t >> 24) & 0xFF));
  key.push_back(static_cast<char>((t >> 16) & 0xFF));
  key.push_back(static_cast<char>((t >> 8) & 0xFF));
  key.push_back(static_cast<char>(t & 0xFF));
}

std::string CountTable::pack(std::span<const TokenId> gram) {
  std::string key;
  key.reserve(gram.size() * 4);
  for (TokenId t : gram) append_token(key, t);
  return key;
}

TokenId CountTable::token_at(std::string_view key, size_t index) {
  const auto* p = reinterpret_cast<const unsigned char*>(key.data()) + index * 4;
  return (static_cast<TokenId>(p[0]) << 24) | (static_cast<TokenId>(p[1]) << 16) |
         (static_cast<TokenId>(p[2]) << 8) | static_cast<TokenId>(p[3]);
}

std::vector<TokenId> CountTable::unpack(std::string_view key) {
  if (key.size() % 4 != 0) throw InternalError("malformed gram key length");
  std::vector<TokenId> out(key.size() / 4);
  for (size_t i = 0; i < out.size(); ++i) out[i] = token_at(key, i);
  return out;
}

void CountTable::add_document(std::span<const TokenId> tokens, TokenId bos,
                              TokenId eos) {
  const size_t n = static_cast<size_t>(order_);
  padded_.clear();
  padded_.reserve(tokens.size() + n);
  padded_.insert(padded_.end(), n - 1, bos);
  padded_.insert(padded_.end(), tokens.begin(), tokens.end());
  padded_.push_back(eos);

  // One window per scored position; the k-suffix of a window is a byte
  // suffix of its packed key, so each window packs exactly once.
  for (size_t end = n; end <= padded_.size(); ++end) {
    window_key_.clear();
    for (size_t i = end - n; i < end; ++i) append_token(window_key_, padded_[i]);
    std::string_view full(window_key_);
    for (size_t k = 1; k <= n; ++k) {
      bump(grams_[k - 1], full.substr(full.size() - 4 * k));
    }
    ++total_windows_;
  }
}

void CountTable::merge_from(CountTable&& other) {
  if (other.order_ != order_) throw InternalError("count table order mismatch");
  for (size_t k = 0; k < grams_.size(); ++k) {
    if (grams_[k].size() < other.grams_[k].size()) grams_[k].swap(other.grams_[k]);
    for (auto& [key, cnt] : other.grams_[k]) {
      auto it = grams_[k].find(key);
      if (it == grams_[k].end()) {
        grams_[k].emplace(std::move(key), cnt);
      } else {
        it->second += cnt;
      }
    }
    other.grams_[k].clear();
  }
  total_windows_ += other.total_windows_;
  other.total_windows_ = 0;
}

const StringMap<uint64_t>& CountTable::grams(int k) const {
  if (k < 1 || k > order_) throw InternalError("gram order out of range");
  return grams_[static_cast<size_t>(k - 1)];
}

void CountTable::save(const std::string& path, uint64_t vocab_fingerprint) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);
  out.write(kShardMagic, sizeof(kShardMagic));
  write_pod(out, kShardVersion);
  write_pod(out, static_cast<uint32_t>(order_));
  write_pod(out, vocab_fingerprint);
  write_pod(out, total_windows_);
  for (int k = 1; k <= order_; ++k) {
    const auto& map = grams(k);
    write_pod(out, static_cast<uint64_t>(map.size()));
    std::vector<std::string_view> keys;
    keys.reserve(map.size());
    for (const auto& [key, cnt] : map) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    for (std::string_view key : keys) {
      out.write(key.data(), static_cast<std::streamsize>(key.size()));
      write_pod(out, map.find(key)->second);
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

CountTable CountTable::load(const std::string& path,
                            uint64_t* vocab_fingerprint_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open count shard: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kShardMagic, sizeof(magic)) != 0) {
    throw DataError("not a count shard: " + path);
  }
  auto version = read_pod<uint32_t>(in, path);
  if (version != kShardVersion) {
    throw DataError("unsupported count shard version " + std::to_string(version) +
                    ": " + path);
  }
  auto order = read_pod<uint32_t>(in, path);
  if (order < 1 || order > 16) throw DataError("implausible order in shard: " + path);
  auto fingerprint = read_pod<uint64_t>(in, path);
  if (vocab_fingerprint_out) *vocab_fingerprint_out = fingerprint;
  CountTable table(static_cast<int>(order));
  table.total_windows_ = read_pod<uint64_t>(in, path);
  for (uint32_t k = 1; k <= order; ++k) {
    auto entries = read_pod<uint64_t>(in, path);
    auto& map = table.grams_[k - 1];
    map.reserve(entries);
    std::string key(4 * k, '\0');
    for (uint64_t i = 0; i < entries; ++i) {
      in.read(key.data(), static_cast<std::streamsize>(key.size()));
      if (!in) throw DataError("truncated count shard: " + path);
      auto cnt = read_pod<uint64_t>(in, path);
      if (!map.emplace(key, cnt).second) {
        throw DataError("duplicate gram in count shard: " + path);
      }
    }
  }
  return table;
}

CountTable count_documents(std::span<const TokenizedDocument> docs, int order,
                           TokenId bos, TokenId eos, int workers) {
  if (workers <= 1 || docs.size() < 2) {
    CountTable table(order);
    for (const auto& doc : docs) table.add_document(doc.tokens, bos, eos);
    return table;
  }
  size_t nshards = std::min<size_t>(static_cast<size_t>(workers), docs.size());
  std::vector<CountTable> shards;
  shards.reserve(nshards);
  for (size_t i = 0; i < nshards; ++i) shards.emplace_back(order);
  parallel_chunks(docs.size(), static_cast<int>(nshards),
                  [&](size_t begin, size_t end, int shard) {
                    for (size_t i = begin; i < end; ++i) {
                      shards[static_cast<size_t>(shard)].add_document(
                          docs[i].tokens, bos, eos);
                    }
                  });
  // Fixed merge order; integer addition makes the result shard-independent.
  CountTable result = std::move(shards.front());
  for (size_t i = 1; i < shards.size(); ++i) result.merge_from(std::move(shards[i]));
  return result;
}

}  // namespace dupweight
