#include "dupweight/arpa_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <tuple>
#include <vector>

#include "dupweight/error.hpp"
#include "dupweight/io_util.hpp"

namespace dupweight {

namespace {

// Anything at or below -99 in log10 is the zero sentinel. Genuine smoothed
// probabilities never get near it (they are bounded below by discount mass
// over the corpus total), so the mapping is unambiguous.
constexpr double kLog10FloorThreshold = -98.999;

double to_log10(double ln_value) { return ln_value / kLn10; }

double from_log10(double log10_value) {
  return log10_value <= kLog10FloorThreshold ? kLogZeroFloor : log10_value * kLn10;
}

std::string format_log10(double ln_value) {
  double v = to_log10(ln_value);
  if (v <= kLog10FloorThreshold) return "-99";
  return format_double(v);
}

void split_ascii_ws(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
}

}  // namespace

void write_arpa(const std::string& path, const NgramModel& model,
                const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path);

  out << "\\data\\\n";
  for (int k = 1; k <= model.order(); ++k) {
    out << "ngram " << k << "=" << model.entries(k).size() << "\n";
  }

  std::vector<std::string_view> keys;
  for (int k = 1; k <= model.order(); ++k) {
    const auto& table = model.entries(k);
    keys.clear();
    keys.reserve(table.size());
    for (const auto& [key, entry] : table) keys.push_back(key);
    std::sort(keys.begin(), keys.end());

    out << "\n\\" << k << "-grams:\n";
    const bool has_backoff_column = k < model.order();
    for (std::string_view key : keys) {
      const ProbEntry& e = table.find(key)->second;
      out << format_log10(e.log_prob);
      for (size_t i = 0; i * 4 < key.size(); ++i) {
        out << (i == 0 ? '\t' : ' ') << vocab.surface(CountTable::token_at(key, i));
      }
      if (has_backoff_column) out << '\t' << format_log10(e.log_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  if (!out) throw DataError("write failed: " + path);
}

struct ArpaLoader {
  static LoadedArpa load(const std::string& path, Vocabulary::Mode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);

    size_t line_no = 0;
    std::string line;
    auto fail = [&](const std::string& msg) {
      return DataError(path + ":" + std::to_string(line_no) + ": " + msg);
    };
    auto next_nonempty = [&]() {
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
      }
      return false;
    };
    auto parse_double = [&](std::string_view s) {
      std::string tmp(s);
      char* end = nullptr;
      double v = std::strtod(tmp.c_str(), &end);
      if (end != tmp.c_str() + tmp.size() || tmp.empty()) {
        throw fail("malformed number '" + tmp + "'");
      }
      return v;
    };

    if (!next_nonempty() || line != "\\data\\") throw fail("expected \\data\\ header");

    std::vector<uint64_t> counts;
    while (true) {
      if (!next_nonempty()) throw fail("unexpected end of file after \\data\\");
      if (line.rfind("ngram ", 0) != 0) break;  // first section header
      size_t eq = line.find('=');
      if (eq == std::string::npos) throw fail("malformed ngram count line");
      unsigned long k = std::strtoul(line.c_str() + 6, nullptr, 10);
      if (k != counts.size() + 1) throw fail("ngram counts must be consecutive from 1");
      counts.push_back(std::strtoull(line.c_str() + eq + 1, nullptr, 10));
    }
    if (counts.empty()) throw fail("no ngram counts in \\data\\ section");
    const int order = static_cast<int>(counts.size());

    // Unigram section is buffered as (surface, prob, backoff) until the
    // vocabulary can be frozen from it.
    std::vector<std::tuple<std::string, double, double>> unigrams;
    Vocabulary vocab;
    NgramModel model(order, 0, 0, 0, 0);
    std::vector<std::string_view> fields;

    auto surface_to_id = [&](std::string_view s) -> TokenId {
      if (s == "<unk>") return vocab.unk_id();
      if (s == "<s>") return vocab.bos_id();
      if (s == "</s>") return vocab.eos_id();
      auto id = vocab.find(s);
      if (!id) throw fail("surface missing from unigram section: " + std::string(s));
      return *id;
    };

    for (int k = 1; k <= order; ++k) {
      std::string expected = "\\" + std::to_string(k) + "-grams:";
      if (k > 1 && !next_nonempty()) throw fail("missing " + expected + " section");
      if (line != expected) throw fail("expected " + expected + ", got '" + line + "'");

      for (uint64_t i = 0; i < counts[static_cast<size_t>(k - 1)]; ++i) {
        if (!next_nonempty()) throw fail("section ended early");
        split_ascii_ws(line, fields);
        const size_t want = static_cast<size_t>(k);
        if (fields.size() != want + 1 && fields.size() != want + 2) {
          throw fail("expected " + std::to_string(k) + "-gram line");
        }
        double lp = from_log10(parse_double(fields[0]));
        double bo = fields.size() == want + 2 ? from_log10(parse_double(fields.back())) : 0.0;

        if (k == 1) {
          unigrams.emplace_back(std::string(fields[1]), lp, bo);
          continue;
        }
        std::string key;
        key.reserve(want * 4);
        for (size_t f = 1; f <= want; ++f) {
          CountTable::append_token(key, surface_to_id(fields[f]));
        }
        if (!model.tables_[static_cast<size_t>(k - 1)].emplace(key, ProbEntry{lp, bo}).second) {
          throw fail("duplicate " + std::to_string(k) + "-gram");
        }
      }

      if (k == 1) {
        // Freeze the vocabulary, then materialize the buffered unigram rows.
        if (mode == Vocabulary::Mode::kWhitespace) {
          std::vector<std::string> surfaces;
          surfaces.reserve(unigrams.size());
          for (const auto& [s, lp, bo] : unigrams) {
            if (s != "<unk>" && s != "<s>" && s != "</s>") surfaces.push_back(s);
          }
          std::sort(surfaces.begin(), surfaces.end());
          if (std::adjacent_find(surfaces.begin(), surfaces.end()) != surfaces.end()) {
            throw fail("duplicate unigram surface");
          }
          vocab = Vocabulary::freeze_whitespace(std::move(surfaces));
        } else {
          uint64_t data_size = 0;
          for (const auto& [s, lp, bo] : unigrams) {
            if (s == "<unk>" || s == "<s>" || s == "</s>") continue;
            char* end = nullptr;
            unsigned long long id = std::strtoull(s.c_str(), &end, 10);
            if (end != s.c_str() + s.size() || s.empty()) {
              throw fail("non-numeric token id '" + s + "' in pre-tokenized model");
            }
            data_size = std::max<uint64_t>(data_size, id + 1);
          }
          vocab = Vocabulary::freeze_passthrough(data_size);
        }
        model.vocab_size_ = vocab.size();
        model.unk_id_ = vocab.unk_id();
        model.bos_id_ = vocab.bos_id();
        model.eos_id_ = vocab.eos_id();
        for (const auto& [s, lp, bo] : unigrams) {
          std::string key;
          CountTable::append_token(key, surface_to_id(s));
          if (!model.tables_[0].emplace(key, ProbEntry{lp, bo}).second) {
            throw fail("duplicate unigram");
          }
        }
      }
    }

    if (!next_nonempty() || line != "\\end\\") throw fail("expected \\end\\");
    return LoadedArpa{std::move(model), std::move(vocab)};
  }
};

LoadedArpa load_arpa(const std::string& path, Vocabulary::Mode mode) {
  return ArpaLoader::load(path, mode);
}

}  // namespace dupweight
