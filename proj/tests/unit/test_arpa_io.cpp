#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dupweight/arpa_io.hpp"
#include "dupweight/error.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/ngram_counts.hpp"
#include "dupweight/ngram_model.hpp"
#include "dupweight/tokenizer.hpp"
#include "support/fixtures.hpp"

using namespace dupweight;

namespace {

NgramModel train(const fx::TinyCorpus& corpus, int order) {
  const CountTable counts = count_documents(
      corpus.docs, order, corpus.vocab.bos_id(), corpus.vocab.eos_id(), 1);
  return NgramModel::estimate(counts, corpus.vocab);
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("ARPA write/load round-trips every entry") {
  fx::TempDir dir;
  const auto texts = [] {
    std::vector<std::string> out;
    for (const auto& d : fx::synthetic_docs(20, 10, 7, 404)) out.push_back(d.text);
    return out;
  }();
  const fx::TinyCorpus corpus = fx::make_corpus(texts);
  const NgramModel model = train(corpus, 3);
  const std::string path = dir.file("model.arpa");
  write_arpa(path, model, corpus.vocab);

  const LoadedArpa loaded = load_arpa(path, Vocabulary::Mode::kWhitespace);
  CHECK(loaded.model.order() == 3);
  CHECK(loaded.vocab.fingerprint() == corpus.vocab.fingerprint());

  for (int k = 1; k <= 3; ++k) {
    const auto& want = model.entries(k);
    const auto& got = loaded.model.entries(k);
    REQUIRE(got.size() == want.size());
    for (const auto& [key, entry] : want) {
      auto it = got.find(key);
      REQUIRE(it != got.end());
      CHECK(std::abs(it->second.log_prob - entry.log_prob) <= 1e-9);
      CHECK(std::abs(it->second.log_backoff - entry.log_backoff) <= 1e-9);
    }
  }

  // Queries through the reloaded model agree everywhere.
  const TokenId t0 = 0, t1 = 1;
  for (const std::vector<TokenId> ctx :
       {std::vector<TokenId>{}, {t0}, {t0, t1}, {t1, t1}}) {
    for (TokenId w = 0; w < corpus.vocab.size(); ++w) {
      CHECK(std::abs(model.log_prob(ctx, w) - loaded.model.log_prob(ctx, w)) <=
            1e-9);
    }
  }
}

TEST_CASE("ARPA serialization is byte-deterministic") {
  fx::TempDir dir;
  const fx::TinyCorpus corpus =
      fx::make_corpus({std::string("a b a c"), std::string("b c a")});
  const NgramModel model = train(corpus, 2);
  write_arpa(dir.file("m1.arpa"), model, corpus.vocab);
  write_arpa(dir.file("m2.arpa"), model, corpus.vocab);
  CHECK(read_file(dir.file("m1.arpa")) == read_file(dir.file("m2.arpa")));
}

TEST_CASE("ARPA text structure: sections, counts, floor sentinel") {
  fx::TempDir dir;
  const fx::TinyCorpus corpus = fx::make_corpus({std::string("a b a b")});
  const NgramModel model = train(corpus, 2);
  const std::string path = dir.file("model.arpa");
  write_arpa(path, model, corpus.vocab);
  const std::string text = read_file(path);

  CHECK(text.rfind("\\data\\\n", 0) == 0);
  CHECK(contains(text, "ngram 1=" + std::to_string(model.entries(1).size())));
  CHECK(contains(text, "ngram 2=" + std::to_string(model.entries(2).size())));
  CHECK(contains(text, "\\1-grams:\n"));
  CHECK(contains(text, "\\2-grams:\n"));
  CHECK(text.size() >= 6);
  CHECK(text.substr(text.size() - 6) == "\\end\\\n");
  // <s> carries the conventional -99 sentinel, never a real probability.
  CHECK(contains(text, "-99\t<s>"));
}

TEST_CASE("ARPA loader reports malformed input with file:line context") {
  fx::TempDir dir;
  const std::string path = dir.file("bad.arpa");
  auto expect_error = [&](const std::vector<std::string>& lines,
                          const std::string& fragment) {
    fx::write_raw_lines(path, lines);
    try {
      load_arpa(path, Vocabulary::Mode::kWhitespace);
      FAIL("expected DataError for fragment: " << fragment);
    } catch (const DataError& e) {
      const std::string what = e.what();
      CHECK(contains(what, path + ":"));
      CHECK(contains(what, fragment));
    }
  };

  expect_error({"\\1-grams:", "-1\ta"}, "expected \\data\\");
  expect_error({"\\data\\", "ngram 2=1"}, "consecutive");
  expect_error({"\\data\\", "ngram 1=2", "\\1-grams:", "-0.5\ta"},
               "section ended early");
  expect_error({"\\data\\", "ngram 1=1", "\\2-grams:", "-0.5\ta a"},
               "expected \\1-grams:");
  expect_error({"\\data\\", "ngram 1=2", "\\1-grams:", "-0.5\ta", "-0.5\ta"},
               "duplicate");
  expect_error({"\\data\\", "ngram 1=1", "\\1-grams:", "not-a-number\ta"},
               "malformed number");
  expect_error({"\\data\\", "ngram 1=1", "\\1-grams:", "-0.5\ta"},
               "expected \\end\\");
  expect_error({"\\data\\", "ngram 1=1", "ngram 2=1", "\\1-grams:", "-0.5\ta",
                "\\2-grams:", "-0.5\tmystery a", "\\end\\"},
               "surface missing from unigram section");
  expect_error({"\\data\\", "ngram 1=1", "\\1-grams:", "-0.5\ta extra junk here",
                "\\end\\"},
               "expected 1-gram line");

  CHECK_THROWS_AS(load_arpa(dir.file("absent.arpa"), Vocabulary::Mode::kWhitespace),
                  DataError);
}

TEST_CASE("passthrough ARPA uses decimal ids as surfaces") {
  fx::TempDir dir;
  VocabularyBuilder builder;
  builder.add_tokens({0, 1, 2});
  const Vocabulary vocab = builder.freeze(Vocabulary::Mode::kPassthrough);

  std::vector<TokenizedDocument> docs;
  docs.push_back({"d1", {0, 1, 0, 2}});
  docs.push_back({"d2", {2, 1}});
  const CountTable counts =
      count_documents(docs, 2, vocab.bos_id(), vocab.eos_id(), 1);
  const NgramModel model = NgramModel::estimate(counts, vocab);

  const std::string path = dir.file("pt.arpa");
  write_arpa(path, model, vocab);
  const std::string text = read_file(path);
  CHECK(contains(text, "\t0 1\n"));  // numeric surfaces: the (0,1) bigram line

  const LoadedArpa loaded = load_arpa(path, Vocabulary::Mode::kPassthrough);
  CHECK(loaded.vocab.mode() == Vocabulary::Mode::kPassthrough);
  CHECK(loaded.vocab.data_size() == 3);
  for (TokenId w = 0; w < vocab.size(); ++w) {
    CHECK(std::abs(model.log_prob(std::vector<TokenId>{0}, w) -
                   loaded.model.log_prob(std::vector<TokenId>{0}, w)) <= 1e-9);
  }

  // Word-like surfaces cannot be passthrough ids.
  fx::write_raw_lines(path, {"\\data\\", "ngram 1=1", "\\1-grams:", "-0.5\tabc",
                             "\\end\\"});
  CHECK_THROWS_AS(load_arpa(path, Vocabulary::Mode::kPassthrough), DataError);
}
