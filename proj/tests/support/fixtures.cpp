#include "support/fixtures.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

namespace fx {

using dupweight::Document;
using dupweight::RawRecord;
using dupweight::TokenId;
using dupweight::TokenizedDocument;
using dupweight::Vocabulary;
using dupweight::VocabularyBuilder;

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "dupweight-test-XXXXXX").string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (mkdtemp(buf.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed for " + tmpl);
  }
  path_.assign(buf.data());
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);  // best effort
}

std::string TempDir::file(const std::string& name) const {
  return path_ + "/" + name;
}

std::string padded_id(const std::string& prefix, uint64_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*llu", width,
                static_cast<unsigned long long>(i));
  return prefix + buf;
}

void write_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& doc : docs) {
    nlohmann::json j;
    j["id"] = doc.id;
    j["text"] = doc.text;
    out << j.dump() << '\n';
  }
}

void write_raw_lines(const std::string& path,
                     const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& line : lines) out << line << '\n';
}

TokenId TinyCorpus::id(const std::string& surface) const {
  auto found = vocab.find(surface);
  if (!found) throw std::runtime_error("surface not in fixture vocab: " + surface);
  return *found;
}

std::vector<TokenId> TinyCorpus::ids(const std::string& text) const {
  RawRecord rec;
  rec.id = "adhoc";
  rec.text = text;
  return dupweight::tokenize(rec, vocab).tokens;
}

TinyCorpus make_corpus(const std::vector<Document>& docs) {
  VocabularyBuilder builder;
  for (const auto& doc : docs) builder.add_text(doc.text);
  TinyCorpus corpus;
  corpus.vocab = builder.freeze(Vocabulary::Mode::kWhitespace);
  corpus.docs.reserve(docs.size());
  for (const auto& doc : docs) {
    RawRecord rec;
    rec.id = doc.id;
    rec.text = doc.text;
    corpus.docs.push_back(dupweight::tokenize(rec, corpus.vocab));
  }
  return corpus;
}

TinyCorpus make_corpus(const std::vector<std::string>& texts) {
  std::vector<Document> docs;
  docs.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    docs.push_back({padded_id("doc-", i), texts[i]});
  }
  return make_corpus(docs);
}

std::vector<Document> synthetic_docs(size_t n_docs, size_t tokens_per_doc,
                                     size_t vocab_size, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Document> docs;
  docs.reserve(n_docs);
  for (size_t d = 0; d < n_docs; ++d) {
    std::string text;
    for (size_t t = 0; t < tokens_per_doc; ++t) {
      if (t) text += ' ';
      text += 'w';
      text += std::to_string(rng() % vocab_size);
    }
    docs.push_back({padded_id("doc-", d), std::move(text)});
  }
  return docs;
}

std::vector<TokenizedDocument> synthetic_token_docs(size_t n_docs,
                                                    size_t tokens_per_doc,
                                                    TokenId vocab,
                                                    uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TokenizedDocument> docs;
  docs.reserve(n_docs);
  for (size_t d = 0; d < n_docs; ++d) {
    TokenizedDocument doc;
    doc.id = padded_id("doc-", d);
    doc.tokens.reserve(tokens_per_doc);
    for (size_t t = 0; t < tokens_per_doc; ++t) {
      doc.tokens.push_back(static_cast<TokenId>(rng() % vocab));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace fx
