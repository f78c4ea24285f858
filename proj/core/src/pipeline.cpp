#include "dupweight/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "dupweight/arpa_io.hpp"
#include "dupweight/commonness.hpp"
#include "dupweight/corpus_store.hpp"
#include "dupweight/decontaminate.hpp"
#include "dupweight/dedup.hpp"
#include "dupweight/error.hpp"
#include "dupweight/hashing.hpp"
#include "dupweight/io_util.hpp"
#include "dupweight/ngram_counts.hpp"
#include "dupweight/ngram_model.hpp"
#include "dupweight/parallel.hpp"
#include "dupweight/reweighter.hpp"
#include "dupweight/sampler.hpp"
#include "dupweight/tokenizer.hpp"

namespace dupweight {

namespace artifact {

std::string stage_stats_name(const std::string& stage) {
  return stage + ".stats.json";
}

}  // namespace artifact

namespace {

using nlohmann::json;

constexpr size_t kBatchDocs = 4096;

class StageClock {
 public:
  StageClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Wall-clock sidecar consumed by `report`; not part of the deterministic
// artifact set.
void write_stage_stats(const PipelineConfig& config, const std::string& stage,
                       double elapsed_sec, uint64_t tokens,
                       json extra = json::object()) {
  json j = std::move(extra);
  j["stage"] = stage;
  j["elapsed_sec"] = elapsed_sec;
  j["tokens"] = tokens;
  j["tokens_per_sec"] =
      elapsed_sec > 0.0 ? static_cast<double>(tokens) / elapsed_sec : 0.0;
  write_file(path_join(config.out_dir, artifact::stage_stats_name(stage)),
             j.dump() + "\n");
}

void require_inputs(const PipelineConfig& config, const std::string& stage) {
  if (config.inputs.empty()) {
    throw UsageError(stage +
                     " needs at least one input corpus (--input or input= in "
                     "the config file)");
  }
}

void require_artifact(const std::string& path, const std::string& what,
                      const std::string& producer) {
  if (!file_exists(path)) {
    throw UsageError(what + " not found at '" + path + "'; run `" + producer +
                     "` first");
  }
}

Vocabulary::Mode parse_tokenizer_mode(const std::string& name) {
  if (name == "whitespace") return Vocabulary::Mode::kWhitespace;
  if (name == "passthrough") return Vocabulary::Mode::kPassthrough;
  throw UsageError("tokenizer_mode must be 'whitespace' or 'passthrough', got '" +
                   name + "'");
}

void absorb_record(VocabularyBuilder& builder, const RawRecord& rec,
                   Vocabulary::Mode mode) {
  if (mode == Vocabulary::Mode::kPassthrough) {
    if (!rec.tokens.has_value()) {
      throw DataError("document \"" + rec.id +
                      "\": passthrough mode requires a `tokens` field");
    }
    builder.add_tokens(*rec.tokens);
  } else {
    builder.add_text(rec.text);
  }
}

// First streaming pass over the corpus: the frozen vocabulary.
Vocabulary build_vocabulary(const std::vector<std::string>& paths,
                            const IngestOptions& opts, Vocabulary::Mode mode) {
  VocabularyBuilder builder;
  for_each_batch(paths, opts, kBatchDocs, [&](std::vector<RawRecord>& batch) {
    for (const RawRecord& rec : batch) absorb_record(builder, rec, mode);
  });
  return builder.freeze(mode);
}

// Tokenizes a batch in parallel; output order matches input order.
std::vector<TokenizedDocument> tokenize_batch(std::vector<RawRecord>& batch,
                                              const Vocabulary& vocab,
                                              int workers) {
  std::vector<TokenizedDocument> docs(batch.size());
  parallel_chunks(batch.size(), workers, [&](size_t begin, size_t end, int) {
    for (size_t i = begin; i < end; ++i) docs[i] = tokenize(batch[i], vocab);
  });
  return docs;
}

// Streams the whole corpus into tokenized documents (dedup/decontamination
// operate on the full corpus in memory).
std::vector<TokenizedDocument> tokenize_corpus(
    const std::vector<std::string>& paths, const IngestOptions& opts,
    const Vocabulary& vocab, int workers, uint64_t* tokens_out) {
  std::vector<TokenizedDocument> docs;
  for_each_batch(paths, opts, kBatchDocs, [&](std::vector<RawRecord>& batch) {
    std::vector<TokenizedDocument> part = tokenize_batch(batch, vocab, workers);
    for (TokenizedDocument& doc : part) {
      if (tokens_out) *tokens_out += doc.tokens.size();
      docs.push_back(std::move(doc));
    }
  });
  return docs;
}

json read_json_file(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw DataError("invalid JSON in " + path);
  return j;
}

}  // namespace

void run_train_lm(const PipelineConfig& config) {
  config.validate();
  require_inputs(config, "train-lm");
  ensure_dir(config.out_dir);
  StageClock clock;

  const IngestOptions opts = config.ingest_options();
  const Vocabulary::Mode mode = parse_tokenizer_mode(config.tokenizer_mode);
  const Vocabulary vocab = build_vocabulary(config.inputs, opts, mode);

  CountTable counts(config.n);
  uint64_t total_tokens = 0;
  for_each_batch(config.inputs, opts, kBatchDocs,
                 [&](std::vector<RawRecord>& batch) {
                   std::vector<TokenizedDocument> docs =
                       tokenize_batch(batch, vocab, config.workers);
                   for (const TokenizedDocument& d : docs) {
                     total_tokens += d.tokens.size();
                   }
                   counts.merge_from(count_documents(docs, config.n,
                                                     vocab.bos_id(),
                                                     vocab.eos_id(),
                                                     config.workers));
                 });

  EstimateOptions eopts;
  eopts.min_count = config.min_count;
  const NgramModel model = NgramModel::estimate(counts, vocab, eopts);

  const std::string digest = config.digest();
  vocab.save(path_join(config.out_dir, artifact::kVocab), digest);
  const std::string model_path = path_join(config.out_dir, artifact::kModel);
  write_arpa(model_path, model, vocab);

  json meta;
  meta["artifact"] = "model-meta";
  meta["config_digest"] = digest;
  meta["order"] = model.order();
  meta["vocab_size"] = vocab.size();
  meta["vocab_fingerprint"] = hex64(vocab.fingerprint());
  meta["arpa_digest"] = hex64(file_digest(model_path));
  meta["warnings"] = model.warnings();
  write_file(path_join(config.out_dir, artifact::kModelMeta),
             meta.dump() + "\n");

  json extra;
  extra["vocab_size"] = vocab.size();
  extra["warnings"] = model.warnings().size();
  write_stage_stats(config, "train-lm", clock.elapsed_sec(), total_tokens,
                    std::move(extra));
}

void run_score(const PipelineConfig& config) {
  config.validate();
  require_inputs(config, "score");
  ensure_dir(config.out_dir);
  StageClock clock;

  const std::string vocab_path = path_join(config.out_dir, artifact::kVocab);
  const std::string model_path = path_join(config.out_dir, artifact::kModel);
  require_artifact(vocab_path, "vocabulary (vocab.tsv)", "train-lm");
  require_artifact(model_path, "language model (model.arpa)", "train-lm");

  const Vocabulary vocab = Vocabulary::load(vocab_path);
  const LoadedArpa loaded = load_arpa(model_path, vocab.mode());
  if (loaded.vocab.fingerprint() != vocab.fingerprint()) {
    throw DataError("model.arpa vocabulary (fingerprint " +
                    hex64(loaded.vocab.fingerprint()) +
                    ") does not match vocab.tsv (fingerprint " +
                    hex64(vocab.fingerprint()) + "); re-run `train-lm`");
  }

  const IngestOptions opts = config.ingest_options();
  std::vector<CommonnessRecord> records;
  uint64_t total_tokens = 0;
  for_each_batch(config.inputs, opts, kBatchDocs,
                 [&](std::vector<RawRecord>& batch) {
                   std::vector<TokenizedDocument> docs =
                       tokenize_batch(batch, vocab, config.workers);
                   for (const TokenizedDocument& d : docs) {
                     total_tokens += d.tokens.size();
                   }
                   std::vector<CommonnessRecord> scored =
                       score_documents(loaded.model, docs, config.workers);
                   records.insert(records.end(),
                                  std::make_move_iterator(scored.begin()),
                                  std::make_move_iterator(scored.end()));
                 });
  sort_by_doc_id(records);
  write_commonness(path_join(config.out_dir, artifact::kCommonness), records,
                   config.digest());

  json extra;
  extra["documents"] = records.size();
  write_stage_stats(config, "score", clock.elapsed_sec(), total_tokens,
                    std::move(extra));
}

void run_partition(const PipelineConfig& config) {
  config.validate();
  ensure_dir(config.out_dir);
  StageClock clock;

  const std::string commonness_path =
      path_join(config.out_dir, artifact::kCommonness);
  require_artifact(commonness_path, "commonness records (commonness.jsonl)",
                   "score");
  const CommonnessFile cf = read_commonness(commonness_path);
  SegmentPlan plan = partition(cf.records, config.K,
                               parse_quantile_stat(config.quantile_stat));
  double t = 0.0;
  double ratio = 0.0;
  if (!config.exponent_given(&t, &ratio)) {
    t = solve_exponent(plan, ratio);
  }
  assign_weights(plan, t);
  write_plan(path_join(config.out_dir, artifact::kPlan), plan,
             config.digest());

  uint64_t total_tokens = 0;
  for (const CommonnessRecord& r : cf.records) total_tokens += r.n_tokens;
  json extra;
  extra["documents"] = cf.records.size();
  extra["T"] = plan.T;
  write_stage_stats(config, "partition", clock.elapsed_sec(), total_tokens,
                    std::move(extra));
}

void run_sample(const PipelineConfig& config) {
  config.validate();
  ensure_dir(config.out_dir);
  if (config.token_budget == 0) {
    throw UsageError("sample needs a positive token_budget");
  }
  StageClock clock;

  const std::string commonness_path =
      path_join(config.out_dir, artifact::kCommonness);
  const std::string plan_path = path_join(config.out_dir, artifact::kPlan);
  require_artifact(commonness_path, "commonness records (commonness.jsonl)",
                   "score");
  require_artifact(plan_path, "segment plan (plan.jsonl)", "partition");

  const CommonnessFile cf = read_commonness(commonness_path);
  const PlanFile pf = read_plan(plan_path);
  const std::string plan_digest = hex64(file_digest(plan_path));

  const SamplingManifest manifest = sample(pf.plan, cf.records,
                                           config.token_budget, config.seed,
                                           plan_digest);
  write_manifest(path_join(config.out_dir, artifact::kManifest), manifest,
                 config.digest());

  const ExportFormat format = parse_export_format(config.sample_format);
  if (format == ExportFormat::kText) {
    require_inputs(config, "sample with sample_format=text");
    export_manifest(manifest, config.inputs, format,
                    path_join(config.out_dir, artifact::kSampleText));
  } else {
    export_manifest(manifest, config.inputs, format,
                    path_join(config.out_dir, artifact::kSampleIds));
  }

  json extra;
  extra["draws"] = manifest.entries.size();
  extra["achieved_tokens"] = manifest.achieved_tokens;
  write_stage_stats(config, "sample", clock.elapsed_sec(),
                    manifest.achieved_tokens, std::move(extra));
}

void run_harddedup(const PipelineConfig& config) {
  config.validate();
  require_inputs(config, "harddedup");
  ensure_dir(config.out_dir);
  StageClock clock;

  const IngestOptions opts = config.ingest_options();
  const Vocabulary::Mode mode = parse_tokenizer_mode(config.tokenizer_mode);
  const Vocabulary vocab = build_vocabulary(config.inputs, opts, mode);
  uint64_t total_tokens = 0;
  const std::vector<TokenizedDocument> docs =
      tokenize_corpus(config.inputs, opts, vocab, config.workers,
                      &total_tokens);

  DedupParams params;
  params.minhash.num_hashes = config.num_hashes;
  params.minhash.shingle_width = config.shingle_width;
  params.minhash.seed = config.seed;
  params.lsh.bands = config.bands;
  params.lsh.rows = config.rows;
  params.policy = parse_keep_policy(config.keep_policy);

  const std::vector<DedupDecision> decisions =
      hard_dedup(docs, params, config.workers);
  write_dedup(path_join(config.out_dir, artifact::kDedup), decisions, params,
              config.digest());

  uint64_t kept = 0;
  uint64_t clusters = 0;
  for (const DedupDecision& d : decisions) {
    if (d.keep) ++kept;
    clusters = std::max(clusters, d.cluster_id + 1);
  }
  json extra;
  extra["documents"] = decisions.size();
  extra["clusters"] = clusters;
  extra["kept"] = kept;
  extra["removed"] = decisions.size() - kept;
  write_stage_stats(config, "harddedup", clock.elapsed_sec(), total_tokens,
                    std::move(extra));
}

void run_decontaminate(const PipelineConfig& config) {
  config.validate();
  require_inputs(config, "decontaminate");
  if (config.test_inputs.empty()) {
    throw UsageError(
        "decontaminate needs at least one held-out corpus (--test-input or "
        "test_input= in the config file)");
  }
  ensure_dir(config.out_dir);
  StageClock clock;

  const IngestOptions opts = config.ingest_options();
  const Vocabulary::Mode mode = parse_tokenizer_mode(config.tokenizer_mode);

  // A joint vocabulary over both corpora: identical surfaces tokenize to
  // identical ids, so cross-corpus window comparison is exact by
  // construction.
  VocabularyBuilder builder;
  for (const auto* paths : {&config.inputs, &config.test_inputs}) {
    for_each_batch(*paths, opts, kBatchDocs,
                   [&](std::vector<RawRecord>& batch) {
                     for (const RawRecord& rec : batch) {
                       absorb_record(builder, rec, mode);
                     }
                   });
  }
  const Vocabulary vocab = builder.freeze(mode);

  uint64_t total_tokens = 0;
  const std::vector<TokenizedDocument> train = tokenize_corpus(
      config.inputs, opts, vocab, config.workers, &total_tokens);
  const std::vector<TokenizedDocument> test = tokenize_corpus(
      config.test_inputs, opts, vocab, config.workers, &total_tokens);

  ContaminationReport report;
  report.threshold = config.threshold;
  report.train_docs = train.size();
  report.test_docs = test.size();
  report.findings =
      find_contaminated(train, test, config.threshold, config.workers);

  std::vector<std::string> flagged;
  flagged.reserve(report.findings.size());
  for (const ContaminationFinding& f : report.findings) {
    flagged.push_back(f.train_doc_id);
  }
  report.keep_digest = surviving_digest(config.inputs, opts, flagged);

  write_contamination(path_join(config.out_dir, artifact::kContamination),
                      report, config.digest());

  json extra;
  extra["train_docs"] = train.size();
  extra["test_docs"] = test.size();
  extra["flagged"] = report.findings.size();
  if (!config.apply_out.empty()) {
    const ApplyStats stats =
        apply_contamination(report, config.inputs, opts, config.apply_out);
    extra["applied_kept"] = stats.kept;
    extra["applied_removed"] = stats.removed;
  }
  write_stage_stats(config, "decontaminate", clock.elapsed_sec(), total_tokens,
                    std::move(extra));
}

void run_stats(const PipelineConfig& config, std::ostream& out) {
  config.validate();
  require_inputs(config, "stats");
  ensure_dir(config.out_dir);

  const IngestOptions opts = config.ingest_options();
  const Vocabulary::Mode mode = parse_tokenizer_mode(config.tokenizer_mode);
  CorpusStats io_stats;
  uint64_t tokens = 0;
  uint64_t min_tokens = std::numeric_limits<uint64_t>::max();
  uint64_t max_tokens = 0;
  for_each_batch(config.inputs, opts, kBatchDocs,
                 [&](std::vector<RawRecord>& batch) {
                   for (const RawRecord& rec : batch) {
                     const uint64_t t = count_tokens(rec, mode);
                     tokens += t;
                     min_tokens = std::min(min_tokens, t);
                     max_tokens = std::max(max_tokens, t);
                   }
                 },
                 &io_stats);

  json j;
  j["artifact"] = "corpus-stats";
  j["config_digest"] = config.digest();
  j["documents"] = io_stats.doc_count;
  j["skipped_lines"] = io_stats.skipped_lines;
  j["text_bytes"] = io_stats.byte_count;
  j["tokens"] = tokens;
  j["min_tokens"] = io_stats.doc_count > 0 ? min_tokens : 0;
  j["max_tokens"] = max_tokens;
  j["mean_tokens"] = io_stats.doc_count > 0
                         ? static_cast<double>(tokens) /
                               static_cast<double>(io_stats.doc_count)
                         : 0.0;
  out << j.dump(2) << "\n";
  write_file(path_join(config.out_dir, artifact::kCorpusStats),
             j.dump() + "\n");
}

namespace {

constexpr int kHistogramBins = 50;

// Fixed 50-bin histogram over log-spaced edges spanning [lo, hi].
std::vector<uint64_t> log_histogram(const std::vector<CommonnessRecord>& records,
                                    double lo, double hi) {
  std::vector<uint64_t> bins(kHistogramBins, 0);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  const double span = log_hi - log_lo;
  for (const CommonnessRecord& r : records) {
    int b = 0;
    if (span > 0.0) {
      b = static_cast<int>((std::log(r.commonness) - log_lo) / span *
                           kHistogramBins);
      b = std::clamp(b, 0, kHistogramBins - 1);
    }
    ++bins[static_cast<size_t>(b)];
  }
  return bins;
}

}  // namespace

void run_report(const PipelineConfig& config, std::ostream& out) {
  const std::string& dir = config.out_dir;
  std::ostringstream text;
  json j;
  j["artifact"] = "report";
  bool any = false;
  std::map<std::string, std::string> digests;

  text << "Pipeline report for '" << dir << "'\n";

  std::unordered_map<std::string, double> commonness_by_id;
  const std::string commonness_path = path_join(dir, artifact::kCommonness);
  if (file_exists(commonness_path)) {
    any = true;
    const CommonnessFile cf = read_commonness(commonness_path);
    digests["commonness"] = cf.config_digest;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const CommonnessRecord& r : cf.records) {
      lo = std::min(lo, r.commonness);
      hi = std::max(hi, r.commonness);
      commonness_by_id.emplace(r.doc_id, r.commonness);
    }
    json c;
    c["documents"] = cf.records.size();
    if (!cf.records.empty()) {
      c["min"] = lo;
      c["max"] = hi;
      c["histogram_bins"] = kHistogramBins;
      c["histogram_scale"] = "log";
      c["histogram"] = log_histogram(cf.records, lo, hi);
    }
    j["commonness"] = c;

    text << "\nCommonness (" << cf.records.size() << " documents)\n";
    if (!cf.records.empty()) {
      text << "  min " << format_double(lo) << "  max " << format_double(hi)
           << "\n";
      text << "  histogram (" << kHistogramBins
           << " log-spaced bins, low to high):\n   ";
      for (uint64_t count : log_histogram(cf.records, lo, hi)) {
        text << ' ' << count;
      }
      text << "\n";
    }
  }

  const std::string plan_path = path_join(dir, artifact::kPlan);
  if (file_exists(plan_path)) {
    any = true;
    const PlanFile pf = read_plan(plan_path);
    digests["plan"] = pf.config_digest;
    json p;
    p["K"] = pf.plan.K;
    p["T"] = pf.plan.T;
    p["C"] = pf.plan.C;
    p["quantile_stat"] = quantile_stat_name(pf.plan.stat);
    p["quantiles"] = pf.plan.quantiles;
    p["weights"] = pf.plan.weights;
    p["segment_sizes"] = pf.plan.segment_sizes;
    j["plan"] = p;

    text << "\nSegment plan (K=" << pf.plan.K
         << ", T=" << format_double(pf.plan.T) << ")\n";
    text << "  k      docs          p_k          W_k\n";
    double weight_sum = 0.0;
    for (int k = 0; k < pf.plan.K; ++k) {
      const double w = k < static_cast<int>(pf.plan.weights.size())
                           ? pf.plan.weights[static_cast<size_t>(k)]
                           : 0.0;
      weight_sum += w;
      std::ostringstream row;
      row << "  " << (k + 1) << "  " << pf.plan.segment_sizes[static_cast<size_t>(k)]
          << "  " << format_double(pf.plan.quantiles[static_cast<size_t>(k)])
          << "  " << format_double(w) << "\n";
      text << row.str();
    }
    text << "  sum W_k = " << format_double(weight_sum) << "\n";
  }

  const std::string manifest_path = path_join(dir, artifact::kManifest);
  if (file_exists(manifest_path)) {
    any = true;
    const ManifestFile mf = read_manifest(manifest_path);
    digests["manifest"] = mf.config_digest;
    json m;
    m["seed"] = mf.manifest.seed;
    m["token_budget"] = mf.manifest.token_budget;
    m["achieved_tokens"] = mf.manifest.achieved_tokens;
    m["draws"] = mf.manifest.entries.size();
    m["per_segment_draws"] = mf.manifest.per_segment_draws;
    m["plan_digest"] = mf.manifest.plan_digest;
    j["sample"] = m;

    text << "\nSampling manifest\n";
    text << "  seed " << mf.manifest.seed << ", budget "
         << mf.manifest.token_budget << ", achieved "
         << mf.manifest.achieved_tokens << " tokens, "
         << mf.manifest.entries.size() << " draws\n";
    text << "  draws per segment:";
    for (uint64_t d : mf.manifest.per_segment_draws) text << ' ' << d;
    text << "\n";
  }

  const std::string dedup_path = path_join(dir, artifact::kDedup);
  if (file_exists(dedup_path)) {
    any = true;
    const DedupFile df = read_dedup(dedup_path);
    digests["dedup"] = df.config_digest;
    uint64_t kept = 0;
    uint64_t clusters = 0;
    std::unordered_map<uint64_t, uint64_t> cluster_sizes;
    double kept_sum = 0.0;
    uint64_t kept_scored = 0;
    double removed_sum = 0.0;
    uint64_t removed_scored = 0;
    for (const DedupDecision& d : df.decisions) {
      clusters = std::max(clusters, d.cluster_id + 1);
      ++cluster_sizes[d.cluster_id];
      if (d.keep) ++kept;
      auto it = commonness_by_id.find(d.doc_id);
      if (it != commonness_by_id.end()) {
        if (d.keep) {
          kept_sum += it->second;
          ++kept_scored;
        } else {
          removed_sum += it->second;
          ++removed_scored;
        }
      }
    }
    uint64_t duplicate_docs = 0;  // documents living in clusters of size > 1
    uint64_t nontrivial_clusters = 0;
    for (const auto& [id, size] : cluster_sizes) {
      if (size > 1) {
        ++nontrivial_clusters;
        duplicate_docs += size;
      }
    }
    json d;
    d["documents"] = df.decisions.size();
    d["clusters"] = clusters;
    d["clusters_with_duplicates"] = nontrivial_clusters;
    d["documents_in_duplicate_clusters"] = duplicate_docs;
    d["kept"] = kept;
    d["removed"] = df.decisions.size() - kept;
    if (kept_scored > 0) {
      d["kept_mean_commonness"] = kept_sum / static_cast<double>(kept_scored);
    }
    if (removed_scored > 0) {
      d["removed_mean_commonness"] =
          removed_sum / static_cast<double>(removed_scored);
    }
    j["dedup"] = d;

    text << "\nHard dedup\n";
    text << "  " << df.decisions.size() << " documents in " << clusters
         << " clusters (" << nontrivial_clusters
         << " with duplicates covering " << duplicate_docs << " documents)\n";
    text << "  kept " << kept << ", removed " << (df.decisions.size() - kept)
         << "\n";
    if (removed_scored > 0 && kept_scored > 0) {
      text << "  mean commonness: kept "
           << format_double(kept_sum / static_cast<double>(kept_scored))
           << ", removed "
           << format_double(removed_sum / static_cast<double>(removed_scored))
           << "\n";
    }
  }

  const std::string contamination_path =
      path_join(dir, artifact::kContamination);
  if (file_exists(contamination_path)) {
    any = true;
    const ContaminationFile cf = read_contamination(contamination_path);
    digests["contamination"] = cf.config_digest;
    uint64_t max_overlap = 0;
    for (const ContaminationFinding& f : cf.report.findings) {
      max_overlap = std::max(max_overlap, f.overlap_len);
    }
    json c;
    c["threshold"] = cf.report.threshold;
    c["train_docs"] = cf.report.train_docs;
    c["test_docs"] = cf.report.test_docs;
    c["flagged"] = cf.report.findings.size();
    c["max_overlap"] = max_overlap;
    j["decontamination"] = c;

    text << "\nDecontamination\n";
    text << "  threshold " << cf.report.threshold << ": flagged "
         << cf.report.findings.size() << " of " << cf.report.train_docs
         << " training documents (longest overlap " << max_overlap
         << " tokens)\n";
  }

  // Wall-clock sidecars, present only for stages run in this out_dir.
  static const char* kStages[] = {"train-lm",  "score",     "partition",
                                  "sample",    "harddedup", "decontaminate"};
  json throughput = json::object();
  std::ostringstream throughput_text;
  for (const char* stage : kStages) {
    const std::string path =
        path_join(dir, artifact::stage_stats_name(stage));
    if (!file_exists(path)) continue;
    const json s = read_json_file(path);
    throughput[stage] = s;
    throughput_text << "  " << stage << ": "
                    << format_double(s.value("tokens_per_sec", 0.0))
                    << " tokens/sec ("
                    << format_double(s.value("elapsed_sec", 0.0)) << " s, "
                    << s.value("tokens", static_cast<uint64_t>(0))
                    << " tokens)\n";
  }
  if (!throughput.empty()) {
    any = true;
    j["throughput"] = throughput;
    text << "\nThroughput\n" << throughput_text.str();
  }

  if (!any) {
    throw UsageError("no artifacts found in '" + dir +
                     "'; run `run` or individual stages first");
  }

  bool consistent = true;
  for (const auto& [name, digest] : digests) {
    if (digest != digests.begin()->second) consistent = false;
  }
  if (!digests.empty()) {
    j["config_digests"] = digests;
    j["digest_consistent"] = consistent;
    text << "\nProvenance\n";
    for (const auto& [name, digest] : digests) {
      text << "  " << name << ": config " << digest << "\n";
    }
    text << "  digests " << (consistent ? "consistent" : "MIXED") << "\n";
  }

  out << text.str();
  write_file(path_join(dir, artifact::kReportText), text.str());
  write_file(path_join(dir, artifact::kReportJson), j.dump() + "\n");
}

void run_all(const PipelineConfig& config) {
  config.validate();
  require_inputs(config, "run");
  if (config.token_budget == 0) {
    throw UsageError("run needs a positive token_budget for the sampling stage");
  }
  run_train_lm(config);
  run_score(config);
  run_partition(config);
  run_sample(config);
  if (config.run_harddedup) run_harddedup(config);
  if (config.run_decontaminate) run_decontaminate(config);
}

}  // namespace dupweight
