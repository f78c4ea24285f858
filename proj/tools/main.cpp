// Command-line front end. Option precedence: command line > config file >
// built-in defaults. Exit codes: 0 success, 1 usage/config error, 2 data
// error, 3 internal consistency error.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dupweight/config.hpp"
#include "dupweight/error.hpp"
#include "dupweight/pipeline.hpp"

namespace {

using dupweight::PipelineConfig;

// Storage for every CLI option; a value is copied into the config only when
// its option was actually given, which is what makes the config file the
// fallback rather than the override.
struct CliValues {
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<std::string> test_inputs;
  std::string out_dir;
  int workers = 0;
  std::string on_bad_line;
  bool allow_empty = false;
  std::string tokenizer_mode;
  int n = 0;
  uint64_t min_count = 0;
  int K = 0;
  double T = 0.0;
  double target_ratio = 0.0;
  std::string quantile_stat;
  uint64_t token_budget = 0;
  uint64_t seed = 0;
  std::string sample_format;
  int num_hashes = 0;
  int shingle_width = 0;
  int bands = 0;
  int rows = 0;
  std::string keep_policy;
  uint64_t threshold = 0;
  std::string apply_out;
  bool harddedup = false;
  bool decontaminate = false;
};

using Applier = std::function<void(PipelineConfig&)>;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dupweight: document commonness scoring with an n-gram language model, "
      "quantile-based reweighting, seeded sampling, near-duplicate detection "
      "and test-set decontamination for JSONL corpora"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", "dupweight 0.1.0");

  CliValues v;
  std::vector<std::pair<CLI::Option*, Applier>> appliers;
  auto track = [&appliers](CLI::Option* option, Applier fn) -> CLI::Option* {
    appliers.emplace_back(option, std::move(fn));
    return option;
  };

  app.add_option("--config", v.config_path,
                 "flat key=value config file (CLI flags override it)");
  track(app.add_option("--workers", v.workers,
                       "worker threads; outputs are identical for any value"),
        [&v](PipelineConfig& c) { c.workers = v.workers; });
  track(app.add_option("--seed", v.seed, "seed for sampling and MinHash"),
        [&v](PipelineConfig& c) { c.seed = v.seed; });
  track(app.add_option("--out-dir", v.out_dir, "artifact directory"),
        [&v](PipelineConfig& c) { c.out_dir = v.out_dir; });

  auto add_corpus_options = [&](CLI::App* sub) {
    track(sub->add_option("--input", v.inputs,
                          "input corpus JSONL file (repeatable)"),
          [&v](PipelineConfig& c) { c.inputs = v.inputs; });
    track(sub->add_option("--on-bad-line", v.on_bad_line,
                          "malformed line policy: fail | skip"),
          [&v](PipelineConfig& c) { c.on_bad_line = v.on_bad_line; });
    track(sub->add_flag("--allow-empty", v.allow_empty,
                        "accept documents with empty text"),
          [&v](PipelineConfig& c) { c.allow_empty = v.allow_empty; });
    track(sub->add_option("--tokenizer-mode", v.tokenizer_mode,
                          "whitespace | passthrough"),
          [&v](PipelineConfig& c) { c.tokenizer_mode = v.tokenizer_mode; });
  };
  auto add_model_options = [&](CLI::App* sub) {
    track(sub->add_option("--n", v.n, "n-gram order (default 4)"),
          [&v](PipelineConfig& c) { c.n = v.n; });
    track(sub->add_option("--min-count", v.min_count,
                          "prune n-grams with adjusted count below this "
                          "(default 1 = keep everything)"),
          [&v](PipelineConfig& c) { c.min_count = v.min_count; });
  };
  std::vector<CLI::Option*> t_options;
  std::vector<CLI::Option*> ratio_options;
  auto add_partition_options = [&](CLI::App* sub) {
    track(sub->add_option("--K", v.K, "number of segments (default 20)"),
          [&v](PipelineConfig& c) { c.K = v.K; });
    t_options.push_back(
        track(sub->add_option("--T", v.T, "weight exponent (>= 0)"),
              [&v](PipelineConfig& c) { c.T = v.T; }));
    ratio_options.push_back(track(
        sub->add_option("--target-ratio", v.target_ratio,
                        "max/min weight ratio to solve T for (default 10)"),
        [&v](PipelineConfig& c) { c.target_ratio = v.target_ratio; }));
    track(sub->add_option("--quantile-stat", v.quantile_stat,
                          "per-segment representative: upper | median"),
          [&v](PipelineConfig& c) { c.quantile_stat = v.quantile_stat; });
  };
  auto add_sample_options = [&](CLI::App* sub) {
    track(sub->add_option("--token-budget", v.token_budget,
                          "stop sampling once this many tokens are drawn"),
          [&v](PipelineConfig& c) { c.token_budget = v.token_budget; });
    track(sub->add_option("--format", v.sample_format,
                          "sample export: id-list | text"),
          [&v](PipelineConfig& c) { c.sample_format = v.sample_format; });
  };
  auto add_dedup_options = [&](CLI::App* sub) {
    track(sub->add_option("--num-hashes", v.num_hashes,
                          "MinHash signature length H (default 128)"),
          [&v](PipelineConfig& c) { c.num_hashes = v.num_hashes; });
    track(sub->add_option("--shingle-width", v.shingle_width,
                          "tokens per shingle (default 5)"),
          [&v](PipelineConfig& c) { c.shingle_width = v.shingle_width; });
    track(sub->add_option("--bands", v.bands, "LSH bands b (default 16)"),
          [&v](PipelineConfig& c) { c.bands = v.bands; });
    track(sub->add_option("--rows", v.rows,
                          "LSH rows per band r; b*r must equal H (default 8)"),
          [&v](PipelineConfig& c) { c.rows = v.rows; });
    track(sub->add_option("--keep-policy", v.keep_policy,
                          "representative per cluster: first-id | longest"),
          [&v](PipelineConfig& c) { c.keep_policy = v.keep_policy; });
  };
  auto add_decontaminate_options = [&](CLI::App* sub) {
    track(sub->add_option("--test-input", v.test_inputs,
                          "held-out corpus JSONL file (repeatable)"),
          [&v](PipelineConfig& c) { c.test_inputs = v.test_inputs; });
    track(sub->add_option("--threshold", v.threshold,
                          "flag overlaps of more than this many contiguous "
                          "tokens (default 50)"),
          [&v](PipelineConfig& c) { c.threshold = v.threshold; });
    track(sub->add_option("--apply-out", v.apply_out,
                          "also write the corpus minus flagged documents here"),
          [&v](PipelineConfig& c) { c.apply_out = v.apply_out; });
  };

  CLI::App* train = app.add_subcommand(
      "train-lm", "train the smoothed n-gram model; writes vocab.tsv, "
                  "model.arpa, model.meta.json");
  add_corpus_options(train);
  add_model_options(train);

  CLI::App* score = app.add_subcommand(
      "score", "score per-document commonness; writes commonness.jsonl");
  add_corpus_options(score);

  CLI::App* partition = app.add_subcommand(
      "partition",
      "split documents into K quantile segments and assign inverse-power "
      "weights; writes plan.jsonl");
  add_partition_options(partition);

  CLI::App* sample = app.add_subcommand(
      "sample", "draw a weighted sample to a token budget; writes "
                "manifest.jsonl and the exported sample");
  add_corpus_options(sample);
  add_sample_options(sample);

  CLI::App* harddedup = app.add_subcommand(
      "harddedup", "MinHash/LSH near-duplicate clustering; writes dedup.jsonl");
  add_corpus_options(harddedup);
  add_dedup_options(harddedup);

  CLI::App* decontaminate = app.add_subcommand(
      "decontaminate", "flag training documents sharing a long contiguous "
                       "token run with a held-out set; writes "
                       "contamination.jsonl");
  add_corpus_options(decontaminate);
  add_decontaminate_options(decontaminate);

  CLI::App* stats = app.add_subcommand(
      "stats", "corpus statistics; writes corpus_stats.json and prints it");
  add_corpus_options(stats);

  app.add_subcommand("report",
                     "summarize the artifacts in the output directory; writes "
                     "report.txt and report.json");

  CLI::App* run = app.add_subcommand(
      "run", "full pipeline: train-lm, score, partition, sample, plus "
             "toggled stages");
  add_corpus_options(run);
  add_model_options(run);
  add_partition_options(run);
  add_sample_options(run);
  add_dedup_options(run);
  add_decontaminate_options(run);
  track(run->add_flag("--harddedup", v.harddedup,
                      "also run near-duplicate clustering"),
        [&v](PipelineConfig& c) { c.run_harddedup = v.harddedup; });
  track(run->add_flag("--decontaminate", v.decontaminate,
                      "also run decontamination (needs --test-input)"),
        [&v](PipelineConfig& c) { c.run_decontaminate = v.decontaminate; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    PipelineConfig config;
    if (!v.config_path.empty()) {
      dupweight::load_config_file(config, v.config_path);
    }
    for (const auto& [option, apply] : appliers) {
      if (option->count() > 0) apply(config);
    }
    // An exponent given on the command line replaces a ratio from the config
    // file (and vice versa); giving both on the command line is an error
    // caught by validate().
    auto given = [](const std::vector<CLI::Option*>& options) {
      for (const CLI::Option* o : options) {
        if (o->count() > 0) return true;
      }
      return false;
    };
    const bool t_given = given(t_options);
    const bool ratio_given = given(ratio_options);
    if (t_given && !ratio_given) config.target_ratio = -1.0;
    if (ratio_given && !t_given) config.T = -1.0;

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "train-lm") {
      dupweight::run_train_lm(config);
    } else if (name == "score") {
      dupweight::run_score(config);
    } else if (name == "partition") {
      dupweight::run_partition(config);
    } else if (name == "sample") {
      dupweight::run_sample(config);
    } else if (name == "harddedup") {
      dupweight::run_harddedup(config);
    } else if (name == "decontaminate") {
      dupweight::run_decontaminate(config);
    } else if (name == "stats") {
      dupweight::run_stats(config, std::cout);
    } else if (name == "report") {
      dupweight::run_report(config, std::cout);
    } else if (name == "run") {
      dupweight::run_all(config);
    } else {
      std::cerr << "error: unknown subcommand '" << name << "'\n";
      return 1;
    }
  } catch (const dupweight::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dupweight::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const dupweight::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
