#include "dupweight/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dupweight/error.hpp"
#include "dupweight/hashing.hpp"
#include "dupweight/io_util.hpp"

namespace dupweight {

namespace {

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

int64_t parse_int(const std::string& key, const std::string& value) {
  int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "' needs an integer, got '" + value + "'");
  }
  return out;
}

uint64_t parse_uint(const std::string& key, const std::string& value) {
  uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw UsageError("config key '" + key + "' needs a non-negative integer, got '" +
                     value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "' needs a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config key '" + key + "' needs true/false, got '" + value + "'");
}

}  // namespace

IngestOptions PipelineConfig::ingest_options() const {
  IngestOptions opts;
  if (on_bad_line == "fail") {
    opts.policy = LinePolicy::kFailFast;
  } else if (on_bad_line == "skip") {
    opts.policy = LinePolicy::kSkipAndCount;
  } else {
    throw UsageError("on_bad_line must be 'fail' or 'skip', got '" + on_bad_line + "'");
  }
  opts.allow_empty = allow_empty;
  return opts;
}

std::string PipelineConfig::digest() const {
  // Canonical serialization of semantic fields only. Format strings exactly;
  // doubles through the round-trip formatter so equal configs hash equally.
  std::ostringstream s;
  s << "K=" << K << '\n';
  s << "T=" << format_double(T) << '\n';
  s << "allow_empty=" << (allow_empty ? 1 : 0) << '\n';
  s << "bands=" << bands << '\n';
  for (const auto& p : inputs) s << "input=" << p << '\n';
  s << "keep_policy=" << keep_policy << '\n';
  s << "min_count=" << min_count << '\n';
  s << "n=" << n << '\n';
  s << "num_hashes=" << num_hashes << '\n';
  s << "on_bad_line=" << on_bad_line << '\n';
  s << "quantile_stat=" << quantile_stat << '\n';
  s << "rows=" << rows << '\n';
  s << "sample_format=" << sample_format << '\n';
  s << "seed=" << seed << '\n';
  s << "shingle_width=" << shingle_width << '\n';
  s << "target_ratio=" << format_double(target_ratio) << '\n';
  for (const auto& p : test_inputs) s << "test_input=" << p << '\n';
  s << "threshold=" << threshold << '\n';
  s << "token_budget=" << token_budget << '\n';
  s << "tokenizer_mode=" << tokenizer_mode << '\n';
  return hex64(fnv1a64(s.str()));
}

void PipelineConfig::validate() const {
  if (n < 2) throw UsageError("n-gram order n must be >= 2");
  if (n > 8) throw UsageError("n-gram order n must be <= 8");
  if (K < 1) throw UsageError("segment count K must be >= 1");
  if (workers < 1) throw UsageError("workers must be >= 1");
  if (tokenizer_mode != "whitespace" && tokenizer_mode != "passthrough") {
    throw UsageError("tokenizer_mode must be 'whitespace' or 'passthrough', got '" +
                     tokenizer_mode + "'");
  }
  if (T >= 0.0 && target_ratio >= 0.0) {
    throw UsageError("set either T or target_ratio, not both");
  }
  if (target_ratio >= 0.0 && target_ratio < 1.0) {
    throw UsageError("target_ratio must be >= 1");
  }
  ingest_options();           // validates on_bad_line
  if (num_hashes < 1) throw UsageError("num_hashes must be >= 1");
  if (shingle_width < 1) throw UsageError("shingle_width must be >= 1");
  if (bands < 1 || rows < 1) throw UsageError("bands and rows must be >= 1");
  if (keep_policy != "first-id" && keep_policy != "longest") {
    throw UsageError("keep_policy must be 'first-id' or 'longest', got '" +
                     keep_policy + "'");
  }
  if (quantile_stat != "upper" && quantile_stat != "median") {
    throw UsageError("quantile_stat must be 'upper' or 'median', got '" +
                     quantile_stat + "'");
  }
  if (sample_format != "id-list" && sample_format != "text") {
    throw UsageError("sample_format must be 'id-list' or 'text', got '" +
                     sample_format + "'");
  }
}

bool PipelineConfig::exponent_given(double* t_out, double* ratio_out) const {
  if (T >= 0.0) {
    *t_out = T;
    return true;
  }
  *ratio_out = target_ratio >= 0.0 ? target_ratio : 10.0;
  return false;
}

void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "input") {
    config.inputs.push_back(value);
  } else if (key == "test_input") {
    config.test_inputs.push_back(value);
  } else if (key == "out_dir") {
    config.out_dir = value;
  } else if (key == "workers") {
    config.workers = static_cast<int>(parse_int(key, value));
  } else if (key == "on_bad_line") {
    config.on_bad_line = value;
  } else if (key == "allow_empty") {
    config.allow_empty = parse_bool(key, value);
  } else if (key == "tokenizer_mode") {
    config.tokenizer_mode = value;
  } else if (key == "n") {
    config.n = static_cast<int>(parse_int(key, value));
  } else if (key == "min_count") {
    config.min_count = parse_uint(key, value);
  } else if (key == "K") {
    config.K = static_cast<int>(parse_int(key, value));
  } else if (key == "T") {
    config.T = parse_real(key, value);
  } else if (key == "target_ratio") {
    config.target_ratio = parse_real(key, value);
  } else if (key == "quantile_stat") {
    config.quantile_stat = value;
  } else if (key == "token_budget") {
    config.token_budget = parse_uint(key, value);
  } else if (key == "seed") {
    config.seed = parse_uint(key, value);
  } else if (key == "sample_format") {
    config.sample_format = value;
  } else if (key == "num_hashes") {
    config.num_hashes = static_cast<int>(parse_int(key, value));
  } else if (key == "shingle_width") {
    config.shingle_width = static_cast<int>(parse_int(key, value));
  } else if (key == "bands") {
    config.bands = static_cast<int>(parse_int(key, value));
  } else if (key == "rows") {
    config.rows = static_cast<int>(parse_int(key, value));
  } else if (key == "keep_policy") {
    config.keep_policy = value;
  } else if (key == "threshold") {
    config.threshold = parse_uint(key, value);
  } else if (key == "apply_out") {
    config.apply_out = value;
  } else if (key == "run_harddedup") {
    config.run_harddedup = parse_bool(key, value);
  } else if (key == "run_decontaminate") {
    config.run_decontaminate = parse_bool(key, value);
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

void load_config_file(PipelineConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": expected key=value, got '" + stripped + "'");
    }
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": empty config key");
    }
    try {
      apply_config_entry(config, key, value);
    } catch (const UsageError& e) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace dupweight
