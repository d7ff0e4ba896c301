#pragma once

#include <cstdint>
#include <string>

#include "adascope/diffusion.hpp"
#include "adascope/finetune.hpp"
#include "adascope/rewards.hpp"

namespace adascope {

// Whole-run configuration with a flat dotted-key text format, one
// `key = value` pair per line, `#` comments, quoted or bare strings.
// Unknown keys and malformed values are collected and reported together.
struct RunConfig {
  // schedule.*
  std::string schedule_kind = "linear";  // linear | cosine
  int schedule_T = 50;
  double beta_min = 0.002;  // 1000-step endpoints rescaled to T=50
  double beta_max = 0.4;
  double cosine_offset = 0.008;
  // data.*
  int data_dim = 2;
  int num_prompts = 4;
  double radius = 2.0;
  double sigma_data = 0.3;
  // model.*
  int hidden = 64;
  int time_dim = 16;
  int prompt_dim = 8;
  // pretrain.*
  PretrainConfig pretrain;
  // finetune.* and detect.*
  FinetuneConfig finetune;
  // reward.*
  std::string reward_name = "proximity";
  RewardParams reward;
  double sigma_f = 0.5;
  // corr.*
  int corr_samples = 100000;
  int corr_tau = 1;
  // run.*
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;

  // Cross-field validation; throws ConfigError listing every violation.
  void validate() const;
};

const char* scope_mode_name(ScopeMode mode);
ScopeMode parse_scope_mode(const std::string& name);  // throws ConfigError

// Parses config text. Missing keys keep defaults; an empty document is the
// default config. Throws ConfigError listing every offending line/key.
RunConfig parse_config(const std::string& text);

// Reads and parses a config file; a missing file is a ConfigError.
RunConfig load_config(const std::string& path);

// Canonical serialization: every key in schema order, full double precision.
// parse_config(save_config(cfg)) == cfg.
std::string save_config(const RunConfig& cfg);

}  // namespace adascope
