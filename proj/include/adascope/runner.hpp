#pragma once

#include <string>
#include <vector>

#include "adascope/config.hpp"
#include "adascope/diffusion.hpp"
#include "adascope/finetune.hpp"

namespace adascope {

inline constexpr const char* kToolVersion = "0.1.0";

// cfg.out_dir unless the ADASCOPE_OUT_DIR environment variable overrides it.
std::string resolve_out_dir(const RunConfig& cfg);

NoiseSchedule schedule_from_config(const RunConfig& cfg);
ToyDataModel data_from_config(const RunConfig& cfg);
DenoiserModel::Dims dims_from_config(const RunConfig& cfg);

// Every run writes only under its output directory, tracks each produced
// file with a checksum, and finishes with manifest.json so a complete
// inventory exists exactly when the run succeeded.

struct PretrainArtifacts {
  std::string checkpoint_path;
  PretrainResult result;
};

// Trains the noise predictor from scratch; writes checkpoint.json and
// pretrain_loss.csv (columns: step,loss).
PretrainArtifacts run_pretrain(const RunConfig& cfg);

struct FinetuneArtifacts {
  std::string metrics_path;
  std::string checkpoint_path;
  TrainingMetrics metrics;
};

// RL fine-tuning from a pretrained checkpoint; an empty checkpoint path
// pretrains in process first (same substreams as run_pretrain). Writes
// metrics.csv (one row per round) and the final checkpoint.json.
FinetuneArtifacts run_finetune(const RunConfig& cfg, const std::string& checkpoint_path);

// Probes one prompt with the frozen model and writes probe_scope.csv
// (columns: k,delta_s_raw,delta_s_smoothed,delta_p_raw,delta_p_smoothed,d_s,d_p
// for k = 1..T-1, plus a '#' summary line with the detected interval).
void run_probe_scope(const RunConfig& cfg, int prompt, const std::string& checkpoint_path);

// Closed-form vs Monte Carlo correlation table; writes corr.csv (columns:
// t,tau,i,j,corr_analytic,corr_mc,std_error,uncertainty) over t = 0..T-tau
// and index pairs (0,0), (1,1), (0,1), with uncertainty = 1 - corr_analytic.
void run_analyze_corr(const RunConfig& cfg);

// Runs scope variants {full, adaptive, fixed} from one shared pretrained
// start and identical seeds; writes metrics_<variant>.csv per variant and
// ablate_summary.csv comparing end states.
void run_ablate(const RunConfig& cfg, const std::string& checkpoint_path);

// Aggregates prior run directories: report_summary.csv plus reward_curve.svg,
// and when the inputs carry probe/correlation tables, gains.svg and
// uncertainty.svg. Consumes CSV columns by header name only.
void run_report(const RunConfig& cfg, const std::vector<std::string>& input_dirs);

}  // namespace adascope
