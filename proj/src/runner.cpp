#include "adascope/runner.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <utility>

#include "adascope/csv.hpp"
#include "adascope/checkpoint.hpp"
#include "adascope/errors.hpp"
#include "adascope/gauss.hpp"
#include "adascope/manifest.hpp"
#include "adascope/rewards.hpp"
#include "adascope/rng.hpp"
#include "adascope/scope.hpp"
#include "adascope/svg.hpp"

namespace adascope {

namespace fs = std::filesystem;

namespace {

// Collects every artifact of a run and closes with the manifest, which is
// written last so its presence certifies a complete output set.
class ArtifactSink {
 public:
  ArtifactSink(const RunConfig& cfg, std::string out_dir) : out_dir_(std::move(out_dir)) {
    fs::create_directories(out_dir_);
    manifest_.tool_version = kToolVersion;
    manifest_.config_text = save_config(cfg);
    manifest_.config_hash = fnv1a64_hex(manifest_.config_text);
    manifest_.seed = cfg.seed;
    manifest_.started_at = iso8601_utc_now();
  }

  std::string path(const std::string& name) const { return out_dir_ + "/" + name; }
  const std::string& dir() const { return out_dir_; }

  void track(const std::string& name) { names_.push_back(name); }

  void write(const std::string& name, const std::string& content) {
    write_text_atomic(path(name), content);
    track(name);
  }

  void finish() {
    for (const auto& name : names_) {
      manifest_.files.emplace_back(name, fnv1a64_hex(read_text_file(path(name))));
    }
    manifest_.finished_at = iso8601_utc_now();
    write_manifest(path("manifest.json"), manifest_);
  }

 private:
  std::string out_dir_;
  RunManifest manifest_;
  std::vector<std::string> names_;
};

DenoiserModel pretrain_in_process(const RunConfig& cfg, const NoiseSchedule& s,
                                  const ToyDataModel& data, PretrainResult* result) {
  DenoiserModel model(dims_from_config(cfg), derive_seed(cfg.seed, "model-init"));
  PretrainResult r = pretrain(model, data, s, cfg.pretrain, derive_seed(cfg.seed, "pretrain"));
  if (result) *result = std::move(r);
  return model;
}

// A checkpoint trained under a different geometry cannot serve this config.
Checkpoint load_matching_checkpoint(const RunConfig& cfg, const std::string& path) {
  Checkpoint ckpt = load_checkpoint(path);
  std::string problems;
  auto add = [&problems](const std::string& m) {
    if (!problems.empty()) problems += "; ";
    problems += m;
  };
  if (ckpt.schedule.T != cfg.schedule_T) add("schedule.T differs");
  const auto& d = ckpt.model.dims();
  if (d.x_dim != cfg.data_dim) add("data.dim differs");
  if (d.num_prompts != cfg.num_prompts) add("data.num_prompts differs");
  if (d.hidden != cfg.hidden || d.time_dim != cfg.time_dim || d.prompt_dim != cfg.prompt_dim) {
    add("model dims differ");
  }
  if (!problems.empty()) throw ConfigError("checkpoint does not match config: " + problems);
  return ckpt;
}

FinetuneConfig variant_config(const RunConfig& cfg, ScopeMode mode) {
  FinetuneConfig fc = cfg.finetune;
  fc.scope_mode = mode;
  return fc;
}

std::string run_label(const std::string& dir) {
  const fs::path p(dir);
  const std::string base = p.filename().string();
  return base.empty() ? p.parent_path().filename().string() : base;
}

double cell_double(const CsvTable& t, std::size_t row, int col) {
  if (col < 0 || row >= t.rows.size()) return std::numeric_limits<double>::quiet_NaN();
  const auto& r = t.rows[row];
  if (static_cast<std::size_t>(col) >= r.size()) return std::numeric_limits<double>::quiet_NaN();
  return std::strtod(r[static_cast<std::size_t>(col)].c_str(), nullptr);
}

struct MetricsSummary {
  std::string run;
  std::size_t rounds = 0;
  double final_mean_reward = 0.0;
  double final_diversity = 0.0;
  double grad_steps_cum = 0.0;
  double scope_start = 0.0;
  double scope_end = 0.0;
};

MetricsSummary summarize_metrics(const std::string& run, const CsvTable& t) {
  MetricsSummary s;
  s.run = run;
  s.rounds = t.rows.size();
  if (t.rows.empty()) return s;
  const std::size_t last = t.rows.size() - 1;
  s.final_mean_reward = cell_double(t, last, column_index(t, "mean_reward"));
  s.final_diversity = cell_double(t, last, column_index(t, "diversity"));
  s.grad_steps_cum = cell_double(t, last, column_index(t, "grad_steps_cum"));
  s.scope_start = cell_double(t, last, column_index(t, "scope_start"));
  s.scope_end = cell_double(t, last, column_index(t, "scope_end"));
  return s;
}

std::string summary_csv(const std::vector<MetricsSummary>& rows, const char* key_header) {
  std::ostringstream os;
  os << key_header
     << ",rounds,final_mean_reward,final_diversity,grad_steps_cum,scope_start,scope_end\n";
  for (const auto& r : rows) {
    os << r.run << ',' << r.rounds << ',' << format_double(r.final_mean_reward) << ','
       << format_double(r.final_diversity) << ',' << format_double(r.grad_steps_cum) << ','
       << format_double(r.scope_start) << ',' << format_double(r.scope_end) << '\n';
  }
  return os.str();
}

}  // namespace

std::string resolve_out_dir(const RunConfig& cfg) {
  if (const char* env = std::getenv("ADASCOPE_OUT_DIR"); env && *env) return env;
  return cfg.out_dir;
}

NoiseSchedule schedule_from_config(const RunConfig& cfg) {
  if (cfg.schedule_kind == "cosine") return make_cosine_schedule(cfg.schedule_T, cfg.cosine_offset);
  return make_linear_schedule(cfg.schedule_T, cfg.beta_min, cfg.beta_max);
}

ToyDataModel data_from_config(const RunConfig& cfg) {
  return ToyDataModel::circle(cfg.data_dim, cfg.num_prompts, cfg.radius, cfg.sigma_data);
}

DenoiserModel::Dims dims_from_config(const RunConfig& cfg) {
  DenoiserModel::Dims dims;
  dims.x_dim = cfg.data_dim;
  dims.num_prompts = cfg.num_prompts;
  dims.hidden = cfg.hidden;
  dims.time_dim = cfg.time_dim;
  dims.prompt_dim = cfg.prompt_dim;
  return dims;
}

PretrainArtifacts run_pretrain(const RunConfig& cfg) {
  ArtifactSink sink(cfg, resolve_out_dir(cfg));
  const NoiseSchedule s = schedule_from_config(cfg);
  const ToyDataModel data = data_from_config(cfg);

  PretrainArtifacts out;
  DenoiserModel model = pretrain_in_process(cfg, s, data, &out.result);

  std::ostringstream loss_csv;
  loss_csv << "step,loss\n";
  for (std::size_t i = 0; i < out.result.loss_curve.size(); ++i) {
    loss_csv << i << ',' << format_double(out.result.loss_curve[i]) << '\n';
  }
  sink.write("pretrain_loss.csv", loss_csv.str());

  out.checkpoint_path = sink.path("checkpoint.json");
  save_checkpoint(out.checkpoint_path, model, s);
  sink.track("checkpoint.json");
  sink.finish();

  std::cout << "pretrain: steps=" << out.result.loss_curve.size()
            << " smoothed_final=" << out.result.smoothed_final
            << " success=" << (out.result.success ? "true" : "false") << "\n";
  std::cout << "wrote " << out.checkpoint_path << "\n";
  return out;
}

FinetuneArtifacts run_finetune(const RunConfig& cfg, const std::string& checkpoint_path) {
  ArtifactSink sink(cfg, resolve_out_dir(cfg));
  const ToyDataModel data = data_from_config(cfg);

  NoiseSchedule s;
  DenoiserModel model(dims_from_config(cfg), 0);
  if (checkpoint_path.empty()) {
    s = schedule_from_config(cfg);
    model = pretrain_in_process(cfg, s, data, nullptr);
  } else {
    Checkpoint ckpt = load_matching_checkpoint(cfg, checkpoint_path);
    s = std::move(ckpt.schedule);
    model = std::move(ckpt.model);
  }

  const RewardFn reward = make_reward(cfg.reward_name, data, cfg.reward);
  const AlignmentFn align = make_alignment(data, cfg.sigma_f);

  FinetuneArtifacts out;
  out.metrics = finetune(model, data, s, reward, align, cfg.finetune,
                         derive_seed(cfg.seed, "finetune"));

  out.metrics_path = sink.path("metrics.csv");
  write_metrics_csv(out.metrics_path, out.metrics);
  sink.track("metrics.csv");

  out.checkpoint_path = sink.path("checkpoint.json");
  save_checkpoint(out.checkpoint_path, model, s);
  sink.track("checkpoint.json");
  sink.finish();

  if (!out.metrics.rounds.empty()) {
    const RoundMetrics& last = out.metrics.rounds.back();
    std::cout << "finetune: rounds=" << out.metrics.rounds.size()
              << " mean_reward=" << last.mean_reward << " diversity=" << last.diversity
              << " grad_steps=" << last.grad_steps_cum << " scope=[" << last.scope_start << ", "
              << last.scope_end << "]\n";
  } else {
    std::cout << "finetune: rounds=0 (no-op)\n";
  }
  std::cout << "wrote " << out.metrics_path << "\n";
  return out;
}

void run_probe_scope(const RunConfig& cfg, int prompt, const std::string& checkpoint_path) {
  if (prompt < 0 || prompt >= cfg.num_prompts) {
    throw ConfigError("probe-scope: prompt must be in [0, data.num_prompts)");
  }
  ArtifactSink sink(cfg, resolve_out_dir(cfg));
  const ToyDataModel data = data_from_config(cfg);

  NoiseSchedule s;
  DenoiserModel model(dims_from_config(cfg), 0);
  if (checkpoint_path.empty()) {
    s = schedule_from_config(cfg);
    model = pretrain_in_process(cfg, s, data, nullptr);
  } else {
    Checkpoint ckpt = load_matching_checkpoint(cfg, checkpoint_path);
    s = std::move(ckpt.schedule);
    model = std::move(ckpt.model);
  }

  const RewardFn reward = make_reward(cfg.reward_name, data, cfg.reward);
  const AlignmentFn align = make_alignment(data, cfg.sigma_f);
  const ProbeResult probe = probe_scope(model, data, s, prompt, align, reward,
                                        cfg.finetune.detect, derive_seed(cfg.seed, "probe-scope"));

  // row k holds series index k-1; d columns hold D_{k-1} (the step to index
  // k), so the last row leaves them empty
  std::ostringstream csv;
  csv << "k,delta_s_raw,delta_s_smoothed,delta_p_raw,delta_p_smoothed,d_s,d_p\n";
  const std::size_t n = probe.structural.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    csv << (i + 1) << ',' << format_double(probe.structural.values[i]) << ','
        << format_double(probe.structural.smoothed[i]) << ','
        << format_double(probe.preference.values[i]) << ','
        << format_double(probe.preference.smoothed[i]) << ',';
    if (i < probe.decision.start_diag.first_diffs.size()) {
      csv << format_double(probe.decision.start_diag.first_diffs[i]);
    }
    csv << ',';
    if (i < probe.decision.end_diag.first_diffs.size()) {
      csv << format_double(probe.decision.end_diag.first_diffs[i]);
    }
    csv << '\n';
  }
  const ScopeDecision& d = probe.decision;
  csv << "# t_start=" << d.t_start << " t_end=" << d.t_end
      << " start_fallback=" << d.start_diag.fallback << " start_trivial=" << d.start_diag.trivial
      << " end_fallback=" << d.end_diag.fallback << " end_trivial=" << d.end_diag.trivial
      << " epsilon_s=" << format_double(d.start_diag.epsilon)
      << " epsilon_p=" << format_double(d.end_diag.epsilon) << "\n";
  sink.write("probe_scope.csv", csv.str());
  sink.finish();

  std::cout << "probe-scope: prompt=" << prompt << " t_start=" << d.t_start
            << " t_end=" << d.t_end << " fallback=" << (d.start_diag.fallback || d.end_diag.fallback)
            << " trivial=" << (d.start_diag.trivial || d.end_diag.trivial) << "\n";
  std::cout << "wrote " << sink.path("probe_scope.csv") << "\n";
}

void run_analyze_corr(const RunConfig& cfg) {
  ArtifactSink sink(cfg, resolve_out_dir(cfg));
  const NoiseSchedule s = schedule_from_config(cfg);
  const int dim = cfg.data_dim;
  const DataCovariance cov(cfg.sigma_data * cfg.sigma_data *
                           Eigen::MatrixXd::Identity(dim, dim));
  const int tau = cfg.corr_tau;
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {1, 1}, {0, 1}};

  std::ostringstream csv;
  csv << "t,tau,i,j,corr_analytic,corr_mc,std_error,uncertainty\n";
  std::uint64_t row = 0;
  for (int t = 0; t + tau <= s.T; ++t) {
    for (const auto& [i, j] : pairs) {
      const CorrQuery q{t, tau, i, j};
      const double analytic = corr_analytic(s, cov, q);
      const McEstimate mc =
          corr_monte_carlo(s, cov, q, cfg.corr_samples, derive_seed(cfg.seed, "corr", row));
      csv << t << ',' << tau << ',' << i << ',' << j << ',' << format_double(analytic) << ','
          << format_double(mc.estimate) << ',' << format_double(mc.std_error) << ','
          << format_double(1.0 - analytic) << '\n';
      ++row;
    }
  }
  sink.write("corr.csv", csv.str());
  sink.finish();

  std::cout << "analyze-corr: rows=" << row << " tau=" << tau << " samples=" << cfg.corr_samples
            << "\n";
  std::cout << "wrote " << sink.path("corr.csv") << "\n";
}

void run_ablate(const RunConfig& cfg, const std::string& checkpoint_path) {
  // every variant must validate before any directory or compute exists
  for (ScopeMode mode : {ScopeMode::Full, ScopeMode::Adaptive, ScopeMode::Fixed}) {
    variant_config(cfg, mode).validate(cfg.schedule_T);
  }
  ArtifactSink sink(cfg, resolve_out_dir(cfg));
  const ToyDataModel data = data_from_config(cfg);

  NoiseSchedule s;
  DenoiserModel base(dims_from_config(cfg), 0);
  if (checkpoint_path.empty()) {
    s = schedule_from_config(cfg);
    base = pretrain_in_process(cfg, s, data, nullptr);
  } else {
    Checkpoint ckpt = load_matching_checkpoint(cfg, checkpoint_path);
    s = std::move(ckpt.schedule);
    base = std::move(ckpt.model);
  }

  const AlignmentFn align = make_alignment(data, cfg.sigma_f);
  const std::vector<std::pair<std::string, ScopeMode>> variants = {
      {"full", ScopeMode::Full}, {"adaptive", ScopeMode::Adaptive}, {"fixed", ScopeMode::Fixed}};

  std::vector<MetricsSummary> rows;
  for (const auto& [name, mode] : variants) {
    // fresh normalization state per variant: composite rewards carry running
    // statistics that must not leak across runs
    const RewardFn reward = make_reward(cfg.reward_name, data, cfg.reward);
    DenoiserModel model = base;
    const FinetuneConfig fc = variant_config(cfg, mode);
    TrainingMetrics metrics =
        finetune(model, data, s, reward, align, fc, derive_seed(cfg.seed, "finetune"));
    const std::string file = "metrics_" + name + ".csv";
    write_metrics_csv(sink.path(file), metrics);
    sink.track(file);

    CsvTable t = parse_csv_text(read_text_file(sink.path(file)));
    rows.push_back(summarize_metrics(name, t));
    const auto& r = rows.back();
    std::cout << "ablate " << name << ": mean_reward=" << r.final_mean_reward
              << " diversity=" << r.final_diversity << " grad_steps=" << r.grad_steps_cum
              << " scope=[" << r.scope_start << ", " << r.scope_end << "]\n";
  }

  sink.write("ablate_summary.csv", summary_csv(rows, "variant"));
  sink.finish();
  std::cout << "wrote " << sink.path("ablate_summary.csv") << "\n";
}

void run_report(const RunConfig& cfg, const std::vector<std::string>& input_dirs) {
  if (input_dirs.empty()) throw ConfigError("report: at least one --run directory is required");
  ArtifactSink sink(cfg, resolve_out_dir(cfg));

  std::vector<MetricsSummary> rows;
  std::vector<SvgSeries> reward_series;
  std::vector<SvgSeries> gain_series;
  std::vector<SvgSeries> uncertainty_series_plot;

  for (const auto& dir : input_dirs) {
    const std::string label = run_label(dir);

    const std::string metrics_path = dir + "/metrics.csv";
    if (fs::exists(metrics_path)) {
      const CsvTable t = read_csv(metrics_path);
      rows.push_back(summarize_metrics(label, t));
      const int round_col = column_index(t, "round");
      const int reward_col = column_index(t, "mean_reward");
      if (round_col >= 0 && reward_col >= 0) {
        SvgSeries series;
        series.label = label;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          series.xs.push_back(cell_double(t, r, round_col));
          series.ys.push_back(cell_double(t, r, reward_col));
        }
        reward_series.push_back(std::move(series));
      }
    }

    const std::string probe_path = dir + "/probe_scope.csv";
    if (fs::exists(probe_path)) {
      const CsvTable t = read_csv(probe_path);
      const int k_col = column_index(t, "k");
      for (const char* col : {"delta_s_smoothed", "delta_p_smoothed"}) {
        const int y_col = column_index(t, col);
        if (k_col < 0 || y_col < 0) continue;
        SvgSeries series;
        series.label = label + ":" + col;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          series.xs.push_back(cell_double(t, r, k_col));
          series.ys.push_back(cell_double(t, r, y_col));
        }
        gain_series.push_back(std::move(series));
      }
    }

    const std::string corr_path = dir + "/corr.csv";
    if (fs::exists(corr_path)) {
      const CsvTable t = read_csv(corr_path);
      const int t_col = column_index(t, "t");
      const int u_col = column_index(t, "uncertainty");
      const int i_col = column_index(t, "i");
      const int j_col = column_index(t, "j");
      if (t_col >= 0 && u_col >= 0 && i_col >= 0 && j_col >= 0) {
        SvgSeries series;
        series.label = label + ":u(0,0)";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
          if (cell_double(t, r, i_col) != 0.0 || cell_double(t, r, j_col) != 0.0) continue;
          series.xs.push_back(cell_double(t, r, t_col));
          series.ys.push_back(cell_double(t, r, u_col));
        }
        if (!series.xs.empty()) uncertainty_series_plot.push_back(std::move(series));
      }
    }
  }

  sink.write("report_summary.csv", summary_csv(rows, "run"));
  if (!reward_series.empty()) {
    sink.write("reward_curve.svg",
               line_chart_svg("mean reward per round", "round", "mean reward", reward_series));
  }
  if (!gain_series.empty()) {
    sink.write("gains.svg", line_chart_svg("smoothed per-step gains", "generation step k", "gain",
                                           gain_series));
  }
  if (!uncertainty_series_plot.empty()) {
    sink.write("uncertainty.svg",
               line_chart_svg("pixel-trajectory uncertainty (1 - corr)", "forward time t",
                              "uncertainty", uncertainty_series_plot));
  }
  sink.finish();

  std::cout << "report: runs=" << rows.size() << " reward_series=" << reward_series.size()
            << " gain_series=" << gain_series.size()
            << " uncertainty_series=" << uncertainty_series_plot.size() << "\n";
  std::cout << "wrote " << sink.path("report_summary.csv") << "\n";
}

}  // namespace adascope
