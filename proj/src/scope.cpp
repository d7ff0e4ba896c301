#include "adascope/scope.hpp"

#include <cmath>
#include <stdexcept>

#include "adascope/errors.hpp"
#include "adascope/rng.hpp"

namespace adascope {

std::vector<double> ema_smooth(const std::vector<double>& values, double ema) {
  if (ema <= 0.0 || ema > 1.0) throw ConfigError("ema_smooth: coefficient must be in (0, 1]");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = (i == 0) ? values[0] : ema * values[i] + (1.0 - ema) * out[i - 1];
  }
  return out;
}

namespace {

template <typename Fn>
GainSeries gain_series(const std::vector<Trajectory>& trajs, const Fn& score, double ema,
                       GainKind kind) {
  if (trajs.empty()) throw ConfigError("gain series: empty probe batch");
  const int T = trajs[0].T;
  if (T < 2) throw std::invalid_argument("gain series: need T >= 2");
  GainSeries gs;
  gs.kind = kind;
  gs.values.assign(static_cast<std::size_t>(T - 1), 0.0);
  const double inv_batch = 1.0 / static_cast<double>(trajs.size());
  for (const auto& tr : trajs) {
    if (tr.T != T || tr.x0_hats.size() != static_cast<std::size_t>(T)) {
      throw std::invalid_argument("gain series: trajectories disagree on T");
    }
    // MDP step k uses the clean estimate stored at trajectory index T-1-k
    double prev = score(tr.x0_hats[static_cast<std::size_t>(T - 1)], tr.z);
    for (int k = 1; k < T; ++k) {
      const double cur = score(tr.x0_hats[static_cast<std::size_t>(T - 1 - k)], tr.z);
      gs.values[static_cast<std::size_t>(k - 1)] += (cur - prev) * inv_batch;
      prev = cur;
    }
  }
  for (double v : gs.values) {
    if (!std::isfinite(v)) throw NumericError("gain series: non-finite entry");
  }
  gs.smoothed = ema_smooth(gs.values, ema);
  return gs;
}

void check_detect_inputs(const GainSeries& gs, const DetectParams& params) {
  if (params.window < 1) throw ConfigError("detect: window must be >= 1");
  if (params.rho < 0.0) throw ConfigError("detect: rho must be nonnegative");
  if (gs.smoothed.size() != gs.values.size()) {
    throw std::invalid_argument("detect: smoothed/values length mismatch");
  }
  if (static_cast<int>(gs.smoothed.size()) < params.window + 1) {
    throw std::invalid_argument("detect: series shorter than window + 1");
  }
}

bool all_zero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

DetectDiagnostics make_diag(const GainSeries& gs, double rho) {
  DetectDiagnostics d;
  d.first_diffs.resize(gs.smoothed.size() - 1);
  double max_abs = 0.0;
  for (std::size_t j = 0; j + 1 < gs.smoothed.size(); ++j) {
    d.first_diffs[j] = gs.smoothed[j + 1] - gs.smoothed[j];
    if (std::abs(d.first_diffs[j]) > max_abs) {
      max_abs = std::abs(d.first_diffs[j]);
      d.scan_from = static_cast<int>(j);
    }
  }
  d.epsilon = rho * max_abs;
  return d;
}

// first index k in [k_min, len(D)-w] whose window of w diffs stays within
// epsilon; -1 when none qualifies
int scan(const std::vector<double>& diffs, double epsilon, int w, int k_min) {
  const int last = static_cast<int>(diffs.size()) - w;
  for (int k = std::max(k_min, 0); k <= last; ++k) {
    bool ok = true;
    for (int j = k; j < k + w; ++j) {
      if (std::abs(diffs[static_cast<std::size_t>(j)]) > epsilon) {
        ok = false;
        break;
      }
    }
    if (ok) return k;
  }
  return -1;
}

}  // namespace

GainSeries structural_gain_series(const std::vector<Trajectory>& trajs, const AlignmentFn& f,
                                  double ema) {
  return gain_series(trajs, f, ema, GainKind::Structural);
}

GainSeries preference_gain_series(const std::vector<Trajectory>& trajs, const RewardFn& g,
                                  double ema) {
  return gain_series(trajs, g, ema, GainKind::Preference);
}

std::pair<int, DetectDiagnostics> detect_start(const GainSeries& gs, const DetectParams& params) {
  check_detect_inputs(gs, params);
  DetectDiagnostics diag = make_diag(gs, params.rho);
  if (all_zero(gs.values)) {
    diag.trivial = true;
    return {0, diag};
  }
  const int k = scan(diag.first_diffs, diag.epsilon, params.window, diag.scan_from);
  if (k < 0) {
    diag.fallback = true;
    return {0, diag};
  }
  return {k, diag};
}

std::pair<int, DetectDiagnostics> detect_end(const GainSeries& gp, int t_start,
                                             const DetectParams& params) {
  check_detect_inputs(gp, params);
  if (t_start < 0) throw std::invalid_argument("detect_end: negative t_start");
  const int T = static_cast<int>(gp.smoothed.size()) + 1;
  const int earliest = std::min(t_start + params.m_min, T - 1);
  DetectDiagnostics diag = make_diag(gp, params.rho);
  if (all_zero(gp.values)) {
    diag.trivial = true;
    return {earliest, diag};
  }
  diag.scan_from = std::max(diag.scan_from, earliest);
  const int k = scan(diag.first_diffs, diag.epsilon, params.window, diag.scan_from);
  if (k < 0) {
    diag.fallback = true;
    return {T - 1, diag};
  }
  return {k, diag};
}

ProbeResult probe_scope(const DenoiserModel& model, const ToyDataModel& data,
                        const NoiseSchedule& s, int z, const AlignmentFn& f, const RewardFn& g,
                        const DetectParams& params, std::uint64_t seed) {
  if (params.probe_batch < 1) throw ConfigError("select_scope: probe_batch must be >= 1");
  if (z < 0 || z >= data.num_prompts()) throw std::out_of_range("select_scope: bad prompt id");
  EpsPredictor pred = [&model](const Eigen::VectorXd& x, int t, int zz) {
    return model.predict(x, t, zz);
  };
  const std::uint64_t probe_seed = derive_seed(seed, "probe", static_cast<std::uint64_t>(z));
  std::vector<Trajectory> trajs;
  trajs.reserve(static_cast<std::size_t>(params.probe_batch));
  for (int i = 0; i < params.probe_batch; ++i) {
    Rng rng(derive_seed(probe_seed, "rollout", static_cast<std::uint64_t>(i)));
    trajs.push_back(sample_trajectory(pred, s, data.dim, z, rng));
  }
  ProbeResult out;
  out.structural = structural_gain_series(trajs, f, params.ema);
  out.preference = preference_gain_series(trajs, g, params.ema);
  out.decision.z = z;
  auto [start, sd] = detect_start(out.structural, params);
  out.decision.t_start = start;
  out.decision.start_diag = std::move(sd);
  auto [end, ed] = detect_end(out.preference, out.decision.t_start, params);
  out.decision.t_end = end;
  out.decision.end_diag = std::move(ed);
  if (out.decision.t_start < 0 || out.decision.t_start > out.decision.t_end ||
      out.decision.t_end > s.T - 1) {
    throw NumericError("select_scope: detectors produced an invalid interval");
  }
  return out;
}

ScopeDecision select_scope(const DenoiserModel& model, const ToyDataModel& data,
                           const NoiseSchedule& s, int z, const AlignmentFn& f, const RewardFn& g,
                           const DetectParams& params, std::uint64_t seed) {
  return probe_scope(model, data, s, z, f, g, params, seed).decision;
}

ScopeCache::ScopeCache(int refresh_every) : refresh_every_(refresh_every) {
  if (refresh_every < 1) throw ConfigError("ScopeCache: refresh_every must be >= 1");
}

bool ScopeCache::stale(int z) const {
  auto it = entries_.find(z);
  return it == entries_.end() || it->second.age >= refresh_every_;
}

const ScopeDecision& ScopeCache::get(int z) const {
  auto it = entries_.find(z);
  if (it == entries_.end()) throw std::out_of_range("ScopeCache: no decision for prompt");
  return it->second.decision;
}

void ScopeCache::put(int z, ScopeDecision decision) {
  entries_[z] = Entry{std::move(decision), 0};
}

void ScopeCache::tick() {
  for (auto& [z, entry] : entries_) ++entry.age;
}

}  // namespace adascope
