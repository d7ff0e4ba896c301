#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "adascope/data.hpp"
#include "adascope/diffusion.hpp"
#include "adascope/errors.hpp"
#include "adascope/gauss.hpp"
#include "adascope/model.hpp"
#include "adascope/rng.hpp"
#include "adascope/schedule.hpp"

using namespace adascope;

TEST_CASE("forward sample at t=0 returns the clean point with zero noise") {
  auto s = default_schedule();
  Rng rng(1);
  Eigen::VectorXd x0(2);
  x0 << 1.5, -0.25;
  auto fs = forward_sample(s, x0, 0, rng);
  CHECK(fs.x_t == x0);
  CHECK(fs.eps == Eigen::VectorXd::Zero(2));
}

TEST_CASE("forward sample is deterministic per seed") {
  auto s = default_schedule();
  Eigen::VectorXd x0(2);
  x0 << 0.3, 0.9;
  Rng a(99), b(99), c(100);
  auto fa = forward_sample(s, x0, 30, a);
  auto fb = forward_sample(s, x0, 30, b);
  auto fc = forward_sample(s, x0, 30, c);
  CHECK(fa.x_t == fb.x_t);
  CHECK(fa.eps == fb.eps);
  CHECK(fa.x_t != fc.x_t);
}

TEST_CASE("forward sample empirical mean matches sqrt(ab) x0") {
  auto s = default_schedule();
  Eigen::VectorXd x0(2);
  x0 << 2.0, -1.0;
  const int t = 20, n = 100000;
  Rng rng(7);
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) acc += forward_sample(s, x0, t, rng).x_t;
  acc /= n;
  const Eigen::Vector2d expect = std::sqrt(s.alpha_bar(t)) * x0;
  const double se = std::sqrt(1.0 - s.alpha_bar(t)) / std::sqrt(double(n));
  CHECK(std::abs(acc[0] - expect[0]) < 4 * se);
  CHECK(std::abs(acc[1] - expect[1]) < 4 * se);
}

TEST_CASE("pseudo x0 scalar hand value") {
  auto s = make_linear_schedule(2, 0.75, 0.75);  // alpha_bar_1 = 0.25
  Eigen::VectorXd xt(1), eps(1);
  xt << 1.0;
  eps << 0.5;
  auto r = pseudo_x0(s, xt, eps, 1);
  CHECK(r[0] == doctest::Approx((1.0 - std::sqrt(0.75) * 0.5) / 0.5).epsilon(1e-12));
  CHECK(r[0] == doctest::Approx(1.1339746).epsilon(1e-7));  // frozen
}

TEST_CASE("pseudo x0 inverts forward sampling to 1e-6") {
  auto s = default_schedule();
  Rng rng(123);
  double worst = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    Eigen::VectorXd x0(2);
    x0 << 4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0;
    const int t = rng.uniform_int(1, s.T);
    auto fs = forward_sample(s, x0, t, rng);
    auto rec = pseudo_x0(s, fs.x_t, fs.eps, t);
    worst = std::max(worst, (rec - x0).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("pseudo x0 guards its domain") {
  auto s = default_schedule();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(pseudo_x0(s, v, v, 0), std::out_of_range);
  CHECK_THROWS_AS(pseudo_x0(s, v, v, 51), std::out_of_range);
  // beta = 0.9 everywhere: alpha_bar_t = 0.1^t drops below 1e-12 at t = 13
  auto tiny = make_linear_schedule(50, 0.9, 0.9);
  CHECK_NOTHROW(pseudo_x0(tiny, v, v, 11));
  CHECK_THROWS_AS(pseudo_x0(tiny, v, v, 13), NumericError);
}

TEST_CASE("gaussian log prob formula and deterministic convention") {
  Eigen::VectorXd a(2), m(2);
  a << 1.0, 2.0;
  m << 0.5, 2.5;
  const double var = 0.8;
  const double expect = 2.0 * (-0.5 * std::log(2.0 * std::numbers::pi * var)) -
                        (0.25 + 0.25) / (2.0 * var);
  CHECK(gaussian_log_prob(a, m, var) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(gaussian_log_prob(a, m, 0.0) == 0.0);
}

TEST_CASE("trajectory record structure and recomputable log probabilities") {
  auto s = default_schedule();
  DenoiserModel model({}, 5);
  EpsPredictor pred = [&](const Eigen::VectorXd& x, int t, int z) {
    return model.predict(x, t, z);
  };
  Rng rng(11);
  auto tr = sample_trajectory(pred, s, 2, 3, rng);
  CHECK(tr.states.size() == 51);
  CHECK(tr.means.size() == 50);
  CHECK(tr.variances.size() == 50);
  CHECK(tr.log_probs.size() == 50);
  CHECK(tr.x0_hats.size() == 50);
  // final generation step is the deterministic mean
  CHECK(tr.variances[0] == 0.0);
  CHECK(tr.states[0] == tr.means[0]);
  CHECK(tr.log_probs[0] == 0.0);
  for (int t = 1; t <= 50; ++t) {
    const double lp = gaussian_log_prob(tr.states[t - 1], tr.means[t - 1], tr.variances[t - 1]);
    CHECK(std::abs(lp - tr.log_probs[t - 1]) <= 1e-9);
    // stored pseudo-x0 is consistent with the stored mean: both derive from
    // the same prediction, so recomputing eps from x0_hat reproduces the mean
    const double ab = s.alpha_bar(t);
    const Eigen::VectorXd eps_rec =
        (tr.states[t] - std::sqrt(ab) * tr.x0_hats[t - 1]) / std::sqrt(1.0 - ab);
    const Eigen::VectorXd mean_rec =
        (tr.states[t] - s.beta(t) / std::sqrt(1.0 - ab) * eps_rec) / std::sqrt(s.alpha(t));
    CHECK((mean_rec - tr.means[t - 1]).cwiseAbs().maxCoeff() < 1e-9);
  }
  // determinism
  Rng rng2(11);
  auto tr2 = sample_trajectory(pred, s, 2, 3, rng2);
  CHECK(tr2.states[0] == tr.states[0]);
  CHECK(tr2.log_probs == tr.log_probs);
}

TEST_CASE("model backward matches central finite differences") {
  DenoiserModel::Dims dims;
  dims.x_dim = 2;
  dims.num_prompts = 2;
  dims.hidden = 8;
  dims.time_dim = 4;
  dims.prompt_dim = 3;
  DenoiserModel model(dims, 17);
  Rng rng(3);

  // frozen batch
  struct Sample {
    Eigen::VectorXd x, target;
    int t, z;
  };
  std::vector<Sample> batch;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd x(2), tgt(2);
    x << rng.normal(), rng.normal();
    tgt << rng.normal(), rng.normal();
    batch.push_back({x, tgt, rng.uniform_int(1, 50), rng.uniform_int(0, 1)});
  }
  auto loss_fn = [&]() {
    double l = 0.0;
    for (const auto& smp : batch) l += (model.predict(smp.x, smp.t, smp.z) - smp.target).squaredNorm();
    return l;
  };
  std::vector<double> grad(model.param_count(), 0.0);
  for (const auto& smp : batch) {
    auto cache = model.forward(smp.x, smp.t, smp.z);
    model.backward(cache, 2.0 * (cache.out - smp.target), grad);
  }
  const double h = 1e-5;
  int checked = 0;
  for (int i = 0; i < model.param_count(); ++i) {
    const double orig = model.params()[i];
    model.params()[i] = orig + h;
    const double lp = loss_fn();
    model.params()[i] = orig - h;
    const double lm = loss_fn();
    model.params()[i] = orig;
    const double fd = (lp - lm) / (2.0 * h);
    const double rel = std::abs(fd - grad[i]) / std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
    CHECK(rel <= 1e-6);
    ++checked;
  }
  CHECK(checked == model.param_count());
}

TEST_CASE("reverse sampling with the exact predictor tracks forward marginals") {
  auto s = default_schedule();
  DataCovariance cov(0.09 * Eigen::MatrixXd::Identity(2, 2));
  EpsPredictor pred = [&](const Eigen::VectorXd& x, int t, int) {
    return optimal_epsilon_gaussian(s, cov, x, t);
  };
  const int n = 2000;
  Rng rng(29);
  Eigen::Vector2d mean_t20 = Eigen::Vector2d::Zero();
  Eigen::Vector2d mean_x0 = Eigen::Vector2d::Zero();
  double var_x0 = 0.0;
  for (int i = 0; i < n; ++i) {
    auto tr = sample_trajectory(pred, s, 2, 0, rng);
    mean_t20 += tr.states[20];
    mean_x0 += tr.x0();
    var_x0 += tr.x0().squaredNorm();
  }
  mean_t20 /= n;
  mean_x0 /= n;
  var_x0 = var_x0 / n / 2.0;  // per-component second moment, mean is ~0
  CHECK(mean_t20.norm() < 0.08);
  CHECK(mean_x0.norm() < 0.05);
  CHECK(var_x0 == doctest::Approx(0.09).epsilon(0.35));
}

TEST_CASE("pretrain with zero steps is a no-op") {
  DenoiserModel model({}, 2);
  const auto before = model.params();
  auto res = pretrain(model, ToyDataModel::default_task(), default_schedule(), {.steps = 0}, 1);
  CHECK(model.params() == before);
  CHECK(res.loss_curve.empty());
  CHECK_FALSE(res.success);
}

TEST_CASE("pretrain is bit-reproducible per seed") {
  auto run = [](std::uint64_t seed) {
    DenoiserModel model({}, 2);
    PretrainConfig cfg;
    cfg.steps = 60;
    cfg.batch = 16;
    pretrain(model, ToyDataModel::default_task(), default_schedule(), cfg, seed);
    return model.params();
  };
  auto p1 = run(4);
  auto p2 = run(4);
  auto p3 = run(5);
  CHECK(p1 == p2);
  CHECK(p1 != p3);
}

TEST_CASE("pretrain reaches below half of the initial loss on the default task") {
  DenoiserModel model({}, 2);
  PretrainConfig cfg;
  cfg.steps = 800;
  cfg.batch = 32;
  auto res = pretrain(model, ToyDataModel::default_task(), default_schedule(), cfg, 1);
  REQUIRE(res.loss_curve.size() == 800);
  // compare against the average of the first few steps to damp batch noise
  double head = 0.0;
  for (int i = 0; i < 10; ++i) head += res.loss_curve[i] / 10.0;
  CHECK(res.smoothed_final < 0.5 * head);
  CHECK(std::isfinite(res.smoothed_final));
}
