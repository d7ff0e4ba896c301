#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adascope/data.hpp"
#include "adascope/errors.hpp"
#include "adascope/rewards.hpp"
#include "adascope/rng.hpp"

using namespace adascope;

namespace {

Eigen::Vector2d v2(double a, double b) { return Eigen::Vector2d(a, b); }

Eigen::Matrix2d rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST_CASE("proximity reward peaks at the target and halves at the half-width radius") {
  const Eigen::Vector2d tgt = v2(1.0, -2.0);
  CHECK(target_proximity_reward(tgt, tgt, 0.6) == 1.0);

  const double r_half = 0.6 * std::sqrt(2.0 * std::log(2.0));
  const Eigen::Vector2d x = tgt + r_half * v2(1.0, 0.0);
  CHECK(target_proximity_reward(x, tgt, 0.6) == doctest::Approx(0.5).epsilon(1e-12));

  double prev = 2.0;
  for (double d = 0.0; d < 3.0; d += 0.1) {
    const double r = target_proximity_reward(tgt + d * v2(0.0, 1.0), tgt, 0.6);
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(target_proximity_reward(tgt, tgt, 0.0), ConfigError);
}

TEST_CASE("proximity target pushes the mode outward by the offset") {
  auto data = ToyDataModel::default_task();  // modes on a radius-2 circle
  for (int z = 0; z < data.num_prompts(); ++z) {
    const auto tgt = proximity_target(data, z, 0.8);
    CHECK(tgt.norm() == doctest::Approx(2.8).epsilon(1e-12));
    // offset is radial: target is collinear with the mode
    const auto mu = data.mean(z);
    CHECK(std::abs(tgt[0] * mu[1] - tgt[1] * mu[0]) < 1e-12);
  }
  // mode at the origin falls back to the first axis
  ToyDataModel origin = ToyDataModel::circle(2, 1, 0.0, 0.3);
  const auto tgt = proximity_target(origin, 0, 0.8);
  CHECK(tgt[0] == doctest::Approx(0.8));
  CHECK(tgt[1] == doctest::Approx(0.0));
}

TEST_CASE("norm reward hand values and sign flip") {
  CHECK(norm_reward(v2(0.0, 0.0), 1) == 0.0);
  CHECK(norm_reward(v2(3.0, 4.0), 1) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(norm_reward(v2(3.0, 4.0), -1) == -norm_reward(v2(3.0, 4.0), 1));
  CHECK_THROWS_AS(norm_reward(v2(1.0, 0.0), 2), ConfigError);
}

TEST_CASE("alignment score hand values") {
  const Eigen::Vector2d mu = v2(2.0, 0.0);
  CHECK(alignment_score(mu, mu, 0.5) == 1.0);
  // midpoint between two anchors at distance 1: |x-mu| = 0.5
  const double mid = alignment_score(v2(1.5, 0.0), mu, 0.5);
  CHECK(mid == doctest::Approx(std::exp(-0.25 / (2.0 * 0.25))).epsilon(1e-12));
  CHECK(alignment_score(v2(100.0, 100.0), mu, 0.5) < 1e-300);
  CHECK_THROWS_AS(alignment_score(mu, mu, -1.0), ConfigError);
}

TEST_CASE("isometry invariance of proximity and alignment") {
  Rng rng(5);
  const auto rot = rotation(0.7);
  const Eigen::Vector2d shift = v2(0.3, -1.1);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector2d x = v2(rng.normal(), rng.normal());
    const Eigen::Vector2d a = v2(rng.normal(), rng.normal());
    const Eigen::Vector2d xm = rot * x + shift;
    const Eigen::Vector2d am = rot * a + shift;
    CHECK(target_proximity_reward(x, a, 0.6) ==
          doctest::Approx(target_proximity_reward(xm, am, 0.6)).epsilon(1e-12));
    CHECK(alignment_score(x, a, 0.5) ==
          doctest::Approx(alignment_score(xm, am, 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("diversity metric fixtures and invariances") {
  std::vector<Eigen::VectorXd> same{v2(1.0, 1.0), v2(1.0, 1.0), v2(1.0, 1.0)};
  CHECK(diversity_metric(same) == 0.0);

  std::vector<Eigen::VectorXd> two{v2(0.0, 0.0), v2(3.0, 4.0)};
  CHECK(diversity_metric(two) == doctest::Approx(5.0).epsilon(1e-15));

  std::vector<Eigen::VectorXd> tri{v2(0.0, 0.0), v2(1.0, 0.0), v2(0.0, 1.0)};
  const double expect = (1.0 + 1.0 + std::numbers::sqrt2) / 3.0;
  CHECK(diversity_metric(tri) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(diversity_metric(tri) == doctest::Approx(1.13807119).epsilon(1e-8));  // frozen

  // translation invariance and linear scaling
  std::vector<Eigen::VectorXd> moved, scaled;
  for (const auto& p : tri) moved.push_back(p + v2(5.0, -2.0));
  for (const auto& p : tri) scaled.push_back(3.0 * p);
  CHECK(diversity_metric(moved) == doctest::Approx(diversity_metric(tri)).epsilon(1e-12));
  CHECK(diversity_metric(scaled) == doctest::Approx(3.0 * diversity_metric(tri)).epsilon(1e-12));

  std::vector<Eigen::VectorXd> one{v2(0.0, 0.0)};
  CHECK_THROWS_AS(diversity_metric(one), ConfigError);
}

TEST_CASE("composite reward matches the hand-normalized fixture") {
  // components read the two coordinates; inputs produce raw pairs
  // (1,2), (3,6), (5,4) in evaluation order
  RewardFn a = [](const Eigen::VectorXd& x, int) { return x[0]; };
  RewardFn b = [](const Eigen::VectorXd& x, int) { return x[1]; };
  CompositeReward comp({a, b}, {0.5, 0.5});

  // update-then-standardize: first call sees std 0 and returns 0 via the guard
  CHECK(comp(v2(1.0, 2.0), 0) == doctest::Approx(0.0).epsilon(1e-12));
  // A: obs {1,3} mean 2 std 1 -> 1; B: obs {2,6} mean 4 std 2 -> 1
  CHECK(comp(v2(3.0, 6.0), 0) == doctest::Approx(1.0).epsilon(1e-7));
  // A: obs {1,3,5} mean 3 std sqrt(8/3) -> 1.224745; B: obs {2,6,4} -> 0
  CHECK(comp(v2(5.0, 4.0), 0) == doctest::Approx(0.61237243).epsilon(1e-7));
}

TEST_CASE("composite reward degenerate cases") {
  RewardFn c = [](const Eigen::VectorXd& x, int) { return x[0]; };
  RewardFn negc = [](const Eigen::VectorXd& x, int) { return -x[0]; };
  // equal weights of c and -c cancel for every input
  CompositeReward cancel({c, negc}, {0.5, 0.5});
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    CHECK(cancel(v2(rng.normal(), rng.normal()), 0) == doctest::Approx(0.0).epsilon(1e-9));
  }
  // single component, weight 1: standardized component
  CompositeReward single({c}, {1.0});
  CHECK(single(v2(1.0, 0.0), 0) == doctest::Approx(0.0));
  CHECK(single(v2(3.0, 0.0), 0) == doctest::Approx(1.0).epsilon(1e-7));

  CHECK_THROWS_AS(CompositeReward({}, {}), ConfigError);
  CHECK_THROWS_AS(CompositeReward({c}, {0.5}), ConfigError);
  CHECK_THROWS_AS(CompositeReward({c, negc}, {1.5, -0.5}), ConfigError);
}

TEST_CASE("reward catalog resolves documented names") {
  auto data = ToyDataModel::default_task();
  auto prox = make_reward("proximity", data);
  const auto tgt = proximity_target(data, 1, 0.8);
  CHECK(prox(tgt, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prox(data.mean(1), 1) ==
        doctest::Approx(std::exp(-0.64 / (2.0 * 0.36))).epsilon(1e-12));

  auto comp = make_reward("compress", data);
  CHECK(comp(v2(3.0, 4.0), 0) == -5.0);
  auto inc = make_reward("incompress", data);
  CHECK(inc(v2(3.0, 4.0), 0) == 5.0);

  auto mix = make_reward("composite", data);
  CHECK(std::isfinite(mix(v2(1.0, 1.0), 0)));
  CHECK(std::isfinite(mix(v2(0.5, -1.0), 2)));

  CHECK_THROWS_AS(make_reward("aesthetic", data), ConfigError);
}

TEST_CASE("alignment catalog anchors at the pretraining modes") {
  auto data = ToyDataModel::default_task();
  auto f = make_alignment(data, 0.5);
  for (int z = 0; z < data.num_prompts(); ++z) {
    CHECK(f(data.mean(z), z) == 1.0);
    CHECK(f(data.mean(z) + v2(0.5, 0.0), z) < 1.0);
  }
  CHECK_THROWS_AS(make_alignment(data, 0.0), ConfigError);
}

TEST_CASE("rewards are deterministic and finite") {
  auto data = ToyDataModel::default_task();
  Rng rng(17);
  auto prox = make_reward("proximity", data);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector2d x = v2(5.0 * rng.normal(), 5.0 * rng.normal());
    const int z = rng.uniform_int(0, 3);
    const double r1 = prox(x, z);
    const double r2 = prox(x, z);
    CHECK(r1 == r2);
    CHECK(std::isfinite(r1));
  }
}
