#include "dsscn/scn_init.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace dsscn;

namespace {

std::vector<double> stdvec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_SUITE("scn") {

TEST_CASE("inverse covariance sampling") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto one = sample_inverse_covariance(1, 2.5, rng);
    CHECK(one(0, 0) > 0.0);
    CHECK(one(0, 0) <= 2.5);
  }
  std::mt19937_64 a(9), b(9);
  CHECK(sample_inverse_covariance(4, 3.0, a) == sample_inverse_covariance(4, 3.0, b));

  std::mt19937_64 r(2);
  for (int i = 0; i < 1000; ++i) {
    const auto m = sample_inverse_covariance(5, 0.1 * (1 + i % 50), r);
    CHECK(m == m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(sample_inverse_covariance(2, 0.0, r), std::invalid_argument);
}

TEST_CASE("robustness on parallel, orthogonal and zero residuals") {
  Eigen::Vector3d g(1, 2, 2);
  const double r = 0.9;
  const std::size_t R = 4;
  const double mu = (1 - r) / (R + 1);
  const Eigen::Vector3d par = 3.0 * g;
  CHECK(robustness(g, par, r, R) == doctest::Approx(par.squaredNorm() * (r + mu)));
  const Eigen::Vector3d orth(2, -1, 0);
  CHECK(robustness(g, orth, r, R) == doctest::Approx(-(1 - r - mu) * orth.squaredNorm()));
  CHECK(robustness(g, Eigen::Vector3d::Zero(), r, R) == 0.0);
  CHECK(robustness(g, orth, r, R) == doctest::Approx(oracle::robustness(stdvec(g), stdvec(orth), r, R)));
  CHECK_THROWS_AS(robustness(Eigen::Vector3d::Zero(), orth, r, R), std::invalid_argument);
}

TEST_CASE("candidate substreams differ per scope and index") {
  CHECK(candidate_seed(1, 0, 0) != candidate_seed(1, 0, 1));
  CHECK(candidate_seed(1, 0, 0) != candidate_seed(1, 1, 0));
  CHECK(candidate_seed(1, 2, 3) == candidate_seed(1, 2, 3));
}

TEST_CASE("zero residuals accept the first scope deterministically") {
  std::mt19937_64 rng(4);
  Eigen::MatrixXd window = Eigen::MatrixXd::Random(40, 2);
  Eigen::MatrixXd residual = Eigen::MatrixXd::Zero(40, 2);
  const Eigen::Vector2d spread(0.05, 0.05);
  ScnParams p;
  const auto [g1, o1] = configure_node(window.row(0).transpose(), spread, window, residual, 3, p, 0.5, 77);
  const auto [g2, o2] = configure_node(window.row(0).transpose(), spread, window, residual, 3, p, 0.5, 77);
  CHECK(o1.satisfied);
  CHECK(o1.scope_used == p.scopes.front());
  CHECK(o1.zeta_total == 0.0);
  CHECK(g1.inv_cov == g2.inv_cov);
  CHECK(g1.c_lower == window.row(0).transpose() - spread);
  CHECK(g1.c_upper == window.row(0).transpose() + spread);
}

TEST_CASE("satisfied outcomes recompute to nonnegative robustness") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  ScnParams p;
  int satisfied = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 60, n = 3, m = 2;
    Eigen::MatrixXd window(N, n), residual(N, m);
    for (auto& v : window.reshaped()) v = u(rng);
    for (auto& v : residual.reshaped()) v = u(rng) - 0.3;
    const Eigen::VectorXd spread = Eigen::VectorXd::Constant(n, 0.02);
    const std::size_t R = static_cast<std::size_t>(trial % 5);
    const auto [geom, out] = configure_node(window.row(trial % N).transpose(), spread, window, residual, R, p, 0.5,
                                            static_cast<std::uint64_t>(trial));
    CHECK(std::find(p.scopes.begin(), p.scopes.end(), out.scope_used) != p.scopes.end());
    if (!out.satisfied) continue;
    ++satisfied;
    CHECK(geom.inv_cov == out.inv_cov);
    const auto g = window_firing(geom, window, 0.5);
    double lowest = INFINITY;
    for (int o = 0; o < m; ++o) {
      lowest = std::min(lowest, oracle::robustness(stdvec(g), stdvec(residual.col(o)), out.r_used, R));
    }
    CHECK(lowest >= -1e-9 * residual.squaredNorm());
  }
  CHECK(satisfied > 0);
}

TEST_CASE("parameter validation") {
  ScnParams p;
  CHECK_NOTHROW(p.validate());
  p.scopes = {1, 0.5};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ScnParams{};
  p.r = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ScnParams{};
  p.t_max = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

}
