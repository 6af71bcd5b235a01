#include "oracles.hpp"

#include "dsscn/drift_detector.hpp"
#include "dsscn/escn.hpp"
#include "dsscn/feature_weighting.hpp"
#include "dsscn/membership.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oracle {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) { return covariance(v, v); }

double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a);
  const double mb = mean(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size());
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  return covariance(a, b) / std::sqrt(variance(a) * variance(b));
}

double mici(const std::vector<double>& a, const std::vector<double>& b) {
  const double v1 = variance(a);
  const double v2 = variance(b);
  if (v1 == 0.0 || v2 == 0.0) return 0.0;
  const double rho = pearson(a, b);
  const double rad = (v1 + v2) * (v1 + v2) - 4.0 * v1 * v2 * (1.0 - rho * rho);
  return 0.5 * (v1 + v2 - std::sqrt(std::max(rad, 0.0)));
}

double density(const std::vector<Eigen::VectorXd>& seen, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const auto& p : seen) s += (x - p).squaredNorm();
  return 1.0 / (1.0 + s / static_cast<double>(seen.size()));
}

Eigen::MatrixXd least_squares(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Y) {
  const Eigen::MatrixXd AtA = A.transpose() * A;
  return AtA.ldlt().solve(A.transpose() * Y);
}

double hoeffding(double a, double b, double N, double cut, double alpha) {
  return (b - a) * std::sqrt((N - cut) / (2.0 * cut * (N - cut)) * std::log(1.0 / alpha));
}

std::vector<double> chebyshev(const std::vector<double>& x) {
  std::vector<double> out{1.0};
  for (double v : x) {
    const double t0 = 1.0;
    const double t1 = v;
    const double t2 = 2.0 * v * t1 - t0;
    out.push_back(t1);
    out.push_back(t2);
  }
  return out;
}

double robustness(const std::vector<double>& g, const std::vector<double>& e, double r, std::size_t R) {
  double eg = 0.0, gg = 0.0, ee = 0.0;
  for (std::size_t t = 0; t < g.size(); ++t) {
    eg += e[t] * g[t];
    gg += g[t] * g[t];
    ee += e[t] * e[t];
  }
  const double mu = (1.0 - r) / static_cast<double>(R + 1);
  return eg * eg / gg - (1.0 - r - mu) * ee;
}

CheckResult check_mici(std::size_t pairs, std::size_t length, std::uint64_t seed) {
  CheckResult res{"mici", 0.0, 1e-9, false, ""};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t p = 0; p < pairs; ++p) {
    const double mix = u(rng);
    const double shift = 10.0 * u(rng);
    const double scale = std::exp(2.0 * u(rng));
    std::vector<double> a(length), b(length);
    for (std::size_t t = 0; t < length; ++t) {
      a[t] = scale * z(rng) + shift;
      b[t] = mix * a[t] + std::sqrt(1.0 - mix * mix) * scale * z(rng) - shift;
    }
    const double engine = dsscn::mici(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(length)),
                                      Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(length)));
    res.max_dev = std::max(res.max_dev, std::abs(engine - mici(a, b)));
  }
  res.pass = res.max_dev <= res.tolerance;
  res.detail = std::to_string(pairs) + " pairs of length " + std::to_string(length);
  return res;
}

CheckResult check_density(std::size_t samples, std::size_t dim, std::uint64_t seed) {
  CheckResult res{"density", 0.0, 1e-9, false, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  dsscn::DensityStats stats;
  std::vector<Eigen::VectorXd> seen;
  seen.reserve(samples);
  for (std::size_t t = 0; t < samples; ++t) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
    for (auto& v : x) v = u(rng);
    stats.add(x);
    seen.push_back(x);
    Eigen::VectorXd probe(static_cast<Eigen::Index>(dim));
    for (auto& v : probe) v = u(rng);
    res.max_dev = std::max(res.max_dev, std::abs(stats.density(x) - density(seen, x)));
    res.max_dev = std::max(res.max_dev, std::abs(stats.density(probe) - density(seen, probe)));
  }
  res.pass = res.max_dev <= res.tolerance;
  res.detail = std::to_string(samples) + " samples in " + std::to_string(dim) + " dimensions";
  return res;
}

CheckResult check_fwgrls(std::size_t samples, std::size_t dim, std::uint64_t seed) {
  CheckResult res{"fwgrls", 0.0, 1e-3, false, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Index width = static_cast<Eigen::Index>(2 * dim + 1);
  const Eigen::Index m = 2;
  Eigen::MatrixXd truth(width, m);
  for (auto& v : truth.reshaped()) v = u(rng);

  Eigen::MatrixXd A(static_cast<Eigen::Index>(samples), width);
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(samples), m);
  dsscn::HiddenNode node;
  node.W = Eigen::MatrixXd::Zero(width, m);
  node.Omega = 1e5 * Eigen::MatrixXd::Identity(width, width);
  for (std::size_t t = 0; t < samples; ++t) {
    std::vector<double> x(dim);
    for (auto& v : x) v = u(rng);
    const auto xe = chebyshev(x);
    for (Eigen::Index j = 0; j < width; ++j) A(static_cast<Eigen::Index>(t), j) = xe[static_cast<std::size_t>(j)];
    Y.row(static_cast<Eigen::Index>(t)) = A.row(static_cast<Eigen::Index>(t)) * truth;
    dsscn::fwgrls_update(node, A.row(static_cast<Eigen::Index>(t)).transpose(), 1.0,
                         Y.row(static_cast<Eigen::Index>(t)), 0.0);
  }
  const Eigen::MatrixXd batch = least_squares(A, Y);
  res.max_dev = (node.W - batch).norm() / batch.norm();
  res.pass = res.max_dev <= res.tolerance;
  res.detail = std::to_string(samples) + " samples, relative Frobenius distance";
  return res;
}

CheckResult check_hoeffding() {
  CheckResult res{"hoeffding", 0.0, 1e-5, false, ""};
  const double engine = dsscn::hoeffding_bound(0.0, 1.0, 1000.0, 500.0, 0.09);
  const double direct = hoeffding(0.0, 1.0, 1000.0, 500.0, 0.09);
  res.max_dev = std::max(std::abs(engine - 0.04907), std::abs(engine - direct));
  res.pass = res.max_dev <= res.tolerance;
  res.detail = "bound " + std::to_string(engine) + " vs 0.04907";
  return res;
}

CheckResult check_chebyshev(std::size_t samples, std::size_t dim, std::uint64_t seed) {
  CheckResult res{"chebyshev", 0.0, 0.0, false, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> x(dim);
    for (auto& v : x) v = u(rng);
    const Eigen::VectorXd engine =
        dsscn::chebyshev_expand(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(dim)));
    const auto direct = chebyshev(x);
    if (engine.size() != static_cast<Eigen::Index>(direct.size())) {
      res.max_dev = INFINITY;
      break;
    }
    for (std::size_t j = 0; j < direct.size(); ++j) {
      res.max_dev = std::max(res.max_dev, std::abs(engine[static_cast<Eigen::Index>(j)] - direct[j]));
    }
  }
  res.pass = res.max_dev <= res.tolerance;
  res.detail = std::to_string(samples) + " vectors of dimension " + std::to_string(dim);
  return res;
}

}  // namespace oracle
