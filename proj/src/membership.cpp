#include "dsscn/membership.hpp"

#include <cmath>
#include <stdexcept>

namespace dsscn {

Eigen::VectorXd chebyshev_expand(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd xe(2 * n + 1);
  xe[0] = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t1 = x[j];
    xe[2 * j + 1] = t1;
    xe[2 * j + 2] = 2.0 * t1 * t1 - 1.0;
  }
  return xe;
}

Eigen::VectorXd project_radii(const Eigen::MatrixXd& inv_cov, double radius) {
  Eigen::VectorXd sigma(inv_cov.rows());
  for (Eigen::Index j = 0; j < inv_cov.rows(); ++j) {
    const double d = inv_cov(j, j);
    if (!(d > 0.0)) throw std::domain_error("inverse covariance has a non-positive diagonal");
    sigma[j] = radius * std::sqrt(d);
  }
  return sigma;
}

double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& c,
                   const Eigen::MatrixXd& inv_cov) {
  const Eigen::VectorXd d = x - c;
  return std::sqrt(std::max(0.0, d.dot(inv_cov * d)));
}

double projected_gaussian(double c, double scale, double x) {
  const double z = scale * (x - c);
  return std::exp(-z * z);
}

IntervalFiring node_activation(const NodeGeometry& node, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::Index n = x.size();
  if (node.c_lower.size() != n || node.c_upper.size() != n || node.inv_cov.rows() != n) {
    throw std::invalid_argument("node_activation: dimension mismatch");
  }
  const double radius =
      0.5 * (mahalanobis(x, node.c_lower, node.inv_cov) + mahalanobis(x, node.c_upper, node.inv_cov));
  const Eigen::VectorXd sigma = project_radii(node.inv_cov, radius);

  // Sum exponents and exponentiate once; same value as the membership product.
  double upper_exp = 0.0;
  double lower_exp = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = node.c_lower[j];
    const double hi = node.c_upper[j];
    const double xj = x[j];
    const double s = sigma[j];
    auto sq = [s, xj](double c) {
      const double z = s * (xj - c);
      return z * z;
    };
    if (xj < lo) {
      upper_exp += sq(lo);
    } else if (xj > hi) {
      upper_exp += sq(hi);
    }
    lower_exp += (xj <= 0.5 * (lo + hi)) ? sq(hi) : sq(lo);
  }
  IntervalFiring f;
  f.upper = std::exp(-upper_exp);
  f.lower = std::min(f.upper, std::exp(-lower_exp));
  return f;
}

}  // namespace dsscn
