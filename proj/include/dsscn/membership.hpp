#pragma once

#include <Eigen/Dense>

namespace dsscn {

/// Interval type-2 multivariate Gaussian antecedent: an interval centroid
/// [c_lower, c_upper] and an inverse covariance shared by both bounds.
struct NodeGeometry {
  Eigen::VectorXd c_lower;
  Eigen::VectorXd c_upper;
  Eigen::MatrixXd inv_cov;

  Eigen::VectorXd center() const { return 0.5 * (c_lower + c_upper); }
};

/// Lower and upper firing strength, 0 <= lower <= upper <= 1.
struct IntervalFiring {
  double lower = 0.0;
  double upper = 0.0;
};

/// Second-order Chebyshev lift [1, T1(x1), T2(x1), ..., T1(xn), T2(xn)].
Eigen::VectorXd chebyshev_expand(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Per-dimension scale of the projected Gaussian: radius * sqrt(inv_cov(j,j)).
Eigen::VectorXd project_radii(const Eigen::MatrixXd& inv_cov, double radius);

/// Mahalanobis distance sqrt((x - c)^T inv_cov (x - c)).
double mahalanobis(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& c,
                   const Eigen::MatrixXd& inv_cov);

/// One-dimensional Gaussian with uncertain mean reduced to a single centre:
/// exp(-(scale * (x - c))^2). A zero scale only arises when x sits on the
/// centre, where the membership is 1.
double projected_gaussian(double c, double scale, double x);

/// Interval firing of a node. The multivariate Gaussian is projected onto
/// each axis with scale project_radii(inv_cov, r) where r is the mean
/// Mahalanobis distance of x to the two centroids. Upper membership is 1
/// inside [c_lower, c_upper] and the Gaussian of the nearer bound outside;
/// lower membership uses the farther bound (split at the midpoint).
/// Memberships combine with the product t-norm.
IntervalFiring node_activation(const NodeGeometry& node, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Crisp firing (1 - q) * upper + q * lower.
inline double type_reduce(const IntervalFiring& f, double q) { return (1.0 - q) * f.upper + q * f.lower; }

}  // namespace dsscn
