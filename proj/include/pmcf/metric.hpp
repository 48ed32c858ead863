#ifndef PMCF_METRIC_HPP
#define PMCF_METRIC_HPP

#include <cmath>
#include <string>

#include "pmcf/types.hpp"

namespace pmcf {

/// Below this value of det G an element is treated as collapsed.
inline constexpr double kDetFloor = 1e-12;

/// Pointwise metric data of an embedding x over the reference surface.
///
/// grad_x has rows D_i x; G_ij = D_i x . D_j x + mu_i mu_j.
struct MetricState {
  Mat3 grad_x;
  Vec3 mu;
  Mat3 G;
  Mat3 G_inv;
  double det_G = 0.0;
  double sqrt_det_G = 0.0;
  Vec3 nu;
};

/// Wedge-product normal (1 / sqrt det G) sum_j mu_j D_{j+1} x ^ D_{j+2} x.
inline Vec3 wedge_normal(const Mat3& grad_x, const Vec3& mu, double sqrt_det_G) {
  Vec3 n = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    const Vec3 a = grad_x.row((j + 1) % 3).transpose();
    const Vec3 b = grad_x.row((j + 2) % 3).transpose();
    n += mu[j] * a.cross(b);
  }
  return n / sqrt_det_G;
}

inline MetricState metric_tensor(const Mat3& grad_x, const Vec3& mu) {
  MetricState s;
  s.grad_x = grad_x;
  s.mu = mu;
  s.G = grad_x * grad_x.transpose() + outer(mu, mu);
  s.det_G = s.G.determinant();
  if (!(s.det_G > kDetFloor)) {
    throw Error(ErrorKind::DegenerateMetric, "det G = " + std::to_string(s.det_G) + " below floor");
  }
  s.sqrt_det_G = std::sqrt(s.det_G);
  s.G_inv = s.G.inverse();
  s.nu = wedge_normal(grad_x, mu, s.sqrt_det_G);
  return s;
}

inline Vec3 element_normal(const MetricState& s) {
  if (!(s.det_G > kDetFloor)) throw Error(ErrorKind::DegenerateMetric, "det G below floor");
  return s.nu;
}

/// G^{ik} G^{lj} D_j x ^ D_k x - (-1)^{i+l} mu_{sigma(i,l)} nu / sqrt det G,
/// for 1 <= i < l <= 3 (one-based, as in the index pairs (1,2), (1,3), (2,3)).
inline Vec3 wedge_identity_residual(const MetricState& s, int i, int l) {
  if (!(1 <= i && i < l && l <= 3)) throw Error(ErrorKind::InvalidParameter, "need 1 <= i < l <= 3");
  const int a = i - 1;
  const int b = l - 1;
  Vec3 lhs = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 dj = s.grad_x.row(j).transpose();
      const Vec3 dk = s.grad_x.row(k).transpose();
      lhs += s.G_inv(a, k) * s.G_inv(b, j) * dj.cross(dk);
    }
  }
  const int sigma = 3 - a - b;  // (0,1)->2, (0,2)->1, (1,2)->0
  const double sign = ((i + l) % 2 == 0) ? 1.0 : -1.0;
  return lhs - sign * s.mu[sigma] / s.sqrt_det_G * s.nu;
}

/// A(w, rho) = (alpha + 1) I + (rho - alpha - 1) w w^T.
struct MobilityMatrix {
  Mat3 matrix;
  double rho;
  double alpha;
};

inline Mat3 mobility_matrix(const Vec3& w, double rho, double alpha) {
  return (alpha + 1.0) * Mat3::Identity() + (rho - alpha - 1.0) * outer(w, w);
}

inline MobilityMatrix mobility(const Vec3& w, double rho, double alpha) {
  if (std::abs(w.norm() - 1.0) > 1e-8) throw Error(ErrorKind::InvalidParameter, "w must be a unit vector");
  if (!(rho > 0.0) || !(alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "rho and alpha must be positive");
  return {mobility_matrix(w, rho, alpha), rho, alpha};
}

}  // namespace pmcf

#endif  // PMCF_METRIC_HPP
