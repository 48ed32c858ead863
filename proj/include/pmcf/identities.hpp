#ifndef PMCF_IDENTITIES_HPP
#define PMCF_IDENTITIES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pmcf/metric.hpp"

namespace pmcf {

/// Time-dependent linear embedding x(p, t) = L(t) p of the unit sphere.
/// Sphere, scaled sphere and (rotated) ellipsoids are all of this form, and
/// the image is the quadric |L^{-1} y| = 1, which gives a closed-form
/// mean-curvature vector to test against.
struct LinearFlow {
  std::function<Mat3(double)> L;
  std::function<Mat3(double)> L_dot;
  std::string name;

  Vec3 x(const Vec3& p, double t) const { return L(t) * p; }

  /// Rows D_i x on the unit sphere: P(p) L^T.
  Mat3 grad_x(const Vec3& p, double t) const { return tangential_projection(p) * L(t).transpose(); }
  Mat3 grad_x_t(const Vec3& p, double t) const { return tangential_projection(p) * L_dot(t).transpose(); }

  /// Delta_Gamma id at y = x(p, t), i.e. -H n for the quadric psi(y) = |L^{-1} y|^2 - 1.
  Vec3 mean_curvature_vector(const Vec3& p, double t) const {
    const Mat3 Linv = L(t).inverse();
    const Mat3 hess = 2.0 * Linv.transpose() * Linv;
    const Vec3 grad = hess * x(p, t);
    const double g = grad.norm();
    const double H = (hess.trace() * g * g - grad.dot(hess * grad)) / (g * g * g);
    return -H * grad / g;
  }
};

inline LinearFlow constant_flow(const Mat3& L, std::string name) {
  return {[L](double) { return L; }, [](double) { return Mat3::Zero().eval(); }, std::move(name)};
}

/// x = sqrt(r0^2 - 4t) id, the exact shrinking sphere.
inline LinearFlow shrinking_sphere_flow(double r0) {
  return {[r0](double t) { return (std::sqrt(r0 * r0 - 4.0 * t) * Mat3::Identity()).eval(); },
          [r0](double t) { return (-2.0 / std::sqrt(r0 * r0 - 4.0 * t) * Mat3::Identity()).eval(); },
          "shrinking sphere"};
}

/// x = (L0 + t L1) p.
inline LinearFlow affine_flow(const Mat3& L0, const Mat3& L1, std::string name) {
  return {[L0, L1](double t) { return (L0 + t * L1).eval(); }, [L1](double) { return L1; }, std::move(name)};
}

/// Spherical-coordinate chart of the unit sphere, mu = phi (outward).
struct SphereChart {
  double th1, th2;
  Vec3 point() const { return {std::sin(th1) * std::cos(th2), std::sin(th1) * std::sin(th2), std::cos(th1)}; }
  Vec3 d1() const { return {std::cos(th1) * std::cos(th2), std::cos(th1) * std::sin(th2), -std::sin(th1)}; }
  Vec3 d2() const { return {-std::sin(th1) * std::sin(th2), std::sin(th1) * std::cos(th2), 0.0}; }
};

struct IdentityResiduals {
  double Gij = 0.0;       // G vs chart formula
  double Gijinv = 0.0;    // G^{-1} vs chart formula
  double detG = 0.0;      // det G vs det g / det h (relative)
  double trace = 0.0;     // |G^{-1} grad x : grad x - 2|
  double G_mu = 0.0;      // |G mu - mu|
  double wedge = 0.0;     // wedge identity, all three index pairs
  double nu = 0.0;        // wedge normal vs chart normal
  double mcx = 0.0;       // divergence form vs closed-form curvature (finite differences)
  double dtdet = 0.0;     // time derivative of sqrt det G (finite differences)
  int samples = 0;

  double algebraic_max() const { return std::max({Gij, Gijinv, detG, trace, G_mu, wedge, nu}); }
  double fd_max() const { return std::max(mcx, dtdet); }

  void merge(const IdentityResiduals& o) {
    Gij = std::max(Gij, o.Gij);
    Gijinv = std::max(Gijinv, o.Gijinv);
    detG = std::max(detG, o.detG);
    trace = std::max(trace, o.trace);
    G_mu = std::max(G_mu, o.G_mu);
    wedge = std::max(wedge, o.wedge);
    nu = std::max(nu, o.nu);
    mcx = std::max(mcx, o.mcx);
    dtdet = std::max(dtdet, o.dtdet);
    samples += o.samples;
  }
};

namespace detail {

/// (1 / sqrt det G) D_i (G^{ij} D_j x sqrt det G) by central differences of
/// the normally-constant extension q -> F(q / |q|).
inline Vec3 divergence_form(const LinearFlow& f, const Vec3& p, double t, double h) {
  auto F = [&](const Vec3& q) -> Mat3 {
    const Vec3 s = q.normalized();
    const MetricState m = metric_tensor(f.grad_x(s, t), s);
    return m.G_inv * m.grad_x * m.sqrt_det_G;
  };
  const Mat3 P = tangential_projection(p);
  Vec3 div = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = Vec3::Unit(k) * h;
    const Mat3 dF = (F(p + e) - F(p - e)) / (2.0 * h);
    for (int i = 0; i < 3; ++i) div += P(i, k) * dF.row(i).transpose();
  }
  const MetricState m = metric_tensor(f.grad_x(p, t), p);
  return div / m.sqrt_det_G;
}

}  // namespace detail

/// Residuals of the metric identities for one embedding at the given chart
/// points, evaluated at time t.
inline IdentityResiduals identity_suite(const LinearFlow& f, const std::vector<SphereChart>& points, double t,
                                        double fd_step = 1e-4, double dt = 1e-5) {
  IdentityResiduals r;
  for (const SphereChart& c : points) {
    const Vec3 p = c.point();
    const MetricState m = metric_tensor(f.grad_x(p, t), p);

    // chart quantities
    const Vec3 phi[2] = {c.d1(), c.d2()};
    const Mat3 L = f.L(t);
    const Vec3 X[2] = {L * phi[0], L * phi[1]};
    Eigen::Matrix2d h, g;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        h(a, b) = phi[a].dot(phi[b]);
        g(a, b) = X[a].dot(X[b]);
      }
    const Eigen::Matrix2d hi = h.inverse(), gi = g.inverse();
    const Mat3 mumu = outer(p, p);

    Mat3 G_chart = mumu, Ginv_chart = mumu;
    for (int rr = 0; rr < 2; ++rr)
      for (int s = 0; s < 2; ++s)
        for (int pp = 0; pp < 2; ++pp)
          for (int q = 0; q < 2; ++q) G_chart += hi(rr, s) * hi(pp, q) * g(rr, pp) * outer(phi[s], phi[q]);
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) Ginv_chart += gi(k, l) * outer(phi[k], phi[l]);

    r.Gij = std::max(r.Gij, (m.G - G_chart).cwiseAbs().maxCoeff());
    r.Gijinv = std::max(r.Gijinv, (m.G_inv - Ginv_chart).cwiseAbs().maxCoeff());
    const double det_chart = g.determinant() / h.determinant();
    r.detG = std::max(r.detG, std::abs(m.det_G - det_chart) / det_chart);
    r.trace = std::max(r.trace, std::abs((m.G_inv * m.grad_x).cwiseProduct(m.grad_x).sum() - 2.0));
    r.G_mu = std::max(r.G_mu, (m.G * p - p).norm());
    for (auto [i, l] : {std::pair{1, 2}, {1, 3}, {2, 3}}) r.wedge = std::max(r.wedge, wedge_identity_residual(m, i, l).norm());
    const Vec3 n_chart = X[0].cross(X[1]).normalized();
    r.nu = std::max(r.nu, (m.nu - n_chart).norm());

    const Vec3 lap = f.mean_curvature_vector(p, t);
    const Vec3 div = detail::divergence_form(f, p, t, fd_step);
    r.mcx = std::max(r.mcx, (div - lap).norm() / std::max(1.0, lap.norm()));

    auto sqrt_det = [&](double s) { return metric_tensor(f.grad_x(p, s), p).sqrt_det_G; };
    const double lhs = (sqrt_det(t + dt) - sqrt_det(t - dt)) / (2.0 * dt);
    const double rhs = (m.G_inv * m.grad_x).cwiseProduct(f.grad_x_t(p, t)).sum() * m.sqrt_det_G;
    r.dtdet = std::max(r.dtdet, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    ++r.samples;
  }
  return r;
}

/// Random chart points with polar angle kept away from the chart poles.
inline std::vector<SphereChart> random_chart_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> th1(0.15, M_PI - 0.15), th2(0.0, 2.0 * M_PI);
  std::vector<SphereChart> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back({th1(rng), th2(rng)});
  return pts;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::Quaterniond q(nd(rng), nd(rng), nd(rng), nd(rng));
  return q.normalized().toRotationMatrix();
}

/// `n` samples spread over sphere, scaled-sphere and ellipsoid flows with
/// random parameters, one flow per sample.
inline IdentityResiduals random_identity_report(int n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.5, 3.0), time(0.0, 0.2), pert(-0.5, 0.5);
  IdentityResiduals total;
  for (int s = 0; s < n; ++s) {
    LinearFlow f;
    const double t = time(rng);
    switch (s % 3) {
      case 0: f = constant_flow(Mat3::Identity(), "sphere"); break;
      case 1: {
        // R(t) = sqrt(R0^2 - 4t) stays positive on [0, 0.2] for R0 >= 1
        f = shrinking_sphere_flow(std::max(1.0, scale(rng)));
        break;
      }
      default: {
        const Mat3 Q = random_rotation(rng);
        const Vec3 axes(scale(rng), scale(rng), scale(rng));
        Mat3 L1;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) L1(i, j) = pert(rng);
        f = affine_flow(Q * axes.asDiagonal() * Q.transpose(), L1, "ellipsoid");
      }
    }
    total.merge(identity_suite(f, random_chart_points(rng, 1), t));
  }
  return total;
}

}  // namespace pmcf

#endif  // PMCF_IDENTITIES_HPP
