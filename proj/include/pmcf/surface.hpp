#ifndef PMCF_SURFACE_HPP
#define PMCF_SURFACE_HPP

// Reference surfaces: the exact unit sphere and implicit level-set surfaces.
//
// For a level set {phi = 0} the value phi(p) is a level function, not a
// distance. Normal and curvature are built from the normalized gradient
// mu = grad phi / |grad phi|; the closest point is found by a constrained
// Newton iteration.

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "pmcf/types.hpp"

namespace pmcf {

/// Level function with first and second derivatives.
struct LevelFunction {
  std::function<double(const Vec3&)> value;
  std::function<Vec3(const Vec3&)> gradient;
  std::function<Mat3(const Vec3&)> hessian;
};

/// d(x) = x1^2 + x2^2 + F(x3^2) - 0.04 with F(s) = 2 s (s - 199/200).
struct DumbbellLevelSet {
  static constexpr double kNeckOffset = 0.04;
  static constexpr double kShift = 199.0 / 200.0;

  static double F(double s) { return 2.0 * s * (s - kShift); }
  static double dF(double s) { return 4.0 * s - 2.0 * kShift; }

  double value(const Vec3& x) const {
    return x[0] * x[0] + x[1] * x[1] + F(x[2] * x[2]) - kNeckOffset;
  }
  Vec3 gradient(const Vec3& x) const {
    return {2.0 * x[0], 2.0 * x[1], 2.0 * x[2] * dF(x[2] * x[2])};
  }
  Mat3 hessian(const Vec3& x) const {
    const double z2 = x[2] * x[2];
    Mat3 h = Mat3::Zero();
    h(0, 0) = 2.0;
    h(1, 1) = 2.0;
    h(2, 2) = 16.0 * z2 + 2.0 * dF(z2);
    return h;
  }

  LevelFunction as_level_function() const {
    const DumbbellLevelSet self = *this;
    return {[self](const Vec3& x) { return self.value(x); },
            [self](const Vec3& x) { return self.gradient(x); },
            [self](const Vec3& x) { return self.hessian(x); }};
  }
};

/// |x| - radius; the zero level set is the sphere of that radius.
inline LevelFunction sphere_level_function(double radius) {
  return {[radius](const Vec3& x) { return x.norm() - radius; },
          [](const Vec3& x) -> Vec3 { return x.normalized(); },
          [](const Vec3& x) -> Mat3 {
            const double r = x.norm();
            return (Mat3::Identity() - outer(x, x) / (r * r)) / r;
          }};
}

enum class SurfaceKind { UnitSphere, LevelSet };

class ReferenceSurface {
 public:
  static ReferenceSurface unit_sphere(double band_width = 0.5) {
    return ReferenceSurface(SurfaceKind::UnitSphere, {}, band_width);
  }
  static ReferenceSurface level_set(LevelFunction f, double band_width) {
    return ReferenceSurface(SurfaceKind::LevelSet, std::move(f), band_width);
  }
  static ReferenceSurface dumbbell(double band_width = 0.05) {
    return level_set(DumbbellLevelSet{}.as_level_function(), band_width);
  }

  SurfaceKind kind() const { return kind_; }
  double band_width() const { return band_width_; }

  /// d(p); for a level set this is the level value, checked against the band.
  double signed_distance(const Vec3& p) const {
    const double d = kind_ == SurfaceKind::UnitSphere ? p.norm() - 1.0 : level_.value(p);
    if (std::abs(d) > band_width_) {
      throw Error(ErrorKind::PointOutsideBand,
                  "|d(p)| = " + std::to_string(std::abs(d)) + " exceeds band " +
                      std::to_string(band_width_));
    }
    return d;
  }

  Vec3 closest_point(const Vec3& p) const {
    if (kind_ == SurfaceKind::UnitSphere) {
      signed_distance(p);
      return p / p.norm();
    }
    signed_distance(p);
    return level_set_projection(p);
  }

  /// Outward unit normal at a point of the surface.
  Vec3 surface_normal(const Vec3& p) const {
    if (kind_ == SurfaceKind::UnitSphere) return p / p.norm();
    const Vec3 g = level_.gradient(p);
    const double n = g.norm();
    if (n < 1e-8) throw Error(ErrorKind::DegenerateGradient, "|grad d| < 1e-8");
    return g / n;
  }

  /// Weingarten map D^2 d restricted to the tangent plane at a surface point.
  Mat3 shape_operator(const Vec3& p) const {
    if (kind_ == SurfaceKind::UnitSphere) {
      const Vec3 n = p / p.norm();
      return tangential_projection(n);
    }
    const Vec3 g = level_.gradient(p);
    const double gn = g.norm();
    if (gn < 1e-8) throw Error(ErrorKind::DegenerateGradient, "|grad d| < 1e-8");
    const Mat3 proj = tangential_projection(g / gn);
    const Mat3 h = proj * level_.hessian(p) * proj / gn;
    return 0.5 * (h + h.transpose());
  }

  /// Hessian of the oriented distance at a band point q with closest point p
  /// and distance d: H (I + d H)^{-1} with H the shape operator at p.
  Mat3 distance_hessian(const Vec3& p, double d) const {
    const Mat3 h = shape_operator(p);
    return h * (Mat3::Identity() + d * h).inverse();
  }

  const LevelFunction& level_function() const { return level_; }

 private:
  ReferenceSurface(SurfaceKind kind, LevelFunction f, double band_width)
      : kind_(kind), level_(std::move(f)), band_width_(band_width) {
    if (!(band_width > 0.0)) throw Error(ErrorKind::InvalidParameter, "band width must be positive");
  }

  // Damped Newton on q - p + lambda grad phi(q) = 0, phi(q) = 0; falls back to
  // alternating gradient projection and tangential descent.
  Vec3 level_set_projection(const Vec3& p) const {
    constexpr int kMaxIter = 50;
    constexpr double kTol = 1e-13;

    auto project_to_level = [this](Vec3 q) {
      for (int i = 0; i < 8; ++i) {
        const Vec3 g = level_.gradient(q);
        const double gg = g.squaredNorm();
        if (gg < 1e-16) throw Error(ErrorKind::DegenerateGradient, "|grad d| < 1e-8");
        q -= level_.value(q) / gg * g;
      }
      return q;
    };

    Vec3 q = project_to_level(p);
    double lambda = (p - q).dot(level_.gradient(q)) / level_.gradient(q).squaredNorm();

    auto residual = [&](const Vec3& qq, double ll) {
      Eigen::Vector4d r;
      r.head<3>() = qq - p + ll * level_.gradient(qq);
      r[3] = level_.value(qq);
      return r;
    };

    for (int it = 0; it < kMaxIter; ++it) {
      const Eigen::Vector4d r = residual(q, lambda);
      if (r.norm() < kTol) return q;
      Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
      const Vec3 g = level_.gradient(q);
      jac.topLeftCorner<3, 3>() = Mat3::Identity() + lambda * level_.hessian(q);
      jac.block<3, 1>(0, 3) = g;
      jac.block<1, 3>(3, 0) = g.transpose();
      const Eigen::Vector4d step = jac.fullPivLu().solve(-r);
      double damping = 1.0;
      for (int k = 0; k < 20; ++k) {
        const Vec3 qn = q + damping * step.head<3>();
        const double ln = lambda + damping * step[3];
        if (residual(qn, ln).norm() < r.norm()) {
          q = qn;
          lambda = ln;
          break;
        }
        damping *= 0.5;
      }
      if (damping < 1e-6) break;
    }
    if (residual(q, lambda).norm() < 1e-11) return project_to_level(q);

    // Fallback: projected gradient descent on |q - p|^2 along the surface.
    q = project_to_level(p);
    for (int it = 0; it < kMaxIter; ++it) {
      const Vec3 n = level_.gradient(q).normalized();
      const Vec3 tangential = tangential_projection(n) * (p - q);
      if (tangential.norm() < 1e-13 && std::abs(level_.value(q)) < 1e-13) return q;
      q = project_to_level(q + tangential);
    }
    throw Error(ErrorKind::NoConvergence, "closest point iteration did not converge");
  }

  SurfaceKind kind_;
  LevelFunction level_;
  double band_width_;
};

/// Radial root c of f(c * dir) = 0, by bisection starting from the origin.
inline double radial_root(const std::function<double(const Vec3&)>& f, const Vec3& dir,
                          double tol = 1e-15) {
  double lo = 0.0;
  double hi = 1.0;
  if (!(f(lo * dir) < 0.0)) {
    throw Error(ErrorKind::RootNotBracketed, "level function not negative at the origin");
  }
  while (f(hi * dir) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::RootNotBracketed, "no sign change along ray");
  }
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid * dir) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pmcf

#endif  // PMCF_SURFACE_HPP
