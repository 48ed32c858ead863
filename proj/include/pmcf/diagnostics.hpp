#ifndef PMCF_DIAGNOSTICS_HPP
#define PMCF_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pmcf/fe_space.hpp"
#include "pmcf/quadrature.hpp"

namespace pmcf {

/// Smooth embedding x: M -> R^3 with its tangential gradient (rows D_i x).
struct ExactEmbedding {
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> gradient;
};

/// Shrinking sphere x(p, t) = sqrt(R0^2 - 4 t) p over the unit sphere.
inline double sphere_radius(double r0, double t) {
  if (!(t < r0 * r0 / 4.0)) throw Error(ErrorKind::PastExtinction, "t is past the extinction time R0^2/4");
  return std::sqrt(r0 * r0 - 4.0 * t);
}

inline ExactEmbedding exact_sphere(double r0, double t) {
  const double r = sphere_radius(r0, t);
  return {[r](const Vec3& p) -> Vec3 { return r * p; },
          [r](const Vec3& p) -> Mat3 { return r * tangential_projection(p.normalized()); }};
}

/// Squared L2 and H1-seminorm numerators and denominators at one time.
struct ErrorParts {
  double l2_num = 0.0, l2_den = 0.0;
  double semi_num = 0.0, semi_den = 0.0;

  double e1() const { return l2_num / l2_den; }
  double e2() const { return semi_num / semi_den; }
  double e3() const { return (l2_num + semi_num) / (l2_den + semi_den); }
};

/// Relative squared errors of x_h against an exact embedding, integrated over
/// M (Lifted) or over M_h with the extended exact solution (Simplified).
inline ErrorParts relative_errors(const FeSpace& space, const FeVectorField& x_h, const ExactEmbedding& exact,
                                  GeometryMode mode, int quad_degree = 8) {
  const ElementQuadrature& quad = space.quadrature(mode, quad_degree);
  ErrorParts parts;
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const std::vector<int> dofs = space.dofs(t);
    for (int q = 0; q < quad.points_per_element; ++q) {
      const PointData& pd = quad.at(t, q);
      const auto [xv, xg] = evaluate_at(x_h, dofs, pd);
      Vec3 ev;
      Mat3 eg;
      if (mode == GeometryMode::Lifted) {
        ev = exact.value(pd.p);
        eg = exact.gradient(pd.p);
      } else {
        const LiftData lift = lift_point(space.surface(), pd.p, pd.mu);
        const Mat3 hess = space.surface().distance_hessian(lift.p, lift.d);
        ev = exact.value(lift.p);
        eg = tangential_projection(lift.mu_h) * (Mat3::Identity() - lift.d * hess) * exact.gradient(lift.p);
      }
      const double w = pd.weight;
      parts.l2_num += w * (xv - ev).squaredNorm();
      parts.l2_den += w * ev.squaredNorm();
      parts.semi_num += w * (xg - eg).squaredNorm();
      parts.semi_den += w * eg.squaredNorm();
    }
  }
  return parts;
}

/// Running maxima of the three relative errors over recorded steps.
struct ErrorTriple {
  double E1 = 0.0, E2 = 0.0, E3 = 0.0;

  void update(const ErrorParts& p) {
    E1 = std::max(E1, p.e1());
    E2 = std::max(E2, p.e2());
    E3 = std::max(E3, p.e3());
  }
};

/// eoc_i = log(E_i / E_{i+1}) / log(h_i / h_{i+1}).
inline std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size() || errors.empty()) {
    throw Error(ErrorKind::InvalidSequence, "errors and mesh sizes must be non-empty and of equal length");
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !(errors[i] > 0.0)) throw Error(ErrorKind::InvalidSequence, "values must be positive");
    if (i > 0 && !(h[i] < h[i - 1])) throw Error(ErrorKind::InvalidSequence, "h must be strictly decreasing");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    out.push_back(std::log(errors[i] / errors[i + 1]) / std::log(h[i] / h[i + 1]));
  }
  return out;
}

/// diam(T) / r(T) for the flat triangle (a, b, c), with r = 2 area / perimeter.
inline double triangle_aspect(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double l0 = (b - a).norm();
  const double l1 = (c - b).norm();
  const double l2 = (a - c).norm();
  const double diam = std::max({l0, l1, l2});
  const double twice_area = (b - a).cross(c - a).norm();
  if (!(twice_area > 1e-14 * diam * diam)) throw Error(ErrorKind::DegenerateTriangle, "triangle has zero area");
  const double inradius = twice_area / (l0 + l1 + l2);
  return diam / inradius;
}

/// Worst aspect ratio over the flat triangles through the mapped vertices.
inline double sigma_max(const FeVectorField& x_h, const PolyhedralMesh& mesh) {
  double s = 0.0;
  for (const Triangle& t : mesh.triangles()) {
    s = std::max(s, triangle_aspect(x_h.node(t[0]), x_h.node(t[1]), x_h.node(t[2])));
  }
  return s;
}

/// Area of the image surface: sum over elements of the integral of
/// |X_s ^ X_t| in the reference parametrization of each mapped element.
inline double surface_area(const FeVectorField& x_h, const FeSpace& space, int quad_degree) {
  const QuadratureRule rule = quadrature_rule(quad_degree);
  const ReferenceElement& el = space.element();
  double area = 0.0;
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const std::vector<int> dofs = space.dofs(t);
    for (const QuadraturePoint& qp : rule.points) {
      const std::vector<Vec3> bg = el.barycentric_gradients(qp.lambda);
      Vec3 xs = Vec3::Zero();
      Vec3 xt = Vec3::Zero();
      for (std::size_t i = 0; i < dofs.size(); ++i) {
        const Vec3 c = x_h.node(dofs[i]);
        xs += (bg[i][1] - bg[i][0]) * c;
        xt += (bg[i][2] - bg[i][0]) * c;
      }
      const double jac = xs.cross(xt).norm();
      if (!(jac > 0.0)) throw Error(ErrorKind::DegenerateMetric, "mapped element has zero area element");
      area += 0.5 * qp.weight * jac;
    }
  }
  return area;
}

/// Sum of flat triangle areas through the mapped vertices.
inline double flat_surface_area(const FeVectorField& x_h, const PolyhedralMesh& mesh) {
  double area = 0.0;
  for (const Triangle& t : mesh.triangles()) {
    area += 0.5 * (x_h.node(t[1]) - x_h.node(t[0])).cross(x_h.node(t[2]) - x_h.node(t[0])).norm();
  }
  return area;
}

/// Mean distance of the mapped mesh vertices from the origin.
inline double mean_vertex_radius(const FeVectorField& x_h, const PolyhedralMesh& mesh) {
  double s = 0.0;
  for (int i = 0; i < mesh.num_vertices(); ++i) s += x_h.node(i).norm();
  return s / mesh.num_vertices();
}

}  // namespace pmcf

#endif  // PMCF_DIAGNOSTICS_HPP
