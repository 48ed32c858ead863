#ifndef PMCF_FE_SPACE_HPP
#define PMCF_FE_SPACE_HPP

// Surface Lagrange spaces S^k_h on the reference surface M, k = 1, 2.
//
// A function chi on M is represented by a piecewise polynomial on the flat
// mesh M_h composed with the inverse closest point map. In Lifted mode
// integrals are taken over M: at a quadrature point q of a facet we lift to
// p = a(q), transform facet gradients to tangential gradients on M, and weight
// by the area ratio do/do_h. In Simplified mode integrals are taken over M_h
// with facet gradients and the facet normal.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "pmcf/mesh.hpp"
#include "pmcf/quadrature.hpp"
#include "pmcf/reference_element.hpp"
#include "pmcf/surface.hpp"

namespace pmcf {

enum class GeometryMode { Lifted, Simplified };

inline const char* to_string(GeometryMode m) { return m == GeometryMode::Lifted ? "lifted" : "simplified"; }

/// Decomposition q = p + d mu(p) of a band point.
struct LiftData {
  Vec3 q;
  Vec3 p;
  double d = 0.0;
  Vec3 mu;    // surface normal at p
  Vec3 mu_h;  // facet normal at q
};

inline LiftData lift_point(const ReferenceSurface& surface, const Vec3& q, const Vec3& facet_normal) {
  LiftData l;
  l.q = q;
  l.mu_h = facet_normal;
  if (surface.kind() == SurfaceKind::UnitSphere) {
    l.d = surface.signed_distance(q);
    l.p = q / q.norm();
    l.mu = l.p;
  } else {
    l.p = surface.closest_point(q);
    l.mu = surface.surface_normal(l.p);
    l.d = (q - l.p).dot(l.mu);
  }
  return l;
}

namespace detail {

inline void check_transform(const LiftData& lift, const Mat3& hess) {
  const double cos_angle = lift.mu_h.dot(lift.mu);
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(Mat3::Identity() - lift.d * hess);
  if (cos_angle <= 0.1 || eig.eigenvalues().minCoeff() <= 0.1) {
    throw Error(ErrorKind::SingularTransform, "lift transform is not invertible at this point");
  }
}

}  // namespace detail

/// Tangential gradient on M of the lift of f, from its facet gradient at q.
///
/// Inverts grad_h f = P_h (I - d H) grad_M f^l with H the distance Hessian at
/// q; the result is tangent to M at p.
inline Vec3 lift_gradient(const Vec3& grad_h, const LiftData& lift, const Mat3& hess) {
  detail::check_transform(lift, hess);
  const Vec3 w = grad_h - lift.mu_h * (lift.mu.dot(grad_h) / lift.mu_h.dot(lift.mu));
  return (Mat3::Identity() - lift.d * hess).ldlt().solve(w);
}

/// Area ratio do/do_h of the map a restricted to the facet through q.
inline double measure_ratio(const LiftData& lift, const Mat3& hess) {
  detail::check_transform(lift, hess);
  const Vec3 t1 = lift.mu_h.unitOrthogonal();
  const Vec3 t2 = lift.mu_h.cross(t1);
  const Mat3 da = tangential_projection(lift.mu) - lift.d * hess;
  return (da * t1).cross(da * t2).norm();
}

/// Coefficients of a 3-vector valued function in (S^k_h)^3, one row per node.
struct FeVectorField {
  int k = 2;
  Eigen::Matrix<double, Eigen::Dynamic, 3> coeffs;

  int num_dofs() const { return static_cast<int>(coeffs.rows()); }
  Vec3 node(int i) const { return coeffs.row(i).transpose(); }
  void set_node(int i, const Vec3& v) { coeffs.row(i) = v.transpose(); }
};

/// Geometry and basis data at one quadrature point.
struct PointData {
  Vec3 p;       // point on M (Lifted) or on M_h (Simplified)
  Vec3 mu;      // unit normal of the integration surface at p
  double weight = 0.0;  // quadrature weight times the surface measure
  std::array<double, 6> phi{};
  std::array<Vec3, 6> grad{};  // tangential basis gradients
};

/// Per-element, per-point precomputed data for one (mode, degree) pair.
struct ElementQuadrature {
  int points_per_element = 0;
  std::vector<PointData> data;  // element-major

  const PointData& at(int t, int q) const { return data[static_cast<std::size_t>(t) * points_per_element + q]; }
};

class FeSpace {
 public:
  FeSpace(ReferenceSurface surface, PolyhedralMesh mesh, int k)
      : surface_(std::move(surface)), mesh_(std::move(mesh)), element_(k) {
    const std::vector<Vec3> flat = mesh_.node_positions(k);
    lifted_nodes_.reserve(flat.size());
    for (const Vec3& q : flat) lifted_nodes_.push_back(surface_.closest_point(q));
  }

  const ReferenceSurface& surface() const { return surface_; }
  const PolyhedralMesh& mesh() const { return mesh_; }
  const ReferenceElement& element() const { return element_; }
  int order() const { return element_.order(); }
  int num_dofs() const { return mesh_.num_dofs(order()); }
  int num_local() const { return element_.num_nodes(); }

  std::vector<int> dofs(int t) const { return mesh_.node_table(t, order()); }

  /// Node positions a(q) on M.
  const std::vector<Vec3>& lifted_nodes() const { return lifted_nodes_; }

  std::array<Vec3, 3> facet_vertices(int t) const {
    const Triangle& tri = mesh_.triangles()[t];
    return {mesh_.vertices()[tri[0]], mesh_.vertices()[tri[1]], mesh_.vertices()[tri[2]]};
  }

  Vec3 flat_point(int t, const Barycentric& l) const {
    const auto v = facet_vertices(t);
    return l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
  }

  /// Geometry, basis values and tangential basis gradients at a point; the
  /// weight is the surface measure factor (|T| * do/do_h or |T|).
  PointData point_data(int t, const Barycentric& l, GeometryMode mode) const {
    const auto v = facet_vertices(t);
    const Vec3 q = l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
    const Vec3 n_h = mesh_.facet_normal(t);
    const std::vector<double> phi = element_.values(l);
    const std::vector<Vec3> flat_grads = facet_tangential_gradient(v, element_.barycentric_gradients(l));

    PointData pd;
    const double area = mesh_.facet_area(t);
    for (int i = 0; i < num_local(); ++i) pd.phi[i] = phi[i];
    if (mode == GeometryMode::Simplified) {
      pd.p = q;
      pd.mu = n_h;
      pd.weight = area;
      for (int i = 0; i < num_local(); ++i) pd.grad[i] = flat_grads[i];
      return pd;
    }
    const LiftData lift = lift_point(surface_, q, n_h);
    const Mat3 hess = surface_.distance_hessian(lift.p, lift.d);
    pd.p = lift.p;
    pd.mu = lift.mu;
    pd.weight = area * measure_ratio(lift, hess);
    for (int i = 0; i < num_local(); ++i) pd.grad[i] = lift_gradient(flat_grads[i], lift, hess);
    return pd;
  }

  /// Cached quadrature data; built on first use and shared afterwards.
  /// The cache is not synchronized; share a space across threads only after
  /// the needed entries exist.
  const ElementQuadrature& quadrature(GeometryMode mode, int degree) const {
    const QuadratureRule rule = quadrature_rule(degree);
    return cached(mode, rule.degree, rule.points);
  }

  /// Point data at the Lagrange nodes of every element, weight |T|.
  const ElementQuadrature& nodal(GeometryMode mode) const {
    std::vector<QuadraturePoint> pts;
    for (int i = 0; i < num_local(); ++i) pts.push_back({element_.node(i), 1.0});
    return cached(mode, kNodalKey, pts);
  }

 private:
  static constexpr int kNodalKey = -1;

  const ElementQuadrature& cached(GeometryMode mode, int key, const std::vector<QuadraturePoint>& pts) const {
    auto it = cache_.find({mode, key});
    if (it != cache_.end()) return *it->second;
    auto eq = std::make_shared<ElementQuadrature>();
    eq->points_per_element = static_cast<int>(pts.size());
    eq->data.reserve(pts.size() * mesh_.num_triangles());
    for (int t = 0; t < mesh_.num_triangles(); ++t) {
      for (const QuadraturePoint& qp : pts) {
        PointData pd = point_data(t, qp.lambda, mode);
        pd.weight *= qp.weight;
        eq->data.push_back(pd);
      }
    }
    return *cache_.emplace(std::make_pair(mode, key), std::move(eq)).first->second;
  }

  ReferenceSurface surface_;
  PolyhedralMesh mesh_;
  ReferenceElement element_;
  std::vector<Vec3> lifted_nodes_;
  mutable std::map<std::pair<GeometryMode, int>, std::shared_ptr<ElementQuadrature>> cache_;
};

/// (I^k_h f): nodal values f(a(node)).
inline FeVectorField interpolate(const std::function<Vec3(const Vec3&)>& f, const FeSpace& space) {
  FeVectorField u;
  u.k = space.order();
  u.coeffs.resize(space.num_dofs(), 3);
  const auto& nodes = space.lifted_nodes();
  for (int i = 0; i < space.num_dofs(); ++i) u.set_node(i, f(nodes[i]));
  return u;
}

/// Value and gradient (rows D_i u_j) of u at the point with given basis data.
inline std::pair<Vec3, Mat3> evaluate_at(const FeVectorField& u, const std::vector<int>& dofs, const PointData& pd) {
  Vec3 value = Vec3::Zero();
  Mat3 grad = Mat3::Zero();
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const Vec3 c = u.node(dofs[i]);
    value += pd.phi[i] * c;
    grad += outer(pd.grad[i], c);
  }
  return {value, grad};
}

inline std::pair<Vec3, Mat3> evaluate_field(const FeVectorField& u, const FeSpace& space, int t,
                                            const Barycentric& l, GeometryMode mode) {
  return evaluate_at(u, space.dofs(t), space.point_data(t, l, mode));
}

/// Initial embedding: every node p on M is mapped to c p with target(c p) = 0.
inline FeVectorField initial_embedding(const std::function<double(const Vec3&)>& target, const FeSpace& space) {
  return interpolate([&](const Vec3& p) -> Vec3 { return radial_root(target, p) * p; }, space);
}

}  // namespace pmcf

#endif  // PMCF_FE_SPACE_HPP
