#ifndef PMCF_REFERENCE_ELEMENT_HPP
#define PMCF_REFERENCE_ELEMENT_HPP

#include <string>
#include <vector>

#include "pmcf/quadrature.hpp"

namespace pmcf {

/// Lagrange element of order 1 or 2 in barycentric coordinates.
/// Nodes: vertices 0..2, then midpoints of local edges (0,1), (1,2), (2,0).
class ReferenceElement {
 public:
  explicit ReferenceElement(int order) : order_(order) {
    if (order != 1 && order != 2) throw Error(ErrorKind::InvalidParameter, "element order must be 1 or 2");
  }

  int order() const { return order_; }
  int num_nodes() const { return order_ == 1 ? 3 : 6; }

  Barycentric node(int i) const {
    static constexpr Barycentric kNodes[6] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                              {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
    return kNodes[i];
  }

  std::vector<double> values(const Barycentric& l) const {
    if (order_ == 1) return {l[0], l[1], l[2]};
    return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
            4 * l[0] * l[1],       4 * l[1] * l[2],       4 * l[2] * l[0]};
  }

  /// d(basis_i)/d(lambda_j), one row per basis function.
  std::vector<Vec3> barycentric_gradients(const Barycentric& l) const {
    if (order_ == 1) return {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    return {Vec3(4 * l[0] - 1, 0, 0),
            Vec3(0, 4 * l[1] - 1, 0),
            Vec3(0, 0, 4 * l[2] - 1),
            Vec3(4 * l[1], 4 * l[0], 0),
            Vec3(0, 4 * l[2], 4 * l[1]),
            Vec3(4 * l[2], 0, 4 * l[0])};
  }

 private:
  int order_;
};

/// Tangential gradients on a flat facet of each basis function.
///
/// With the facet map q = sum_j lambda_j v_j, grad lambda_j lies in the facet
/// plane; the result is sum_j dphi/dlambda_j grad lambda_j.
inline std::vector<Vec3> facet_tangential_gradient(const std::array<Vec3, 3>& v,
                                                   const std::vector<Vec3>& bary_grads) {
  const Vec3 e1 = v[1] - v[0];
  const Vec3 e2 = v[2] - v[0];
  const Vec3 n = e1.cross(e2);
  const double twice_area = n.norm();
  if (twice_area <= 2e-14) throw Error(ErrorKind::DegenerateTriangle, "facet area below 1e-14");
  const Vec3 unit_n = n / twice_area;
  // grad lambda_1 = (e2 x n) / |n|^2 etc.; the three sum to zero.
  const Vec3 g1 = unit_n.cross(e2) * (-1.0 / twice_area);
  const Vec3 g2 = unit_n.cross(e1) * (1.0 / twice_area);
  const Vec3 g0 = -(g1 + g2);
  std::vector<Vec3> out;
  out.reserve(bary_grads.size());
  for (const Vec3& b : bary_grads) out.push_back(b[0] * g0 + b[1] * g1 + b[2] * g2);
  return out;
}

}  // namespace pmcf

#endif  // PMCF_REFERENCE_ELEMENT_HPP
