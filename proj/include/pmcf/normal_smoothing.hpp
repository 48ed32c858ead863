#ifndef PMCF_NORMAL_SMOOTHING_HPP
#define PMCF_NORMAL_SMOOTHING_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "pmcf/fe_space.hpp"
#include "pmcf/metric.hpp"

namespace pmcf {

/// Continuous unit normal field nu_hat in (S^k_h)^3.
///
/// The lumped projection of the element normals onto S^k_h diagonalizes, so
/// each nodal value is the facet-area-weighted mean of the element normals
/// of the adjacent facets evaluated at that node; the means are then
/// normalized node by node.
inline FeVectorField smoothed_normal(const FeSpace& space, const FeVectorField& x, GeometryMode mode) {
  const int n = space.num_dofs();
  Eigen::Matrix<double, Eigen::Dynamic, 3> sum = Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(n, 3);
  std::vector<double> weight(n, 0.0);
  const ElementQuadrature& nodal = space.nodal(mode);
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const std::vector<int> dofs = space.dofs(t);
    const double area = space.mesh().facet_area(t);
    for (int i = 0; i < nodal.points_per_element; ++i) {
      const PointData& pd = nodal.at(t, i);
      const auto [value, grad] = evaluate_at(x, dofs, pd);
      const MetricState s = metric_tensor(grad, pd.mu);
      sum.row(dofs[i]) += area * s.nu.transpose();
      weight[dofs[i]] += area;
    }
  }
  FeVectorField out;
  out.k = space.order();
  out.coeffs.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    const Vec3 avg = sum.row(i).transpose() / weight[i];
    const double len = avg.norm();
    if (len < 1e-8) throw Error(ErrorKind::ZeroAverage, "averaged normal vanishes at node " + std::to_string(i));
    out.set_node(i, avg / len);
  }
  return out;
}

/// P_h = I - nu nu^T and dP[i](j, k) = D_i (P_h)_{jk}.
struct ProjectionData {
  Mat3 P;
  std::array<Mat3, 3> dP;
};

inline ProjectionData projection_from(const Vec3& nu, const Mat3& grad_nu) {
  ProjectionData out;
  out.P = tangential_projection(nu);
  for (int i = 0; i < 3; ++i) {
    const Vec3 dnu = grad_nu.row(i).transpose();
    out.dP[i] = -(outer(dnu, nu) + outer(nu, dnu));
  }
  return out;
}

inline ProjectionData projection_and_gradient(const FeVectorField& nu_hat, const FeSpace& space, int t,
                                              const Barycentric& l, GeometryMode mode) {
  const auto [value, grad] = evaluate_field(nu_hat, space, t, l, mode);
  return projection_from(value, grad);
}

}  // namespace pmcf

#endif  // PMCF_NORMAL_SMOOTHING_HPP
