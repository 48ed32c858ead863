#ifndef PMCF_ASSEMBLY_HPP
#define PMCF_ASSEMBLY_HPP

// Element assembly of the linear systems of the fully discrete schemes.
//
// All three bilinear forms share one node-block sparsity pattern: row
// 3 n + c belongs to node n and component c, and the three columns of a
// coupled node m are contiguous. Element contributions are written straight
// into the value arrays, so each time step costs O(nnz) without triplets.

#include <algorithm>
#include <array>
#include <vector>

#include <Eigen/Sparse>

#include "pmcf/fe_space.hpp"
#include "pmcf/metric.hpp"
#include "pmcf/normal_smoothing.hpp"

namespace pmcf {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline int dof_row(int node, int component) { return 3 * node + component; }

/// Compressed-row structure of the 3N x 3N system for a fixed space.
class SparsityPattern {
 public:
  explicit SparsityPattern(const FeSpace& space) {
    const int n = space.num_dofs();
    const int nl = space.num_local();
    std::vector<std::vector<int>> adj(n);
    for (int t = 0; t < space.mesh().num_triangles(); ++t) {
      const std::vector<int> d = space.dofs(t);
      for (int a : d) adj[a].insert(adj[a].end(), d.begin(), d.end());
    }
    for (auto& row : adj) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
    }

    std::vector<Eigen::Triplet<double>> trip;
    std::size_t total = 0;
    for (const auto& row : adj) total += 9 * row.size();
    trip.reserve(total);
    for (int a = 0; a < n; ++a) {
      for (int c = 0; c < 3; ++c) {
        for (int b : adj[a]) {
          for (int j = 0; j < 3; ++j) trip.emplace_back(dof_row(a, c), dof_row(b, j), 0.0);
        }
      }
    }
    structure_.resize(3 * n, 3 * n);
    structure_.setFromTriplets(trip.begin(), trip.end());
    structure_.makeCompressed();

    // Position of block (a, b) component (c, j) is row_start(3a+c) + 3 * slot + j.
    local_slot_.resize(static_cast<std::size_t>(space.mesh().num_triangles()) * nl * nl);
    for (int t = 0; t < space.mesh().num_triangles(); ++t) {
      const std::vector<int> d = space.dofs(t);
      for (int i = 0; i < nl; ++i) {
        const auto& row = adj[d[i]];
        for (int k = 0; k < nl; ++k) {
          const auto it = std::lower_bound(row.begin(), row.end(), d[k]);
          local_slot_[(static_cast<std::size_t>(t) * nl + i) * nl + k] = static_cast<int>(it - row.begin());
        }
      }
    }
    num_local_ = nl;
  }

  const SparseMatrix& structure() const { return structure_; }
  int nnz() const { return static_cast<int>(structure_.nonZeros()); }
  int rows() const { return static_cast<int>(structure_.rows()); }

  std::size_t position(int t, int i, int k, int row_node, int c, int j) const {
    const int slot = local_slot_[(static_cast<std::size_t>(t) * num_local_ + i) * num_local_ + k];
    return static_cast<std::size_t>(structure_.outerIndexPtr()[dof_row(row_node, c)]) + 3 * slot + j;
  }

  SparseMatrix with_values(const std::vector<double>& values) const {
    SparseMatrix m = structure_;
    std::copy(values.begin(), values.end(), m.valuePtr());
    return m;
  }

 private:
  SparseMatrix structure_;
  std::vector<int> local_slot_;
  int num_local_ = 0;
};

/// Weighted mass, weighted stiffness and projection forms, with coefficients
/// frozen at a given (x, nu_hat). Values index the shared pattern.
///
///   mass(chi, psi)       = int A(nu_h, sqrt det G_h) psi . chi
///   stiffness(chi, psi)  = int G_h^{-1} grad psi : grad chi sqrt det G_h
///   projection(chi, psi) = int grad psi : grad (P_h chi)
struct SchemeForms {
  std::vector<double> mass;
  std::vector<double> stiffness;
  std::vector<double> projection;
};

inline SchemeForms assemble_forms(const FeSpace& space, const SparsityPattern& pattern, const FeVectorField& x,
                                  const FeVectorField& nu_hat, double alpha, GeometryMode mode, int quad_degree) {
  const std::size_t nnz = static_cast<std::size_t>(pattern.nnz());
  SchemeForms f{std::vector<double>(nnz, 0.0), std::vector<double>(nnz, 0.0), std::vector<double>(nnz, 0.0)};
  const ElementQuadrature& quad = space.quadrature(mode, quad_degree);
  const int nl = space.num_local();

  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const std::vector<int> dofs = space.dofs(t);
    for (int q = 0; q < quad.points_per_element; ++q) {
      const PointData& pd = quad.at(t, q);
      const Mat3 grad_x = evaluate_at(x, dofs, pd).second;
      const MetricState s = metric_tensor(grad_x, pd.mu);
      const Mat3 A = mobility_matrix(s.nu, s.sqrt_det_G, alpha);
      const auto [nu_val, nu_grad] = evaluate_at(nu_hat, dofs, pd);
      const ProjectionData proj = projection_from(nu_val, nu_grad);
      const Mat3 Gw = s.G_inv * s.sqrt_det_G;
      const double w = pd.weight;

      for (int i = 0; i < nl; ++i) {
        const double phi_i = pd.phi[i];
        const Vec3& g_i = pd.grad[i];
        const Vec3 Gw_gi = Gw * g_i;
        for (int k = 0; k < nl; ++k) {
          const double phi_k = pd.phi[k];
          const Vec3& g_k = pd.grad[k];
          const double mass_scalar = w * phi_i * phi_k;
          const double stiff = w * Gw_gi.dot(g_k);
          const double gg = w * g_i.dot(g_k);
          // dPg(j, c) = sum_i g_k[i] D_i P_{jc}
          const Mat3 dPg = g_k[0] * proj.dP[0] + g_k[1] * proj.dP[1] + g_k[2] * proj.dP[2];
          for (int c = 0; c < 3; ++c) {
            for (int j = 0; j < 3; ++j) {
              const std::size_t pos = pattern.position(t, i, k, dofs[i], c, j);
              f.mass[pos] += mass_scalar * A(c, j);
              f.projection[pos] += w * phi_i * dPg(j, c) + gg * proj.P(j, c);
            }
            f.stiffness[pattern.position(t, i, k, dofs[i], c, c)] += stiff;
          }
        }
      }
    }
  }
  return f;
}

/// Linear system for one stage: matrix and right-hand side.
struct SchemeSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

inline Eigen::VectorXd flatten(const FeVectorField& u) {
  Eigen::VectorXd v(3 * u.num_dofs());
  for (int i = 0; i < u.num_dofs(); ++i) {
    for (int c = 0; c < 3; ++c) v[dof_row(i, c)] = u.coeffs(i, c);
  }
  return v;
}

inline FeVectorField unflatten(const Eigen::VectorXd& v, int k) {
  FeVectorField u;
  u.k = k;
  u.coeffs.resize(v.size() / 3, 3);
  for (int i = 0; i < u.num_dofs(); ++i) {
    for (int c = 0; c < 3; ++c) u.coeffs(i, c) = v[dof_row(i, c)];
  }
  return u;
}

/// matrix = a_m Mass + a_s Stiffness + a_p Projection,
/// rhs = (b_m Mass + b_s Stiffness + b_p Projection) x_old.
struct StageWeights {
  double a_mass, a_stiff, a_proj;
  double b_mass, b_stiff, b_proj;
};

inline SchemeSystem combine(const SparsityPattern& pattern, const SchemeForms& f, const StageWeights& w,
                            const FeVectorField& x_old) {
  std::vector<double> lhs(f.mass.size());
  std::vector<double> rhs_vals(f.mass.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    lhs[i] = w.a_mass * f.mass[i] + w.a_stiff * f.stiffness[i] + w.a_proj * f.projection[i];
    rhs_vals[i] = w.b_mass * f.mass[i] + w.b_stiff * f.stiffness[i] + w.b_proj * f.projection[i];
  }
  SchemeSystem sys;
  sys.matrix = pattern.with_values(lhs);
  sys.rhs = pattern.with_values(rhs_vals) * flatten(x_old);
  return sys;
}

inline double projection_factor(double alpha) { return (1.0 + alpha) / alpha; }

/// Backward Euler step: coefficients frozen at x_prev, nu_hat_prev.
inline SchemeSystem assemble_euler_step(const FeSpace& space, const SparsityPattern& pattern,
                                        const FeVectorField& x_prev, const FeVectorField& nu_hat_prev, double alpha,
                                        double tau, GeometryMode mode, int quad_degree) {
  const SchemeForms f = assemble_forms(space, pattern, x_prev, nu_hat_prev, alpha, mode, quad_degree);
  return combine(pattern, f, {1.0 / tau, 1.0, projection_factor(alpha), 1.0 / tau, 0.0, 0.0}, x_prev);
}

/// Corrector of the two-stage scheme: coefficients frozen at the half step,
/// trapezoidal average of x_prev and the unknown in the elliptic terms.
inline SchemeSystem assemble_midpoint_corrector(const FeSpace& space, const SparsityPattern& pattern,
                                                const FeVectorField& x_prev, const FeVectorField& x_half,
                                                const FeVectorField& nu_hat_half, double alpha, double tau,
                                                GeometryMode mode, int quad_degree) {
  const SchemeForms f = assemble_forms(space, pattern, x_half, nu_hat_half, alpha, mode, quad_degree);
  const double c = projection_factor(alpha);
  return combine(pattern, f, {1.0 / tau, 0.5, 0.5 * c, 1.0 / tau, -0.5, -0.5 * c}, x_prev);
}

/// First stage of the two-stage scheme: an Euler step of size tau / 2.
inline SchemeSystem assemble_midpoint_predictor(const FeSpace& space, const SparsityPattern& pattern,
                                                const FeVectorField& x_prev, const FeVectorField& nu_hat_prev,
                                                double alpha, double tau, GeometryMode mode, int quad_degree) {
  return assemble_euler_step(space, pattern, x_prev, nu_hat_prev, alpha, 0.5 * tau, mode, quad_degree);
}

}  // namespace pmcf

#endif  // PMCF_ASSEMBLY_HPP
