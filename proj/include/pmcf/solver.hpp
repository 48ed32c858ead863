#ifndef PMCF_SOLVER_HPP
#define PMCF_SOLVER_HPP

#include <cmath>
#include <optional>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "pmcf/assembly.hpp"

namespace pmcf {

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
  bool direct = false;
};

inline constexpr int kDirectFallbackMaxRows = 30000;

namespace detail {

inline double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double bn = b.norm();
  const double rn = (A * x - b).norm();
  return bn > 0.0 ? rn / bn : rn;
}

inline std::optional<Eigen::VectorXd> direct_solve(const SparseMatrix& A, const Eigen::VectorXd& b) {
  const Eigen::SparseMatrix<double, Eigen::ColMajor> Ac = A;
  Eigen::SparseLU<Eigen::SparseMatrix<double, Eigen::ColMajor>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  return x;
}

}  // namespace detail

namespace detail {

template <class Solver>
std::optional<Eigen::VectorXd> krylov_solve(Solver& solver, const SparseMatrix& A, const Eigen::VectorXd& b,
                                            double tol, const Eigen::VectorXd* guess, SolveStats* stats) {
  solver.setTolerance(0.5 * tol);
  solver.setMaxIterations(10 * static_cast<int>(A.rows()));
  solver.compute(A);
  if (solver.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd x;
  if (guess) {
    x = solver.solveWithGuess(b, *guess);
  } else {
    x = solver.solve(b);
  }
  if (!x.allFinite()) return std::nullopt;
  const double res = relative_residual(A, x, b);
  if (!(res <= tol)) return std::nullopt;
  if (stats) *stats = {static_cast<int>(solver.iterations()), res, false};
  return x;
}

}  // namespace detail

/// Solves A x = b to relative residual `tol`. BiCGSTAB with a diagonal
/// preconditioner first, then with incomplete LU; sparse LU as the last
/// resort for systems of at most 30000 rows. Iterations are capped at 10 n.
inline Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& b, double tol = 1e-10,
                                    const Eigen::VectorXd* guess = nullptr, SolveStats* stats = nullptr) {
  const int n = static_cast<int>(A.rows());
  if (b.norm() == 0.0) return Eigen::VectorXd::Zero(n);

  {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> solver;
    if (auto x = detail::krylov_solve(solver, A, b, tol, guess, stats)) return *x;
  }
  {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> solver;
    solver.preconditioner().setDroptol(1e-4);
    solver.preconditioner().setFillfactor(2);
    if (auto x = detail::krylov_solve(solver, A, b, tol, guess, stats)) return *x;
  }
  if (n <= kDirectFallbackMaxRows) {
    if (auto x = detail::direct_solve(A, b)) {
      const double res = detail::relative_residual(A, *x, b);
      if (res <= tol) {
        if (stats) *stats = {0, res, true};
        return *x;
      }
    }
  }
  throw Error(ErrorKind::SolverDiverged, "linear solve failed to reach tolerance " + std::to_string(tol));
}

}  // namespace pmcf

#endif  // PMCF_SOLVER_HPP
