#ifndef PMCF_EVOLUTION_HPP
#define PMCF_EVOLUTION_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "pmcf/assembly.hpp"
#include "pmcf/diagnostics.hpp"
#include "pmcf/normal_smoothing.hpp"
#include "pmcf/solver.hpp"

namespace pmcf {

enum class Scheme { Euler, Midpoint };
enum class InitialSurface { Sphere, Dumbbell };

inline const char* to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "midpoint"; }
inline const char* to_string(InitialSurface s) { return s == InitialSurface::Sphere ? "sphere" : "dumbbell"; }

struct RunConfig {
  InitialSurface surface = InitialSurface::Sphere;
  double r0 = 2.0;
  int level = 3;
  int k = 2;
  double alpha = 0.1;
  double tau = 1e-3;
  double T = 0.1;
  Scheme scheme = Scheme::Midpoint;
  GeometryMode mode = GeometryMode::Lifted;
  int quad_assembly = 0;  // 0 selects 2k
  int quad_error = 8;
  std::string out;
  int snapshot_every = 0;  // 0 disables VTK snapshots
  double solver_tol = 1e-10;

  int assembly_degree() const { return quad_assembly > 0 ? quad_assembly : 2 * k; }

  /// Number of steps M = T / tau; rejects non-integral ratios.
  int num_steps() const {
    const double ratio = T / tau;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      throw Error(ErrorKind::InvalidConfig, "T / tau must be an integer");
    }
    return static_cast<int>(rounded);
  }

  void validate() const {
    if (!(tau > 0.0) || !(T > 0.0)) throw Error(ErrorKind::InvalidConfig, "tau and T must be positive");
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidConfig, "alpha must be positive");
    if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidConfig, "r0 must be positive");
    if (k != 1 && k != 2) throw Error(ErrorKind::InvalidConfig, "k must be 1 or 2");
    if (level < 0 || level > 8) throw Error(ErrorKind::InvalidConfig, "level must be in [0, 8]");
    if (quad_error < 1 || quad_error > 8 || quad_assembly < 0 || quad_assembly > 8) {
      throw Error(ErrorKind::InvalidConfig, "quadrature degrees must be in [1, 8]");
    }
    if (!(solver_tol > 0.0)) throw Error(ErrorKind::InvalidConfig, "solver tolerance must be positive");
    num_steps();
    if (surface == InitialSurface::Sphere && !(T < r0 * r0 / 4.0)) {
      throw Error(ErrorKind::InvalidConfig, "T must be before the extinction time R0^2/4");
    }
  }
};

/// State after step m: t^m = m tau, positions and the cached smoothed normal.
struct FlowState {
  int step = 0;
  double t = 0.0;
  FeVectorField x;
  FeVectorField nu_hat;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double err_l2 = std::numeric_limits<double>::quiet_NaN();
  double err_h1semi = std::numeric_limits<double>::quiet_NaN();
  double err_h1 = std::numeric_limits<double>::quiet_NaN();
  double sigma_max = 0.0;
  double area = 0.0;
  double cpu_s = 0.0;
};

/// Mesh, space, sparsity pattern and scheme parameters of one flow.
class MeanCurvatureFlow {
 public:
  explicit MeanCurvatureFlow(const RunConfig& config)
      : config_(config),
        space_(ReferenceSurface::unit_sphere(), build_icosphere(config.level), config.k),
        pattern_(space_) {
    config_.validate();
  }

  const RunConfig& config() const { return config_; }
  const FeSpace& space() const { return space_; }
  const SparsityPattern& pattern() const { return pattern_; }

  FeVectorField initial_positions() const {
    if (config_.surface == InitialSurface::Sphere) {
      const double r0 = config_.r0;
      return interpolate([r0](const Vec3& p) -> Vec3 { return r0 * p; }, space_);
    }
    const DumbbellLevelSet db;
    return initial_embedding([db](const Vec3& x) { return db.value(x); }, space_);
  }

  FlowState initial_state() const {
    FlowState s;
    s.x = initial_positions();
    s.nu_hat = smoothed_normal(space_, s.x, config_.mode);
    return s;
  }

  /// Advances one time step with the configured scheme.
  FlowState step(const FlowState& state) const {
    const double tau = config_.tau;
    const int deg = config_.assembly_degree();
    FlowState next;
    next.step = state.step + 1;
    next.t = next.step * tau;
    if (config_.scheme == Scheme::Euler) {
      const SchemeSystem sys =
          assemble_euler_step(space_, pattern_, state.x, state.nu_hat, config_.alpha, tau, config_.mode, deg);
      next.x = solve(sys, state.x);
    } else {
      const SchemeSystem pred =
          assemble_midpoint_predictor(space_, pattern_, state.x, state.nu_hat, config_.alpha, tau, config_.mode, deg);
      const FeVectorField half = solve(pred, state.x);
      const FeVectorField nu_half = smoothed_normal(space_, half, config_.mode);
      const SchemeSystem corr = assemble_midpoint_corrector(space_, pattern_, state.x, half, nu_half, config_.alpha,
                                                            tau, config_.mode, deg);
      next.x = solve(corr, half);
    }
    next.nu_hat = smoothed_normal(space_, next.x, config_.mode);
    return next;
  }

  DiagnosticsRecord diagnostics(const FlowState& s) const {
    DiagnosticsRecord r;
    r.t = s.t;
    if (config_.surface == InitialSurface::Sphere) {
      const ErrorParts e =
          relative_errors(space_, s.x, exact_sphere(config_.r0, s.t), config_.mode, config_.quad_error);
      r.err_l2 = e.e1();
      r.err_h1semi = e.e2();
      r.err_h1 = e.e3();
    }
    r.sigma_max = sigma_max(s.x, space_.mesh());
    r.area = surface_area(s.x, space_, config_.quad_error);
    return r;
  }

 private:
  FeVectorField solve(const SchemeSystem& sys, const FeVectorField& guess) const {
    const Eigen::VectorXd g = flatten(guess);
    const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs, config_.solver_tol, &g);
    return unflatten(x, space_.order());
  }

  RunConfig config_;
  FeSpace space_;
  SparsityPattern pattern_;
};

struct RunResult {
  FlowState final_state;
  ErrorTriple errors;
  bool pinched = false;
  double t_pinch = 0.0;
  std::string pinch_reason;
  int records = 0;
  double cpu_s = 0.0;
};

using Observer = std::function<void(const DiagnosticsRecord&, const FlowState&)>;

/// Runs M steps (or until the surface degenerates), reporting every state,
/// the initial one included, to the observer. Degeneration of the metric or
/// of the averaged normal ends the run as a pinch-off at the attempted time.
inline RunResult run(const MeanCurvatureFlow& flow, const Observer& observer = {}) {
  using Clock = std::chrono::steady_clock;
  const int steps = flow.config().num_steps();
  RunResult result;
  double cpu = 0.0;

  auto record = [&](const FlowState& s) {
    DiagnosticsRecord r = flow.diagnostics(s);
    r.cpu_s = cpu;
    if (flow.config().surface == InitialSurface::Sphere) {
      result.errors.E1 = std::max(result.errors.E1, r.err_l2);
      result.errors.E2 = std::max(result.errors.E2, r.err_h1semi);
      result.errors.E3 = std::max(result.errors.E3, r.err_h1);
    }
    ++result.records;
    if (observer) observer(r, s);
  };

  FlowState state;
  {
    const auto start = Clock::now();
    state = flow.initial_state();
    cpu += std::chrono::duration<double>(Clock::now() - start).count();
  }
  record(state);
  for (int m = 0; m < steps; ++m) {
    try {
      const auto start = Clock::now();
      FlowState next = flow.step(state);
      cpu += std::chrono::duration<double>(Clock::now() - start).count();
      state = std::move(next);
      record(state);
    } catch (const Error& e) {
      if (!is_pinch_off(e.kind()) && e.kind() != ErrorKind::DegenerateTriangle) throw;
      result.pinched = true;
      result.t_pinch = (m + 1) * flow.config().tau;
      result.pinch_reason = e.what();
      break;
    }
  }
  result.final_state = std::move(state);
  result.cpu_s = cpu;
  return result;
}

}  // namespace pmcf

#endif  // PMCF_EVOLUTION_HPP
