#ifndef PMCF_TYPES_HPP
#define PMCF_TYPES_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pmcf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class ErrorKind {
  PointOutsideBand,
  NoConvergence,
  DegenerateGradient,
  RootNotBracketed,
  UnsupportedDegree,
  DegenerateTriangle,
  SingularTransform,
  DegenerateMetric,
  ZeroAverage,
  InvalidParameter,
  SolverDiverged,
  PastExtinction,
  InvalidSequence,
  IoError,
  InvalidConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PointOutsideBand: return "PointOutsideBand";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorKind::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::DegenerateMetric: return "DegenerateMetric";
    case ErrorKind::ZeroAverage: return "ZeroAverage";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::PastExtinction: return "PastExtinction";
    case ErrorKind::InvalidSequence: return "InvalidSequence";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Library-wide exception; `kind()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Geometric degeneracy of the evolving surface. Raised for collapsed
/// metrics and folded elements alike; the driver reports it as pinch-off.
inline bool is_pinch_off(ErrorKind kind) {
  return kind == ErrorKind::DegenerateMetric || kind == ErrorKind::ZeroAverage;
}

inline Mat3 outer(const Vec3& a, const Vec3& b) { return a * b.transpose(); }

inline Mat3 tangential_projection(const Vec3& n) { return Mat3::Identity() - outer(n, n); }

}  // namespace pmcf

#endif  // PMCF_TYPES_HPP
