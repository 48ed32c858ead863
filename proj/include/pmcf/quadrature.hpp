#ifndef PMCF_QUADRATURE_HPP
#define PMCF_QUADRATURE_HPP

#include <array>
#include <string>
#include <vector>

#include "pmcf/types.hpp"

namespace pmcf {

using Barycentric = std::array<double, 3>;

struct QuadraturePoint {
  Barycentric lambda;
  double weight;  // weights sum to 1
};

/// Symmetric rule on the reference triangle. Integrals over a triangle of
/// area |T| are |T| * sum_q w_q f(lambda_q).
struct QuadratureRule {
  int degree = 0;
  std::vector<QuadraturePoint> points;
};

namespace detail {

inline void add_centroid(QuadratureRule& r, double w) {
  r.points.push_back({{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, w});
}

inline void add_orbit3(QuadratureRule& r, double w, double a) {
  const double b = 1.0 - 2.0 * a;
  r.points.push_back({{a, a, b}, w});
  r.points.push_back({{a, b, a}, w});
  r.points.push_back({{b, a, a}, w});
}

inline void add_orbit6(QuadratureRule& r, double w, double a, double b) {
  const double c = 1.0 - a - b;
  r.points.push_back({{a, b, c}, w});
  r.points.push_back({{a, c, b}, w});
  r.points.push_back({{b, a, c}, w});
  r.points.push_back({{b, c, a}, w});
  r.points.push_back({{c, a, b}, w});
  r.points.push_back({{c, b, a}, w});
}

}  // namespace detail

/// Positive-weight symmetric rule exact at least to `degree` (1..8).
/// Degrees 3 and 7 use the next rule up, since the classical rules of
/// exactly those degrees carry a negative weight.
inline QuadratureRule quadrature_rule(int degree) {
  QuadratureRule r;
  switch (degree) {
    case 1:
      r.degree = 1;
      detail::add_centroid(r, 1.0);
      break;
    case 2:
      r.degree = 2;
      r.points = {{{0.5, 0.5, 0.0}, 1.0 / 3.0}, {{0.0, 0.5, 0.5}, 1.0 / 3.0}, {{0.5, 0.0, 0.5}, 1.0 / 3.0}};
      break;
    case 3:
    case 4:
      r.degree = 4;
      detail::add_orbit3(r, 0.22338158967801146570, 0.44594849091596488632);
      detail::add_orbit3(r, 0.10995174365532186764, 0.09157621350977074346);
      break;
    case 5:
      r.degree = 5;
      detail::add_centroid(r, 0.225);
      detail::add_orbit3(r, 0.13239415278850618074, 0.47014206410511508977);
      detail::add_orbit3(r, 0.12593918054482715260, 0.10128650732345633880);
      break;
    case 6:
      r.degree = 6;
      detail::add_orbit3(r, 0.11678627572637936603, 0.24928674517091042129);
      detail::add_orbit3(r, 0.050844906370206816921, 0.06308901449150222834);
      detail::add_orbit6(r, 0.082851075618373575194, 0.053145049844816947353, 0.31035245103378440542);
      break;
    case 7:
    case 8:
      r.degree = 8;
      detail::add_centroid(r, 0.14431560767778716825);
      detail::add_orbit3(r, 0.095091634267284624794, 0.45929258829272315603);
      detail::add_orbit3(r, 0.10321737053471825028, 0.17056930775176020662);
      detail::add_orbit3(r, 0.032458497623198080311, 0.050547228317030975458);
      detail::add_orbit6(r, 0.027230314174434994265, 0.0083947774099576053372, 0.26311282963463811342);
      break;
    default:
      throw Error(ErrorKind::UnsupportedDegree, "quadrature degree " + std::to_string(degree));
  }
  return r;
}

}  // namespace pmcf

#endif  // PMCF_QUADRATURE_HPP
