#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "pmcf/fe_space.hpp"
#include "pmcf/quadrature.hpp"
#include "pmcf/reference_element.hpp"

using namespace pmcf;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// mean of l0^a l1^b l2^c over a triangle: 2 a! b! c! / (a + b + c + 2)!
double monomial_mean(int a, int b, int c) {
  return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

FeSpace sphere_space(int level, int k) { return FeSpace(ReferenceSurface::unit_sphere(), build_icosphere(level), k); }

double lifted_area(const FeSpace& s, GeometryMode mode, int deg = 8) {
  const ElementQuadrature& q = s.quadrature(mode, deg);
  double a = 0;
  for (const PointData& pd : q.data) a += pd.weight;
  return a;
}

}  // namespace

TEST(Quadrature, ExactForMonomialsUpToDegree) {
  for (int deg = 1; deg <= 8; ++deg) {
    const QuadratureRule r = quadrature_rule(deg);
    EXPECT_GE(r.degree, deg);
    double wsum = 0;
    for (const auto& p : r.points) {
      EXPECT_GT(p.weight, 0.0);
      for (double l : p.lambda) EXPECT_GE(l, 0.0);
      wsum += p.weight;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-15);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        for (int c = 0; a + b + c <= deg; ++c) {
          double s = 0;
          for (const auto& p : r.points) {
            s += p.weight * std::pow(p.lambda[0], a) * std::pow(p.lambda[1], b) * std::pow(p.lambda[2], c);
          }
          EXPECT_NEAR(s, monomial_mean(a, b, c), 1e-14) << "degree " << deg << " monomial " << a << b << c;
        }
  }
}

TEST(Quadrature, UnsupportedDegree) {
  for (int d : {0, 9, -3}) {
    try {
      quadrature_rule(d);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UnsupportedDegree);
    }
  }
}

TEST(Quadrature, CentroidRuleDegreeOne) {
  const QuadratureRule r = quadrature_rule(1);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_DOUBLE_EQ(r.points[0].lambda[0], 1.0 / 3.0);
}

class ElementOrder : public ::testing::TestWithParam<int> {};

TEST_P(ElementOrder, LagrangePropertyAndPartitionOfUnity) {
  const ReferenceElement el(GetParam());
  for (int i = 0; i < el.num_nodes(); ++i) {
    const auto v = el.values(el.node(i));
    for (int j = 0; j < el.num_nodes(); ++j) EXPECT_NEAR(v[j], i == j ? 1.0 : 0.0, 1e-15);
  }
  for (const auto& p : quadrature_rule(8).points) {
    const auto v = el.values(p.lambda);
    EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-15);
    // gradients of the partition of unity vanish along the simplex
    Vec3 g = Vec3::Zero();
    for (const Vec3& b : el.barycentric_gradients(p.lambda)) g += b;
    EXPECT_NEAR(g[1] - g[0], 0.0, 1e-14);
    EXPECT_NEAR(g[2] - g[0], 0.0, 1e-14);
  }
}

INSTANTIATE_TEST_SUITE_P(Orders, ElementOrder, ::testing::Values(1, 2));

TEST(FacetGradient, LinearFunctionRecovered) {
  const std::array<Vec3, 3> v = {Vec3(0.1, 0, 0), Vec3(1, 0.2, 0.1), Vec3(0.3, 1, -0.2)};
  const Vec3 a(0.7, -1.3, 2.1);
  const ReferenceElement el(1);
  const auto g = facet_tangential_gradient(v, el.barycentric_gradients({1. / 3, 1. / 3, 1. / 3}));
  Vec3 grad = Vec3::Zero();
  for (int i = 0; i < 3; ++i) grad += a.dot(v[i]) * g[i];
  const Vec3 n = (v[1] - v[0]).cross(v[2] - v[0]).normalized();
  EXPECT_LT((grad - tangential_projection(n) * a).norm(), 1e-14);
}

TEST(FacetGradient, DegenerateTriangle) {
  const std::array<Vec3, 3> v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  try {
    facet_tangential_gradient(v, ReferenceElement(1).barycentric_gradients({1. / 3, 1. / 3, 1. / 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTriangle);
  }
}

TEST(Lift, GradientTangentToSphereAndRatioPositive) {
  const auto s = ReferenceSurface::unit_sphere();
  const Vec3 n_h = Vec3(0.1, 0.2, 1).normalized();
  const Vec3 q = 0.97 * Vec3(0.05, 0.1, 1).normalized();
  const LiftData l = lift_point(s, q, n_h);
  const Mat3 H = s.distance_hessian(l.p, l.d);
  const Vec3 g = lift_gradient(tangential_projection(n_h) * Vec3(1, -2, 0.5), l, H);
  EXPECT_LT(std::abs(g.dot(l.mu)), 1e-14);
  EXPECT_GT(measure_ratio(l, H), 0.0);
}

TEST(Lift, SingularTransformWhenNormalsNearlyOrthogonal) {
  const auto s = ReferenceSurface::unit_sphere();
  const LiftData l = lift_point(s, Vec3(0, 0, 0.95), Vec3(1, 0, 0));
  try {
    measure_ratio(l, s.distance_hessian(l.p, l.d));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularTransform);
  }
}

TEST(Lift, MeasureRatioIsOneOnTangentFacet) {
  const auto s = ReferenceSurface::unit_sphere();
  const LiftData l = lift_point(s, Vec3(0, 0, 1), Vec3(0, 0, 1));
  EXPECT_NEAR(measure_ratio(l, s.distance_hessian(l.p, l.d)), 1.0, 1e-15);
}

// The lifted geometry is the exact sphere, so only quadrature error remains:
// it decays fast until round-off takes over.
TEST(FeSpace, LiftedAreaIsExactSphereArea) {
  double prev_err = 0;
  for (int level = 1; level <= 4; ++level) {
    const FeSpace s = sphere_space(level, 2);
    const double err = std::abs(lifted_area(s, GeometryMode::Lifted) - 4 * M_PI) / (4 * M_PI);
    EXPECT_LE(err, 1e-4);
    if (level == 2) EXPECT_LT(err, prev_err);
    if (level >= 3) EXPECT_LE(err, 1e-12);
    prev_err = err;
  }
}

TEST(FeSpace, MeasureRatioDeviationIsSecondOrder) {
  std::vector<double> dev;
  for (int level = 2; level <= 4; ++level) {
    const FeSpace s = sphere_space(level, 2);
    const ElementQuadrature& q = s.quadrature(GeometryMode::Lifted, 4);
    double d = 0;
    for (int t = 0; t < s.mesh().num_triangles(); ++t)
      for (int i = 0; i < q.points_per_element; ++i) {
        const double w_flat = s.mesh().facet_area(t) * quadrature_rule(4).points[i].weight;
        d = std::max(d, std::abs(q.at(t, i).weight / w_flat - 1.0));
      }
    dev.push_back(d);
  }
  EXPECT_NEAR(dev[0] / dev[1], 4.0, 0.5);
  EXPECT_NEAR(dev[1] / dev[2], 4.0, 0.5);
}

TEST(FeSpace, GradientsOrthogonalToIntegrationNormal) {
  const FeSpace s = sphere_space(2, 2);
  for (GeometryMode mode : {GeometryMode::Lifted, GeometryMode::Simplified}) {
    const ElementQuadrature& q = s.quadrature(mode, 4);
    for (const PointData& pd : q.data)
      for (int i = 0; i < 6; ++i) EXPECT_LT(std::abs(pd.grad[i].dot(pd.mu)), 1e-12);
  }
}

TEST(Interpolate, ConstantsAndLiftedNodes) {
  const FeSpace s = sphere_space(1, 2);
  const FeVectorField c = interpolate([](const Vec3&) { return Vec3(1, 2, 3); }, s);
  for (int i = 0; i < c.num_dofs(); ++i) EXPECT_EQ(c.node(i), Vec3(1, 2, 3));
  const FeVectorField id = interpolate([](const Vec3& p) { return p; }, s);
  for (int i = 0; i < id.num_dofs(); ++i) EXPECT_NEAR(id.node(i).norm(), 1.0, 1e-15);
  const auto [v, g] = evaluate_field(c, s, 3, {0.2, 0.3, 0.5}, GeometryMode::Lifted);
  EXPECT_LT((v - Vec3(1, 2, 3)).norm(), 1e-14);
  EXPECT_LT(g.norm(), 1e-13);
}

TEST(Interpolate, L2ErrorOrderThreeForP2) {
  auto f = [](const Vec3& p) { return Vec3(p[0] * p[1] * p[2], 0, 0); };
  std::vector<double> err, h;
  for (int level = 2; level <= 4; ++level) {
    const FeSpace s = sphere_space(level, 2);
    const FeVectorField u = interpolate(f, s);
    const ElementQuadrature& q = s.quadrature(GeometryMode::Lifted, 8);
    double e = 0;
    for (int t = 0; t < s.mesh().num_triangles(); ++t) {
      const auto dofs = s.dofs(t);
      for (int i = 0; i < q.points_per_element; ++i) {
        const PointData& pd = q.at(t, i);
        e += pd.weight * (evaluate_at(u, dofs, pd).first - f(pd.p)).squaredNorm();
      }
    }
    err.push_back(std::sqrt(e));
    h.push_back(s.mesh().h_max());
  }
  for (int i = 0; i < 2; ++i) {
    const double rate = std::log(err[i] / err[i + 1]) / std::log(h[i] / h[i + 1]);
    EXPECT_NEAR(rate, 3.0, 0.3);
  }
}

TEST(EvaluateField, LagrangeNodeReturnsCoefficient) {
  const FeSpace s = sphere_space(1, 2);
  const FeVectorField u = interpolate([](const Vec3& p) { return Vec3(p[0] * p[0], p[1], -p[2]); }, s);
  const ReferenceElement& el = s.element();
  for (int t = 0; t < 5; ++t) {
    const auto dofs = s.dofs(t);
    for (int i = 0; i < 6; ++i) {
      const auto [v, g] = evaluate_field(u, s, t, el.node(i), GeometryMode::Simplified);
      EXPECT_LT((v - u.node(dofs[i])).norm(), 1e-14);
    }
  }
}

TEST(EvaluateField, IdentityGradientApproachesProjection) {
  std::vector<double> err;
  for (int level = 2; level <= 4; ++level) {
    const FeSpace s = sphere_space(level, 2);
    const FeVectorField id = interpolate([](const Vec3& p) { return p; }, s);
    const ElementQuadrature& q = s.quadrature(GeometryMode::Lifted, 4);
    double e = 0;
    for (int t = 0; t < s.mesh().num_triangles(); ++t) {
      const auto dofs = s.dofs(t);
      for (int i = 0; i < q.points_per_element; ++i) {
        const PointData& pd = q.at(t, i);
        e = std::max(e, (evaluate_at(id, dofs, pd).second - tangential_projection(pd.p)).norm());
      }
    }
    err.push_back(e);
  }
  EXPECT_GT(err[0] / err[1], 3.0);
  EXPECT_GT(err[1] / err[2], 3.0);
}

TEST(InitialEmbedding, DumbbellNodesOnLevelSet) {
  const FeSpace s = sphere_space(2, 2);
  const DumbbellLevelSet db;
  const FeVectorField x = initial_embedding([&](const Vec3& p) { return db.value(p); }, s);
  for (int i = 0; i < x.num_dofs(); ++i) {
    EXPECT_LT(std::abs(db.value(x.node(i))), 1e-13);
    EXPECT_GT(x.node(i).dot(s.lifted_nodes()[i]), 0.0);
  }
}

