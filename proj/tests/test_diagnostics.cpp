#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pmcf/diagnostics.hpp"
#include "pmcf/io.hpp"

using namespace pmcf;

namespace {

FeSpace sphere_space(int level, int k = 2) {
  return FeSpace(ReferenceSurface::unit_sphere(), build_icosphere(level), k);
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pmcf_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

FeVectorField from_points(const std::vector<Vec3>& pts) {
  FeVectorField x;
  x.k = 1;
  x.coeffs.resize(static_cast<int>(pts.size()), 3);
  for (int i = 0; i < x.num_dofs(); ++i) x.set_node(i, pts[i]);
  return x;
}

}  // namespace

TEST(ExactSphere, Radius) {
  EXPECT_DOUBLE_EQ(sphere_radius(2.0, 0.0), 2.0);
  EXPECT_NEAR(sphere_radius(2.0, 0.6), 1.264911064067352, 1e-15);
  EXPECT_LT(sphere_radius(2.0, 1.0 - 1e-12), 1e-5);
  try {
    sphere_radius(2.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PastExtinction);
  }
  const ExactEmbedding x = exact_sphere(2.0, 0.6);
  const Vec3 p(0, 0.6, 0.8);
  EXPECT_LT((x.value(p) - std::sqrt(1.6) * p).norm(), 1e-15);
  EXPECT_LT((x.gradient(p) - std::sqrt(1.6) * tangential_projection(p)).norm(), 1e-15);
}

// inputs are rounded to 4 digits, which moves the rate by up to ~5e-3
TEST(Eoc, KnownValues) {
  EXPECT_NEAR(eoc({8.179e-5, 3.195e-6}, {3.298e-1, 1.630e-1})[0], 4.607, 1e-2);
  EXPECT_NEAR(eoc({2.232e-9, 2.640e-11}, {1.630e-1, 8.407e-2})[0], 6.703, 1e-2);
  EXPECT_NEAR(eoc({1.0, 0.5}, {0.2, 0.1})[0], 1.0, 1e-15);
  EXPECT_EQ(eoc({1.0}, {0.3}).size(), 0u);
}

TEST(Eoc, InvalidSequences) {
  for (auto [e, h] : {std::pair<std::vector<double>, std::vector<double>>{{1, 2}, {0.1}},
                      {{1, 0.5}, {0.1, 0.2}},
                      {{1, -0.5}, {0.2, 0.1}},
                      {{}, {}}}) {
    try {
      eoc(e, h);
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.kind(), ErrorKind::InvalidSequence);
    }
  }
}

TEST(SigmaMax, ReferenceTriangles) {
  EXPECT_NEAR(triangle_aspect({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}), 2 * std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(triangle_aspect({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), std::sqrt(2.0) / ((2 - std::sqrt(2.0)) / 2), 1e-13);
}

TEST(SigmaMax, NeedleTriangles) {
  double prev = 0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double s = triangle_aspect({0, 0, 0}, {1, 0, 0}, {0.5, eps, 0});
    EXPECT_GT(s, prev);
    prev = s;
  }
  try {
    const double s = triangle_aspect({0, 0, 0}, {1, 0, 0}, {0.5, 1e-9, 0});
    EXPECT_GT(s, 1e6);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTriangle);
  }
  EXPECT_THROW(triangle_aspect({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), Error);
}

TEST(SigmaMax, MeshMaximum) {
  const PolyhedralMesh m = build_icosphere(0);
  const FeVectorField x = from_points(m.vertices());
  EXPECT_NEAR(sigma_max(x, m), 2 * std::sqrt(3.0), 1e-12);  // regular icosahedron
}

TEST(SurfaceArea, IcosahedronP1MatchesFlatSum) {
  const FeSpace s = sphere_space(0, 1);
  const FeVectorField x = interpolate([](const Vec3& p) { return p; }, s);
  double flat = 0;
  for (int t = 0; t < s.mesh().num_triangles(); ++t) flat += s.mesh().facet_area(t);
  EXPECT_NEAR(surface_area(x, s, 8), flat, 1e-12);
  EXPECT_NEAR(flat_surface_area(x, s.mesh()), flat, 1e-12);
  // circumradius 1: area 20 * (sqrt 3 / 4) a^2 with a = 4 / sqrt(10 + 2 sqrt 5)
  const double a = 4.0 / std::sqrt(10 + 2 * std::sqrt(5.0));
  EXPECT_NEAR(flat, 5 * std::sqrt(3.0) * a * a, 1e-12);
}

TEST(SurfaceArea, CurvedP2SphereAndScaling) {
  const FeSpace s = sphere_space(4, 2);
  const double R = 1.7;
  const FeVectorField x = interpolate([R](const Vec3& p) { return R * p; }, s);
  const double a = surface_area(x, s, 8);
  EXPECT_LE(std::abs(a / (4 * M_PI * R * R) - 1), 1e-4);
  FeVectorField x2 = x;
  x2.coeffs *= 2.0;
  EXPECT_NEAR(surface_area(x2, s, 8), 4 * a, 1e-12 * a);
}

TEST(RelativeErrors, InterpolantRates) {
  const ExactEmbedding ex = exact_sphere(2.0, 0.1);
  std::vector<double> e1, e2, e3, h;
  for (int level = 2; level <= 4; ++level) {
    const FeSpace s = sphere_space(level);
    const FeVectorField x = interpolate(ex.value, s);
    const ErrorParts p = relative_errors(s, x, ex, GeometryMode::Lifted, 8);
    e1.push_back(p.e1());
    e2.push_back(p.e2());
    e3.push_back(p.e3());
    h.push_back(s.mesh().h_max());
  }
  for (double r : eoc(e1, h)) EXPECT_NEAR(r, 6.0, 0.5);
  for (double r : eoc(e2, h)) EXPECT_NEAR(r, 4.0, 0.5);
  for (double r : eoc(e3, h)) EXPECT_NEAR(r, 4.0, 0.5);
}

TEST(RelativeErrors, H1PartsAddUpAndScaleInvariant) {
  const FeSpace s = sphere_space(2);
  const ExactEmbedding ex = exact_sphere(2.0, 0.0);
  FeVectorField x = interpolate([](const Vec3& p) { return Vec3(2.01 * p[0], 2 * p[1], 1.98 * p[2]); }, s);
  for (GeometryMode mode : {GeometryMode::Lifted, GeometryMode::Simplified}) {
    const ErrorParts p = relative_errors(s, x, ex, mode, 8);
    EXPECT_NEAR(p.e3(), (p.l2_num + p.semi_num) / (p.l2_den + p.semi_den), 1e-15);
    EXPECT_GE(p.e1(), 0.0);
    EXPECT_LE(p.e3(), std::max(p.e1(), p.e2()));
    EXPECT_GE(p.e3(), std::min(p.e1(), p.e2()));
    const ExactEmbedding ex2{[&](const Vec3& q) -> Vec3 { return 2.0 * ex.value(q); },
                             [&](const Vec3& q) -> Mat3 { return 2.0 * ex.gradient(q); }};
    FeVectorField x2 = x;
    x2.coeffs *= 2.0;
    const ErrorParts p2 = relative_errors(s, x2, ex2, mode, 8);
    EXPECT_NEAR(p2.e1(), p.e1(), 1e-14 * p.e1() + 1e-300);
    EXPECT_NEAR(p2.e2(), p.e2(), 1e-14 * p.e2());
  }
}

TEST(RelativeErrors, ModesAgreeToSecondOrder) {
  const ExactEmbedding ex = exact_sphere(2.0, 0.0);
  const FeSpace s = sphere_space(3);
  const FeVectorField x = interpolate(ex.value, s);
  const double l = relative_errors(s, x, ex, GeometryMode::Lifted, 8).e2();
  const double m = relative_errors(s, x, ex, GeometryMode::Simplified, 8).e2();
  EXPECT_LT(std::abs(l - m), 0.5 * std::max(l, m));
}

TEST(Csv, FormatIsDecimalWithTwelveDigits) {
  EXPECT_EQ(format_fixed(1.0), "1.00000000000");
  EXPECT_EQ(format_fixed(1.23456789012345e-9), "0.00000000123456789012");
  EXPECT_EQ(format_fixed(-12345.6789012345), "-12345.6789012");
  EXPECT_EQ(format_sci(8.17912e-5), "8.179e-05");
  for (double v : {3.7e-13, 2.5e8, 1.0 / 3.0}) {
    const std::string s = format_fixed(v);
    EXPECT_EQ(s.find('e'), std::string::npos);
    EXPECT_NEAR(std::stod(s), v, 1e-11 * std::abs(v));
  }
}

TEST(Csv, EmptyAndRoundTrip) {
  const auto dir = temp_dir("csv");
  write_csv(dir / "empty.csv", {});
  std::ifstream f(dir / "empty.csv");
  std::string header, extra;
  std::getline(f, header);
  EXPECT_EQ(header, "t,err_l2,err_h1semi,err_h1,sigma_max,area,cpu_s");
  EXPECT_FALSE(std::getline(f, extra));

  const std::vector<DiagnosticsRecord> recs = {{0.0, 1.5e-9, 2e-6, 1.9e-6, 3.46, 50.2, 0.0},
                                               {0.001, 1.6e-9, 2.1e-6, 2e-6, 3.47, 50.1, 0.125}};
  write_csv(dir / "two.csv", recs);
  const auto back = read_csv(dir / "two.csv");
  ASSERT_EQ(back.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(back[i].t, recs[i].t, 1e-12);
    EXPECT_NEAR(back[i].err_l2, recs[i].err_l2, 1e-12 * recs[i].err_l2);
    EXPECT_NEAR(back[i].area, recs[i].area, 1e-12 * recs[i].area);
    EXPECT_NEAR(back[i].cpu_s, recs[i].cpu_s, 1e-12);
  }
  std::ifstream g(dir / "two.csv");
  int lines = 0;
  for (std::string l; std::getline(g, l);) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST(Vtk, CountsMatchMesh) {
  const auto dir = temp_dir("vtk");
  const FeSpace s = sphere_space(2);
  const FeVectorField x = interpolate([](const Vec3& p) { return 2.0 * p; }, s);
  write_vtk(dir / snapshot_name(12), x, s.mesh(), 0.012);
  EXPECT_EQ(snapshot_name(12), "mesh_000012.vtk");
  std::ifstream f(dir / "mesh_000012.vtk");
  std::string line;
  int points = -1, polys = -1, size = -1;
  while (std::getline(f, line)) {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "POINTS") ss >> points;
    if (tag == "POLYGONS") ss >> polys >> size;
    if (tag == "DATASET") {
      std::string kind;
      ss >> kind;
      EXPECT_EQ(kind, "POLYDATA");
    }
  }
  EXPECT_EQ(points, s.mesh().num_vertices());
  EXPECT_EQ(polys, s.mesh().num_triangles());
  EXPECT_EQ(size, 4 * s.mesh().num_triangles());
}

TEST(Config, RoundTripAndOverrides) {
  RunConfig c;
  c.surface = InitialSurface::Dumbbell;
  c.alpha = 0.04;
  c.tau = 1e-4;
  c.T = 0.1;
  c.level = 4;
  c.scheme = Scheme::Euler;
  c.mode = GeometryMode::Simplified;
  c.out = "runs/x";
  std::istringstream in(config_text(c));
  const RunConfig back = parse_config(in);
  EXPECT_EQ(config_text(back), config_text(c));

  std::istringstream in2("# comment\n alpha = 0.5 \norder=1\n\nk=1\n");
  const RunConfig d = parse_config(in2);
  EXPECT_DOUBLE_EQ(d.alpha, 0.5);
  EXPECT_EQ(d.scheme, Scheme::Euler);
  EXPECT_EQ(d.k, 1);
}

TEST(Config, Errors) {
  for (const char* text : {"bogus=1\n", "alpha=abc\n", "level=2.5\n", "surface=torus\n", "no equals sign\n"}) {
    std::istringstream in(text);
    try {
      parse_config(in);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  }
  try {
    load_config("/nonexistent/pmcf.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Outputs, WriteOutputsCreatesFiles) {
  const auto dir = temp_dir("outputs");
  const FeSpace s = sphere_space(1);
  const FeVectorField x = interpolate([](const Vec3& p) { return p; }, s);
  write_outputs({{0, 0, 0, 0, 3.5, 12.5, 0}}, {{0, x}}, s.mesh(), dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "diagnostics.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "mesh_000000.vtk"));
}
