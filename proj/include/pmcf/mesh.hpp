#ifndef PMCF_MESH_HPP
#define PMCF_MESH_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "pmcf/types.hpp"

namespace pmcf {

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;  // sorted vertex pair

/// Closed triangulated polyhedron M_h with vertices on the reference surface.
///
/// Local edge e of a triangle joins local vertices e and (e + 1) % 3. Degrees
/// of freedom are numbered vertices first, then edges (k = 2).
class PolyhedralMesh {
 public:
  PolyhedralMesh() = default;
  PolyhedralMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
      : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    build_edges();
  }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Global index of local edge e of triangle t.
  int triangle_edge(int t, int e) const { return triangle_edges_[t][e]; }

  int num_dofs(int k) const { return k == 1 ? num_vertices() : num_vertices() + num_edges(); }

  /// Global DoF indices of the order-k nodes of triangle t.
  std::vector<int> node_table(int t, int k) const {
    const Triangle& tri = triangles_[t];
    std::vector<int> nodes(tri.begin(), tri.end());
    if (k == 2) {
      for (int e = 0; e < 3; ++e) nodes.push_back(num_vertices() + triangle_edges_[t][e]);
    }
    return nodes;
  }

  /// Positions of all order-k nodes on M_h (vertices, then edge midpoints).
  std::vector<Vec3> node_positions(int k) const {
    std::vector<Vec3> pos = vertices_;
    if (k == 2) {
      for (const Edge& e : edges_) pos.push_back(0.5 * (vertices_[e[0]] + vertices_[e[1]]));
    }
    return pos;
  }

  Vec3 facet_normal(int t) const {
    const Triangle& tri = triangles_[t];
    const Vec3 n = (vertices_[tri[1]] - vertices_[tri[0]]).cross(vertices_[tri[2]] - vertices_[tri[0]]);
    return n.normalized();
  }

  double facet_area(int t) const {
    const Triangle& tri = triangles_[t];
    return 0.5 * (vertices_[tri[1]] - vertices_[tri[0]]).cross(vertices_[tri[2]] - vertices_[tri[0]]).norm();
  }

  /// Largest facet diameter.
  double h_max() const {
    double h = 0.0;
    for (const Edge& e : edges_) h = std::max(h, (vertices_[e[0]] - vertices_[e[1]]).norm());
    return h;
  }

  /// Number of triangles adjacent to each edge.
  std::vector<int> edge_valence() const {
    std::vector<int> count(edges_.size(), 0);
    for (const auto& te : triangle_edges_) {
      for (int e : te) ++count[e];
    }
    return count;
  }

  int euler_characteristic() const { return num_vertices() - num_edges() + num_triangles(); }

 private:
  void build_edges() {
    std::map<std::pair<int, int>, int> index;
    triangle_edges_.assign(triangles_.size(), {0, 0, 0});
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      for (int e = 0; e < 3; ++e) {
        int a = triangles_[t][e];
        int b = triangles_[t][(e + 1) % 3];
        if (a > b) std::swap(a, b);
        auto [it, inserted] = index.try_emplace({a, b}, static_cast<int>(edges_.size()));
        if (inserted) edges_.push_back({a, b});
        triangle_edges_[t][e] = it->second;
      }
    }
  }

  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
};

/// Regular icosahedron refined `level` times by 4-to-1 splitting, with every
/// vertex projected radially onto the unit sphere.
inline PolyhedralMesh build_icosphere(int level) {
  if (level < 0 || level > 8) throw Error(ErrorKind::InvalidParameter, "icosphere level must be in [0, 8]");
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Triangle> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((0.5 * (v[a] + v[b])).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Triangle> refined;
    refined.reserve(4 * f.size());
    for (const Triangle& t : f) {
      const int a = mid(t[0], t[1]);
      const int b = mid(t[1], t[2]);
      const int c = mid(t[2], t[0]);
      refined.push_back({t[0], a, c});
      refined.push_back({t[1], b, a});
      refined.push_back({t[2], c, b});
      refined.push_back({a, b, c});
    }
    f = std::move(refined);
  }
  return PolyhedralMesh(std::move(v), std::move(f));
}

}  // namespace pmcf

#endif  // PMCF_MESH_HPP
