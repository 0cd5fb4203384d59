#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "pwls/geometry.hpp"

namespace pwls {

struct Element {
  int index = 0;
  Box bounds;
  Vec3 center = Vec3::Zero();
};

enum class FaceKind { interior, boundary };

struct Face {
  int id = 0;
  FaceKind kind = FaceKind::boundary;
  int owner = 0;
  std::optional<int> neighbor;  // set for interior faces only, owner < neighbor
  Vec3 normal = Vec3::Zero();   // outward from owner
  int axis = 0;                 // normal is +-e_axis
  std::array<Vec3, 4> corners;
  double area = 0.0;
};

// Uniform n x n x n partition of a cubic box.
//
// Enumeration (stable across runs):
//  * elements: index = (i*n + j)*n + k for grid coordinates (i,j,k) along
//    (x,y,z);
//  * vertices: same lexicographic order on the (n+1)^3 lattice;
//  * interior faces: by normal axis (x, y, z), then by the grid coordinates of
//    the owner element; the neighbour is the element one step further along
//    the axis, hence owner < neighbor;
//  * boundary faces: by normal axis, then min side before max side, then by
//    the in-plane grid position. Boundary ids continue after interior ids.
class Mesh {
 public:
  Mesh(const Box& box, int n) : box_(box), n_(n) {
    if (n < 1) throw Error("mesh: subdivision count must be >= 1");
    if (!box.non_degenerate()) throw Error("mesh: box is degenerate");
    const Vec3 ext = box.extent();
    const double scale = ext.maxCoeff();
    if (std::abs(ext.x() - ext.y()) > 1e-12 * scale ||
        std::abs(ext.x() - ext.z()) > 1e-12 * scale) {
      throw Error("mesh: only cubic boxes are supported (extents must agree)");
    }
    h_ = ext.x() / n;
    build();
  }

  const Box& box() const { return box_; }
  int subdivisions() const { return n_; }
  double h() const { return h_; }
  int num_elements() const { return static_cast<int>(elements_.size()); }

  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Face>& interior_faces() const { return interior_; }
  const std::vector<Face>& boundary_faces() const { return boundary_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }

  int element_index(int i, int j, int k) const { return (i * n_ + j) * n_ + k; }

  Vec3 lattice_point(int i, int j, int k) const {
    return box_.min_corner + h_ * Vec3(i, j, k);
  }

  // Element containing x; points on shared faces go to the lower grid cell
  // along each axis unless they lie on the upper box boundary.
  int locate(const Vec3& x) const {
    std::array<int, 3> g{};
    for (int a = 0; a < 3; ++a) {
      const double t = (x[a] - box_.min_corner[a]) / h_;
      int c = static_cast<int>(std::floor(t));
      g[a] = std::clamp(c, 0, n_ - 1);
    }
    return element_index(g[0], g[1], g[2]);
  }

 private:
  void build() {
    const int n = n_;
    elements_.reserve(static_cast<size_t>(n) * n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Element e;
          e.index = element_index(i, j, k);
          e.bounds.min_corner = lattice_point(i, j, k);
          e.bounds.max_corner = lattice_point(i + 1, j + 1, k + 1);
          e.center = e.bounds.center();
          elements_.push_back(e);
        }

    vertices_.reserve(static_cast<size_t>(n + 1) * (n + 1) * (n + 1));
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) vertices_.push_back(lattice_point(i, j, k));

    int next_id = 0;
    for (int axis = 0; axis < 3; ++axis) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) {
            std::array<int, 3> g{i, j, k};
            if (g[axis] == n - 1) continue;
            std::array<int, 3> nb = g;
            nb[axis] += 1;
            Face f = make_face(g, axis, /*upper=*/true);
            f.id = next_id++;
            f.kind = FaceKind::interior;
            f.neighbor = element_index(nb[0], nb[1], nb[2]);
            interior_.push_back(f);
          }
    }

    for (int axis = 0; axis < 3; ++axis) {
      const int a1 = (axis + 1) % 3;
      const int a2 = (axis + 2) % 3;
      for (int side = 0; side < 2; ++side) {
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) {
            std::array<int, 3> g{};
            g[axis] = side == 0 ? 0 : n - 1;
            g[std::min(a1, a2)] = u;
            g[std::max(a1, a2)] = v;
            Face f = make_face(g, axis, side == 1);
            f.id = next_id++;
            f.kind = FaceKind::boundary;
            boundary_.push_back(f);
          }
      }
    }
  }

  Face make_face(const std::array<int, 3>& g, int axis, bool upper) const {
    Face f;
    f.owner = element_index(g[0], g[1], g[2]);
    f.axis = axis;
    f.normal = Vec3::Zero();
    f.normal[axis] = upper ? 1.0 : -1.0;
    const Box& eb = elements_[f.owner].bounds;
    const double plane = upper ? eb.max_corner[axis] : eb.min_corner[axis];
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    const std::array<std::pair<int, int>, 4> pattern{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    for (int c = 0; c < 4; ++c) {
      Vec3 p;
      p[axis] = plane;
      p[a1] = pattern[c].first ? eb.max_corner[a1] : eb.min_corner[a1];
      p[a2] = pattern[c].second ? eb.max_corner[a2] : eb.min_corner[a2];
      f.corners[c] = p;
    }
    f.area = h_ * h_;
    return f;
  }

  Box box_;
  int n_;
  double h_ = 0.0;
  std::vector<Element> elements_;
  std::vector<Face> interior_;
  std::vector<Face> boundary_;
  std::vector<Vec3> vertices_;
};

inline Mesh build_uniform_mesh(const Box& box, int n) { return Mesh(box, n); }

inline const std::vector<Vec3>& mesh_vertices(const Mesh& mesh) { return mesh.vertices(); }

}  // namespace pwls
