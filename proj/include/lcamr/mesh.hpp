#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "lcamr/errors.hpp"

namespace lcamr {

/// Exact boundary curve of the domain plus the rule that snaps new edge
/// midpoints created by refinement back onto it.
struct BoundaryDescriptor {
  enum class Kind { polygon, ellipse };
  Kind kind = Kind::polygon;
  double a = 1.0;  // ellipse semi-axes (a >= b)
  double b = 1.0;

  static BoundaryDescriptor polygon() { return {}; }
  static BoundaryDescriptor ellipse(double a, double b);

  /// Maps a point near the boundary onto the exact boundary curve. Identity
  /// for polygons; radial scaling onto the ellipse otherwise. Projection of a
  /// point already on the curve is the identity to machine precision.
  Eigen::Vector2d project(const Eigen::Vector2d& p) const;
};

struct Element {
  std::array<int, 4> v;  // corner vertex ids, counter-clockwise
  int parent = -1;       // element id in the mesh this one was refined from
  int child_index = -1;  // 0..3 sub-quad position within parent, -1 if copied
  int level = 0;
  std::array<bool, 4> boundary_side{};  // side s runs v[s] -> v[(s+1)%4]
};

/// Facet of the active mesh: a full conforming edge, half of a hanging edge,
/// or a boundary edge. Direction v0 -> v1 follows elem[0]'s side orientation;
/// `normal` is the fixed edge normal eta_E pointing out of elem[0].
struct Edge {
  int v0 = -1, v1 = -1;
  std::array<int, 2> elem{-1, -1};
  std::array<int, 2> side{-1, -1};
  bool boundary = false;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
};

struct HangingNode {
  int node;               // constrained vertex (midpoint of the coarse side)
  int master0, master1;   // coarse side endpoints, in coarse CCW order
  int coarse_elem = -1;
  int coarse_side = -1;
  std::array<int, 2> fine_elems{-1, -1};  // [0] touches master0's half
};

struct QualityReport {
  double max_h = 0.0;                  // max element diameter
  double min_inscribed_diameter = 0.0;
  double min_h_ratio = 0.0;            // min/max of h_T/h_E over (T,E) pairs
  double max_h_ratio = 0.0;
  double min_corner_angle = 0.0;       // radians
  double min_jacobian = 0.0;           // over a 3x3 reference probe grid
  bool ok() const;
};

class Mesh {
 public:
  std::vector<Eigen::Vector2d> vertices;
  std::vector<Element> elements;
  std::vector<Edge> edges;
  std::vector<HangingNode> hanging;
  std::vector<std::vector<int>> element_edges;  // facet ids per element
  BoundaryDescriptor boundary;
  std::uint64_t id = 0;         // identity used by transfer nesting checks
  std::uint64_t parent_id = 0;  // 0 when this mesh was built from scratch

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  Eigen::Matrix<double, 2, 4> corners(int elem) const;
  double element_diameter(int elem) const;  // h_T
  double element_area(int elem) const;      // via quadrature of det J
  double edge_length(int edge) const;       // h_E

  /// Rebuilds edges/hanging/element_edges from vertices+elements. The map
  /// carries midpoint vertex ids keyed by packed undirected vertex pairs of
  /// split sides (old hanging masters and midpoints created by refinement).
  void rebuild_topology(const std::unordered_map<std::uint64_t, int>& midpoints);

  static std::uint64_t next_id();
};

inline std::uint64_t pack_pair(int a, int b) {
  const std::uint64_t lo = static_cast<std::uint32_t>(a < b ? a : b);
  const std::uint64_t hi = static_cast<std::uint32_t>(a < b ? b : a);
  return (hi << 32) | lo;
}

Mesh build_uniform_grid(int nx, int ny, const Eigen::Vector2d& lo,
                        const Eigen::Vector2d& hi);

/// Square-core-plus-rings generator mapped to the ellipse (x/a)^2+(y/b)^2=1.
/// The achieved element count is ncore^2 + 4*ncore*nrings for the best
/// (ncore, nrings) fit; throws ConstructionError when no fit lands within
/// 15% of `target_elements`.
Mesh build_ellipse_mesh(double a, double b, int target_elements);

/// Splits flagged elements 4-way, extends the flag set until the one-hanging-
/// node-per-edge (2:1) balance holds, snaps new boundary midpoints with the
/// descriptor, and records parent links for intergrid transfer.
Mesh refine(const Mesh& mesh, const std::vector<bool>& flags,
            const BoundaryDescriptor& boundary);

QualityReport quality_report(const Mesh& mesh);

}  // namespace lcamr
