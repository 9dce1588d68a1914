#include "lcamr/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "lcamr/quadrature.hpp"
#include "lcamr/shapes.hpp"

namespace lcamr {

namespace {

inline Eigen::Vector2d rot_cw(const Eigen::Vector2d& t) {
  return {t.y(), -t.x()};
}

std::atomic<std::uint64_t> g_mesh_counter{1};

}  // namespace

std::uint64_t Mesh::next_id() { return g_mesh_counter.fetch_add(1); }

BoundaryDescriptor BoundaryDescriptor::ellipse(double a, double b) {
  if (!(a >= b && b > 0.0))
    throw InvalidGeometryError("BoundaryDescriptor::ellipse: need a >= b > 0");
  BoundaryDescriptor d;
  d.kind = Kind::ellipse;
  d.a = a;
  d.b = b;
  return d;
}

Eigen::Vector2d BoundaryDescriptor::project(const Eigen::Vector2d& p) const {
  if (kind == Kind::polygon) return p;
  const double r = std::hypot(p.x() / a, p.y() / b);
  if (r < 1e-14)
    throw InvalidGeometryError("ellipse projection undefined at the center");
  return p / r;
}

Eigen::Matrix<double, 2, 4> Mesh::corners(int e) const {
  Eigen::Matrix<double, 2, 4> c;
  for (int k = 0; k < 4; ++k) c.col(k) = vertices[elements[e].v[k]];
  return c;
}

double Mesh::element_diameter(int e) const {
  const auto c = corners(e);
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      d = std::max(d, (c.col(i) - c.col(j)).norm());
  return d;
}

double Mesh::element_area(int e) const {
  // det J is bilinear in (xi, eta); a 2x2 Gauss rule integrates it exactly.
  static const QuadratureRule rule = quadrature(2);
  const auto c = corners(e);
  double area = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    const ShapeValues s = shape_eval(ElementKind::Q1, rule.points[q]);
    const Eigen::Matrix2d J = c * s.grad;
    area += rule.weights[q] * J.determinant();
  }
  return area;
}

double Mesh::edge_length(int e) const {
  return (vertices[edges[e].v1] - vertices[edges[e].v0]).norm();
}

void Mesh::rebuild_topology(
    const std::unordered_map<std::uint64_t, int>& midpoints) {
  edges.clear();
  hanging.clear();
  element_edges.assign(elements.size(), {});

  struct SideRef {
    int elem, side;
  };
  // Directed side (u -> w) to its owning element; unique in a CCW mesh.
  std::unordered_map<std::uint64_t, SideRef> directed;
  auto dkey = [](int u, int w) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(w);
  };
  for (int e = 0; e < n_elements(); ++e) {
    for (int s = 0; s < 4; ++s) {
      const int u = elements[e].v[s], w = elements[e].v[(s + 1) % 4];
      auto [it, inserted] = directed.insert({dkey(u, w), SideRef{e, s}});
      if (!inserted)
        throw InvalidGeometryError("rebuild_topology: duplicate directed side");
    }
  }

  std::vector<std::array<bool, 4>> consumed(elements.size(),
                                            {false, false, false, false});
  for (auto& el : elements) el.boundary_side = {false, false, false, false};

  auto add_edge = [&](int u, int w, int e0, int s0, int e1, int s1,
                      bool is_boundary) {
    Edge ed;
    ed.v0 = u;
    ed.v1 = w;
    ed.elem = {e0, e1};
    ed.side = {s0, s1};
    ed.boundary = is_boundary;
    ed.normal = rot_cw((vertices[w] - vertices[u]).normalized());
    const int eid = static_cast<int>(edges.size());
    edges.push_back(ed);
    element_edges[e0].push_back(eid);
    if (e1 >= 0) element_edges[e1].push_back(eid);
  };

  // Pass A: conforming interior facets.
  for (int e = 0; e < n_elements(); ++e) {
    for (int s = 0; s < 4; ++s) {
      if (consumed[e][s]) continue;
      const int u = elements[e].v[s], w = elements[e].v[(s + 1) % 4];
      auto it = directed.find(dkey(w, u));
      if (it == directed.end()) continue;
      const SideRef other = it->second;
      consumed[e][s] = true;
      consumed[other.elem][other.side] = true;
      add_edge(u, w, e, s, other.elem, other.side, false);
    }
  }

  // Pass B: split sides -> two sub-facets plus a hanging record. Only the
  // coarse (full) side can trigger: the midpoint map never holds a key for a
  // fine sub-side of the current mesh.
  for (int e = 0; e < n_elements(); ++e) {
    for (int s = 0; s < 4; ++s) {
      if (consumed[e][s]) continue;
      const int u = elements[e].v[s], w = elements[e].v[(s + 1) % 4];
      auto mid = midpoints.find(pack_pair(u, w));
      if (mid == midpoints.end()) continue;
      const int m = mid->second;
      auto ita = directed.find(dkey(m, u));
      auto itb = directed.find(dkey(w, m));
      if (ita == directed.end() || itb == directed.end()) continue;
      const SideRef fa = ita->second, fb = itb->second;
      if (consumed[fa.elem][fa.side] || consumed[fb.elem][fb.side]) continue;
      consumed[e][s] = true;
      consumed[fa.elem][fa.side] = true;
      consumed[fb.elem][fb.side] = true;
      add_edge(u, m, e, s, fa.elem, fa.side, false);
      add_edge(m, w, e, s, fb.elem, fb.side, false);
      HangingNode h;
      h.node = m;
      h.master0 = u;
      h.master1 = w;
      h.coarse_elem = e;
      h.coarse_side = s;
      h.fine_elems = {fa.elem, fb.elem};
      hanging.push_back(h);
    }
  }

  // Pass C: whatever is left faces the domain boundary.
  for (int e = 0; e < n_elements(); ++e) {
    for (int s = 0; s < 4; ++s) {
      if (consumed[e][s]) continue;
      const int u = elements[e].v[s], w = elements[e].v[(s + 1) % 4];
      consumed[e][s] = true;
      elements[e].boundary_side[s] = true;
      add_edge(u, w, e, s, -1, -1, true);
    }
  }
}

Mesh build_uniform_grid(int nx, int ny, const Eigen::Vector2d& lo,
                        const Eigen::Vector2d& hi) {
  if (nx < 1 || ny < 1)
    throw InvalidGeometryError("build_uniform_grid: nx, ny must be >= 1");
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y()))
    throw InvalidGeometryError("build_uniform_grid: degenerate rectangle");

  Mesh m;
  m.id = Mesh::next_id();
  m.boundary = BoundaryDescriptor::polygon();
  m.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.vertices.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx,
                              lo.y() + (hi.y() - lo.y()) * j / ny);
    }
  }
  auto vid = [nx](int i, int j) { return i + (nx + 1) * j; };
  m.elements.reserve(nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Element e;
      e.v = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      m.elements.push_back(e);
    }
  }
  m.rebuild_topology({});
  return m;
}

Mesh build_ellipse_mesh(double a, double b, int target_elements) {
  if (!(a >= b && b > 0.0))
    throw InvalidGeometryError("build_ellipse_mesh: need a >= b > 0");
  if (target_elements < 12)
    throw ConstructionError(
        "build_ellipse_mesh: smallest supported mesh has 12 elements "
        "(requested " + std::to_string(target_elements) + ")", 12);

  // Count is ncore^2 + 4*ncore*nrings; pick the closest fit, preferring
  // ring thickness near the core cell size on ties.
  int best_core = -1, best_rings = -1, best_err = std::numeric_limits<int>::max();
  double best_shape = std::numeric_limits<double>::max();
  for (int core = 2; core <= 64; ++core) {
    const int rings = std::max(
        1, static_cast<int>(std::lround((target_elements - core * core) /
                                        (4.0 * core))));
    const int achieved = core * core + 4 * core * rings;
    const int err = std::abs(achieved - target_elements);
    const double cell = 1.0 / core;                  // core cell size (s=0.5)
    const double thick = 0.4 / rings;                // mean ring thickness
    const double shape = std::abs(std::log(cell / thick));
    if (err < best_err || (err == best_err && shape < best_shape)) {
      best_err = err;
      best_shape = shape;
      best_core = core;
      best_rings = rings;
    }
  }
  const int achieved = best_core * best_core + 4 * best_core * best_rings;
  if (std::abs(achieved - target_elements) > 0.15 * target_elements)
    throw ConstructionError(
        "build_ellipse_mesh: cannot reach " + std::to_string(target_elements) +
            " elements with the ring construction; closest achievable is " +
            std::to_string(achieved),
        achieved);

  const int n = best_core, rings = best_rings;
  const double s = 0.5;  // half-width of the core square in the unit disk

  Mesh m;
  m.id = Mesh::next_id();
  m.boundary = BoundaryDescriptor::ellipse(a, b);

  // Core grid vertices on [-s,s]^2.
  auto core_vid = [n](int i, int j) { return i + (n + 1) * j; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices.emplace_back(-s + 2.0 * s * i / n, -s + 2.0 * s * j / n);

  // Core perimeter, counter-clockwise from (-s,-s).
  std::vector<int> perim;
  perim.reserve(4 * n);
  for (int i = 0; i < n; ++i) perim.push_back(core_vid(i, 0));
  for (int j = 0; j < n; ++j) perim.push_back(core_vid(n, j));
  for (int i = n; i > 0; --i) perim.push_back(core_vid(i, n));
  for (int j = n; j > 0; --j) perim.push_back(core_vid(0, j));

  // Ring layers blend linearly from the square perimeter to the unit circle.
  std::vector<std::vector<int>> layer(rings + 1);
  layer[0] = perim;
  for (int r = 1; r <= rings; ++r) {
    const double t = static_cast<double>(r) / rings;
    layer[r].reserve(perim.size());
    for (int p : perim) {
      const Eigen::Vector2d sq = m.vertices[p];
      const double theta = std::atan2(sq.y(), sq.x());
      const Eigen::Vector2d circ(std::cos(theta), std::sin(theta));
      layer[r].push_back(m.n_vertices());
      m.vertices.push_back((1.0 - t) * sq + t * circ);
    }
  }

  for (auto& v : m.vertices) v = Eigen::Vector2d(a * v.x(), b * v.y());

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Element e;
      e.v = {core_vid(i, j), core_vid(i + 1, j), core_vid(i + 1, j + 1),
             core_vid(i, j + 1)};
      m.elements.push_back(e);
    }
  }
  const int np = static_cast<int>(perim.size());
  for (int r = 1; r <= rings; ++r) {
    for (int i = 0; i < np; ++i) {
      const int in0 = layer[r - 1][i], in1 = layer[r - 1][(i + 1) % np];
      const int out0 = layer[r][i], out1 = layer[r][(i + 1) % np];
      Element e;
      // Counter-clockwise with the cell interior radially inside the outer
      // edge; the inner edge then opposes the neighboring cell's direction.
      e.v = {out0, out1, in1, in0};
      m.elements.push_back(e);
    }
  }

  m.rebuild_topology({});
  return m;
}

Mesh refine(const Mesh& old, const std::vector<bool>& in_flags,
            const BoundaryDescriptor& boundary) {
  if (in_flags.size() != old.elements.size())
    throw InvalidGeometryError("refine: flag count != element count");

  // Closure: across every facet the post-refinement levels may differ by at
  // most one. Sweep to a fixed point, ascending element id.
  std::vector<bool> flags = in_flags;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Edge& ed : old.edges) {
      if (ed.boundary) continue;
      const int e0 = ed.elem[0], e1 = ed.elem[1];
      const int l0 = old.elements[e0].level + (flags[e0] ? 1 : 0);
      const int l1 = old.elements[e1].level + (flags[e1] ? 1 : 0);
      if (l0 - l1 > 1 && !flags[e1]) {
        flags[e1] = true;
        changed = true;
      } else if (l1 - l0 > 1 && !flags[e0]) {
        flags[e0] = true;
        changed = true;
      }
    }
  }

  Mesh m;
  m.id = Mesh::next_id();
  m.parent_id = old.id;
  m.boundary = boundary;
  m.vertices = old.vertices;

  std::unordered_map<std::uint64_t, int> midpoints;
  for (const HangingNode& h : old.hanging)
    midpoints[pack_pair(h.master0, h.master1)] = h.node;

  auto midpoint = [&](int va, int vb, bool on_boundary) {
    const std::uint64_t key = pack_pair(va, vb);
    auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    Eigen::Vector2d p = 0.5 * (m.vertices[va] + m.vertices[vb]);
    if (on_boundary) p = boundary.project(p);
    const int id = m.n_vertices();
    m.vertices.push_back(p);
    midpoints[key] = id;
    return id;
  };

  for (int e = 0; e < old.n_elements(); ++e) {
    const Element& pe = old.elements[e];
    if (!flags[e]) {
      Element copy = pe;
      copy.parent = e;
      copy.child_index = -1;
      m.elements.push_back(copy);
      continue;
    }
    const int va = pe.v[0], vb = pe.v[1], vc = pe.v[2], vd = pe.v[3];
    const int m01 = midpoint(va, vb, pe.boundary_side[0]);
    const int m12 = midpoint(vb, vc, pe.boundary_side[1]);
    const int m23 = midpoint(vc, vd, pe.boundary_side[2]);
    const int m30 = midpoint(vd, va, pe.boundary_side[3]);
    const int mc = m.n_vertices();
    m.vertices.push_back(0.25 * (m.vertices[m01] + m.vertices[m12] +
                                 m.vertices[m23] + m.vertices[m30]));

    // Children tile the parent's reference square: 0 = lower-left,
    // 1 = lower-right, 2 = upper-left, 3 = upper-right.
    const std::array<std::array<int, 4>, 4> kids = {{
        {va, m01, mc, m30},
        {m01, vb, m12, mc},
        {m30, mc, m23, vd},
        {mc, m12, vc, m23},
    }};
    for (int k = 0; k < 4; ++k) {
      Element ch;
      ch.v = kids[k];
      ch.parent = e;
      ch.child_index = k;
      ch.level = pe.level + 1;
      m.elements.push_back(ch);
    }
  }

  m.rebuild_topology(midpoints);
  return m;
}

namespace {

// Chebyshev center of a convex quad: the largest inscribed circle touches at
// least three sides (or two parallel ones, which the triple enumeration also
// finds). Solve each 3-side equidistance system and keep the best feasible.
double inscribed_diameter(const Eigen::Matrix<double, 2, 4>& c) {
  Eigen::Matrix<double, 4, 2> n;  // inward normals
  Eigen::Vector4d d;
  for (int s = 0; s < 4; ++s) {
    const Eigen::Vector2d t = (c.col((s + 1) % 4) - c.col(s)).normalized();
    const Eigen::Vector2d inward(-t.y(), t.x());
    n.row(s) = inward;
    d(s) = inward.dot(c.col(s));
  }
  double best = 0.0;
  for (int skip = 0; skip < 4; ++skip) {
    Eigen::Matrix3d A;
    Eigen::Vector3d rhs;
    int r = 0;
    for (int s = 0; s < 4; ++s) {
      if (s == skip) continue;
      A(r, 0) = n(s, 0);
      A(r, 1) = n(s, 1);
      A(r, 2) = -1.0;
      rhs(r) = d(s);
      ++r;
    }
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible()) continue;
    const Eigen::Vector3d sol = lu.solve(rhs);
    const Eigen::Vector2d center(sol(0), sol(1));
    const double radius = sol(2);
    if (radius <= 0.0) continue;
    if (n.row(skip).dot(center) - radius >= d(skip) - 1e-12)
      best = std::max(best, radius);
  }
  return 2.0 * best;
}

}  // namespace

bool QualityReport::ok() const {
  return min_jacobian > 0.0 && min_corner_angle > 0.05 &&
         min_inscribed_diameter > 0.0;
}

QualityReport quality_report(const Mesh& mesh) {
  QualityReport r;
  r.min_inscribed_diameter = std::numeric_limits<double>::max();
  r.min_h_ratio = std::numeric_limits<double>::max();
  r.max_h_ratio = 0.0;
  r.min_corner_angle = std::numeric_limits<double>::max();
  r.min_jacobian = std::numeric_limits<double>::max();

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto c = mesh.corners(e);
    r.max_h = std::max(r.max_h, mesh.element_diameter(e));
    r.min_inscribed_diameter =
        std::min(r.min_inscribed_diameter, inscribed_diameter(c));
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector2d u = c.col((k + 1) % 4) - c.col(k);
      const Eigen::Vector2d v = c.col((k + 3) % 4) - c.col(k);
      const double ang =
          std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
      r.min_corner_angle = std::min(r.min_corner_angle, ang);
    }
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d ref(0.5 * i, 0.5 * j);
        const ShapeValues s = shape_eval(ElementKind::Q1, ref);
        const Eigen::Matrix2d J = c * s.grad;
        r.min_jacobian = std::min(r.min_jacobian, J.determinant());
      }
    }
  }
  for (int ed = 0; ed < mesh.n_edges(); ++ed) {
    const double he = mesh.edge_length(ed);
    for (int k = 0; k < 2; ++k) {
      const int e = mesh.edges[ed].elem[k];
      if (e < 0) continue;
      const double ratio = mesh.element_diameter(e) / he;
      r.min_h_ratio = std::min(r.min_h_ratio, ratio);
      r.max_h_ratio = std::max(r.max_h_ratio, ratio);
    }
  }
  return r;
}

}  // namespace lcamr
