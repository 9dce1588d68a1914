#include "lcamr/fe.hpp"

#include <algorithm>
#include <map>

namespace lcamr {

namespace {

// Q2 locals of side s in side direction (param 0 at v[s]).
constexpr int kSideLocals[4][3] = {{0, 1, 2}, {2, 5, 8}, {8, 7, 6}, {6, 3, 0}};
// Corner locals in element vertex order.
constexpr int kCornerLocals[4] = {0, 2, 8, 6};

// 1D quadratic basis on nodes {0, 1/2, 1}.
inline std::array<double, 3> lag2(double x) {
  return {2 * x * x - 3 * x + 1, 4 * x * (1 - x), 2 * x * x - x};
}

}  // namespace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, bool with_multiplier)
    : mesh_(std::move(mesh)), multiplier_(with_multiplier) {
  const Mesh& m = *mesh_;
  const int nv = m.n_vertices();

  // Side entities keyed by the undirected vertex pair, numbered in key order.
  std::map<std::uint64_t, int> sides;
  for (const Element& e : m.elements)
    for (int s = 0; s < 4; ++s)
      sides.emplace(pack_pair(e.v[s], e.v[(s + 1) % 4]), 0);
  int side_index = 0;
  for (auto& [key, idx] : sides) idx = side_index++;
  const int ns = side_index;

  n_q2_ = nv + ns + m.n_elements();
  q2_dofs_.resize(m.n_elements());
  q2_pos_.assign(n_q2_, Eigen::Vector2d::Zero());
  q2_boundary_.assign(n_q2_, false);

  for (int e = 0; e < m.n_elements(); ++e) {
    const Element& el = m.elements[e];
    for (int k = 0; k < 4; ++k) {
      q2_dofs_[e][kCornerLocals[k]] = el.v[k];
      q2_pos_[el.v[k]] = m.vertices[el.v[k]];
    }
    for (int s = 0; s < 4; ++s) {
      const int u = el.v[s], w = el.v[(s + 1) % 4];
      const int dof = nv + sides.at(pack_pair(u, w));
      q2_dofs_[e][kSideLocals[s][1]] = dof;
      q2_pos_[dof] = 0.5 * (m.vertices[u] + m.vertices[w]);
    }
    const int cell = nv + ns + e;
    q2_dofs_[e][4] = cell;
    q2_pos_[cell] = 0.25 * (m.vertices[el.v[0]] + m.vertices[el.v[1]] +
                            m.vertices[el.v[2]] + m.vertices[el.v[3]]);
  }

  for (const Edge& ed : m.edges) {
    if (!ed.boundary) continue;
    q2_boundary_[ed.v0] = true;
    q2_boundary_[ed.v1] = true;
    const int mid = q2_dofs_[ed.elem[0]][kSideLocals[ed.side[0]][1]];
    q2_boundary_[mid] = true;
  }
}

void ConstraintSet::add_line(int dof, std::vector<std::pair<int, double>> terms,
                             double inhomogeneity) {
  if (lines_[dof].has_value()) return;  // duplicate hanging registrations
  lines_[dof] = Line{std::move(terms), inhomogeneity};
  ++n_constraints_;
  closed_ = false;
}

void ConstraintSet::close() {
  for (int pass = 0; pass < 64; ++pass) {
    bool changed = false;
    for (auto& opt : lines_) {
      if (!opt) continue;
      Line& line = *opt;
      bool dirty = false;
      for (const auto& [d, w] : line.terms)
        if (lines_[d].has_value()) dirty = true;
      if (!dirty) continue;
      changed = true;
      Line resolved;
      resolved.inhomogeneity = line.inhomogeneity;
      for (const auto& [d, w] : line.terms) {
        if (!lines_[d].has_value()) {
          resolved.terms.emplace_back(d, w);
          continue;
        }
        const Line& master = *lines_[d];
        resolved.inhomogeneity += w * master.inhomogeneity;
        for (const auto& [md, mw] : master.terms)
          resolved.terms.emplace_back(md, w * mw);
      }
      line = std::move(resolved);
    }
    if (!changed) {
      // Merge duplicate masters and drop negligible weights.
      for (auto& opt : lines_) {
        if (!opt) continue;
        auto& t = opt->terms;
        std::sort(t.begin(), t.end());
        std::vector<std::pair<int, double>> merged;
        for (const auto& [d, w] : t) {
          if (!merged.empty() && merged.back().first == d)
            merged.back().second += w;
          else
            merged.emplace_back(d, w);
        }
        std::erase_if(merged, [](const auto& p) {
          return std::abs(p.second) < 1e-14;
        });
        t = std::move(merged);
      }
      closed_ = true;
      return;
    }
  }
  throw std::runtime_error("ConstraintSet::close: constraint chain too deep");
}

void ConstraintSet::distribute(Eigen::VectorXd& u) const {
  for (int dof = 0; dof < n_dofs(); ++dof) {
    if (!lines_[dof]) continue;
    const Line& line = *lines_[dof];
    double v = line.inhomogeneity;
    for (const auto& [d, w] : line.terms) v += w * u[d];
    u[dof] = v;
  }
}

void ConstraintSet::distribute_homogeneous(Eigen::VectorXd& du) const {
  for (int dof = 0; dof < n_dofs(); ++dof) {
    if (!lines_[dof]) continue;
    double v = 0.0;
    for (const auto& [d, w] : lines_[dof]->terms) v += w * du[d];
    du[dof] = v;
  }
}

void ConstraintSet::add_local_matrix(
    const std::vector<int>& dofs, const Eigen::MatrixXd& local,
    std::vector<Eigen::Triplet<double>>& out) const {
  const int n = static_cast<int>(dofs.size());
  for (int i = 0; i < n; ++i) {
    const bool ci = is_constrained(dofs[i]);
    for (int j = 0; j < n; ++j) {
      const double v = local(i, j);
      if (v == 0.0) continue;
      const bool cj = is_constrained(dofs[j]);
      if (!ci && !cj) {
        out.emplace_back(dofs[i], dofs[j], v);
      } else if (ci && !cj) {
        for (const auto& [mi, wi] : line(dofs[i]).terms)
          out.emplace_back(mi, dofs[j], wi * v);
      } else if (!ci && cj) {
        for (const auto& [mj, wj] : line(dofs[j]).terms)
          out.emplace_back(dofs[i], mj, wj * v);
      } else {
        for (const auto& [mi, wi] : line(dofs[i]).terms)
          for (const auto& [mj, wj] : line(dofs[j]).terms)
            out.emplace_back(mi, mj, wi * wj * v);
      }
    }
  }
}

void ConstraintSet::add_local_vector(const std::vector<int>& dofs,
                                     const Eigen::VectorXd& local,
                                     Eigen::VectorXd& out) const {
  for (int i = 0; i < static_cast<int>(dofs.size()); ++i) {
    const double v = local(i);
    if (v == 0.0) continue;
    if (!is_constrained(dofs[i])) {
      out[dofs[i]] += v;
    } else {
      for (const auto& [m, w] : line(dofs[i]).terms) out[m] += w * v;
    }
  }
}

void ConstraintSet::append_identity_tail(
    std::vector<Eigen::Triplet<double>>& out) const {
  for (int dof = 0; dof < n_dofs(); ++dof)
    if (lines_[dof]) out.emplace_back(dof, dof, 1.0);
}

ConstraintSet build_constraints(
    const FeSpace& space,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& g) {
  const Mesh& mesh = space.mesh();
  ConstraintSet cs(space.n_total_dofs());

  for (int s = 0; s < space.n_q2_scalar(); ++s) {
    if (!space.q2_node_on_boundary(s)) continue;
    const Eigen::Vector3d gv =
        g(mesh.boundary.project(space.q2_node_position(s)));
    for (int c = 0; c < 3; ++c)
      cs.add_line(space.director_dof(c, s), {}, gv[c]);
  }

  for (const HangingNode& h : mesh.hanging) {
    const int ce = h.coarse_elem, s = h.coarse_side;
    const int dof_a = space.q2_dof(ce, kSideLocals[s][0]);
    const int dof_m = space.q2_dof(ce, kSideLocals[s][1]);
    const int dof_b = space.q2_dof(ce, kSideLocals[s][2]);

    auto side_param = [&](int vertex) -> double {
      if (vertex == h.master0) return 0.0;
      if (vertex == h.master1) return 1.0;
      return 0.5;  // the hanging node itself
    };

    for (int f : h.fine_elems) {
      // Locate the fine element's side on this hanging edge.
      int fs = -1;
      for (int k = 0; k < 4; ++k) {
        const int u = mesh.elements[f].v[k], w = mesh.elements[f].v[(k + 1) % 4];
        const bool u_on = (u == h.master0 || u == h.master1 || u == h.node);
        const bool w_on = (w == h.master0 || w == h.master1 || w == h.node);
        if (u_on && w_on) {
          fs = k;
          break;
        }
      }
      const double p0 = side_param(mesh.elements[f].v[fs]);
      const double p1 = side_param(mesh.elements[f].v[(fs + 1) % 4]);
      const double params[3] = {p0, 0.5 * (p0 + p1), p1};
      for (int k = 0; k < 3; ++k) {
        const double p = params[k];
        if (p == 0.0 || p == 1.0) continue;  // master vertices stay free
        const auto w = lag2(p);
        const int dof = space.q2_dof(f, kSideLocals[fs][k]);
        for (int c = 0; c < 3; ++c) {
          cs.add_line(space.director_dof(c, dof),
                      {{space.director_dof(c, dof_a), w[0]},
                       {space.director_dof(c, dof_m), w[1]},
                       {space.director_dof(c, dof_b), w[2]}},
                      0.0);
        }
      }
    }

    if (space.has_multiplier()) {
      cs.add_line(space.multiplier_dof(h.node),
                  {{space.multiplier_dof(h.master0), 0.5},
                   {space.multiplier_dof(h.master1), 0.5}},
                  0.0);
    }
  }

  cs.close();
  return cs;
}

Eigen::Vector3d DirectorState::director_at(int elem,
                                           const Eigen::Vector2d& ref) const {
  const ShapeValues s = shape_eval(ElementKind::Q2, ref);
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  const int N = space->n_q2_scalar();
  for (int l = 0; l < 9; ++l) {
    const int dof = space->q2_dof(elem, l);
    for (int c = 0; c < 3; ++c) n[c] += coeffs[c * N + dof] * s.N(l);
  }
  return n;
}

double DirectorState::multiplier_coeff_at(int elem,
                                          const Eigen::Vector2d& ref) const {
  const ShapeValues s = shape_eval(ElementKind::Q1, ref);
  double v = 0.0;
  for (int l = 0; l < 4; ++l)
    v += coeffs[space->multiplier_dof(space->q1_dof(elem, l))] * s.N(l);
  return v;
}

DirectorState make_state(std::shared_ptr<const FeSpace> space) {
  DirectorState st;
  st.coeffs = Eigen::VectorXd::Zero(space->n_total_dofs());
  st.space = std::move(space);
  return st;
}

DirectorState interpolate(
    std::shared_ptr<const FeSpace> space,
    const std::function<Eigen::Vector3d(const Eigen::Vector2d&)>& field) {
  DirectorState st = make_state(space);
  const int N = space->n_q2_scalar();
  for (int s = 0; s < N; ++s) {
    const Eigen::Vector3d v = field(space->q2_node_position(s));
    for (int c = 0; c < 3; ++c) st.coeffs[c * N + s] = v[c];
  }
  return st;
}

DirectorState transfer(const DirectorState& coarse,
                       std::shared_ptr<const FeSpace> fine_space) {
  const Mesh& fine_mesh = fine_space->mesh();
  const Mesh& coarse_mesh = coarse.space->mesh();
  if (fine_mesh.parent_id != coarse_mesh.id)
    throw NotNestedError("transfer: fine mesh is not a refinement of the coarse mesh");
  if (fine_space->has_multiplier() != coarse.space->has_multiplier())
    throw NotNestedError("transfer: spaces disagree on the multiplier field");

  DirectorState out = make_state(fine_space);
  const int N = fine_space->n_q2_scalar();
  // Reference offset of child k inside the parent cell.
  static const Eigen::Vector2d kOffset[4] = {
      {0.0, 0.0}, {0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}};

  for (int e = 0; e < fine_mesh.n_elements(); ++e) {
    const Element& el = fine_mesh.elements[e];
    auto to_parent = [&](const Eigen::Vector2d& ref) {
      return el.child_index < 0 ? ref
                                : Eigen::Vector2d(kOffset[el.child_index] +
                                                  0.5 * ref);
    };
    for (int l = 0; l < 9; ++l) {
      const Eigen::Vector3d v =
          coarse.director_at(el.parent, to_parent(local_node(ElementKind::Q2, l)));
      for (int c = 0; c < 3; ++c)
        out.coeffs[c * N + fine_space->q2_dof(e, l)] = v[c];
    }
    if (fine_space->has_multiplier()) {
      for (int l = 0; l < 4; ++l) {
        const double v = coarse.multiplier_coeff_at(
            el.parent, to_parent(local_node(ElementKind::Q1, l)));
        out.coeffs[fine_space->multiplier_dof(fine_space->q1_dof(e, l))] = v;
      }
    }
  }
  return out;
}

}  // namespace lcamr
