#include "lcamr/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lcamr {

namespace {

std::string sci6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

void write_vtk_header(std::ostream& out, const Mesh& mesh,
                      const std::string& title) {
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.x(), v.y());
    out << buf;
  }
  out << "CELLS " << mesh.n_elements() << " " << 5 * mesh.n_elements() << "\n";
  for (const Element& e : mesh.elements)
    out << "4 " << e.v[0] << " " << e.v[1] << " " << e.v[2] << " " << e.v[3]
        << "\n";
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int i = 0; i < mesh.n_elements(); ++i) out << "9\n";
}

}  // namespace

void write_mesh_vtk(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_vtk_header(out, mesh, "lcamr mesh");
}

void write_fields_vtk(const std::string& path, const DirectorState& state,
                      const std::vector<double>& wf_mean,
                      const std::vector<double>& theta,
                      const std::vector<bool>& refine_flags) {
  const Mesh& mesh = state.space->mesh();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_vtk_header(out, mesh, "lcamr director field");

  const int N = state.space->n_q2_scalar();
  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  out << "VECTORS director double\n";
  char buf[120];
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    // Vertex Q2 dofs coincide with vertex ids by construction.
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", state.coeffs[v],
                  state.coeffs[N + v], state.coeffs[2 * N + v]);
    out << buf;
  }

  out << "CELL_DATA " << mesh.n_elements() << "\n";
  auto scalar_field = [&](const std::string& name, auto&& value) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < mesh.n_elements(); ++e) {
      std::snprintf(buf, sizeof buf, "%.17g\n", static_cast<double>(value(e)));
      out << buf;
    }
  };
  scalar_field("wF_mean", [&](int e) { return wf_mean.empty() ? 0.0 : wf_mean[e]; });
  scalar_field("theta", [&](int e) { return theta.empty() ? 0.0 : theta[e]; });
  scalar_field("refine_flag", [&](int e) {
    return refine_flags.empty() ? 0.0 : (refine_flags[e] ? 1.0 : 0.0);
  });
}

void write_mesh_snapshot(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "lcamr mesh snapshot v1\n";
  out << "boundary "
      << (mesh.boundary.kind == BoundaryDescriptor::Kind::ellipse ? "ellipse"
                                                                  : "polygon");
  char buf[140];
  if (mesh.boundary.kind == BoundaryDescriptor::Kind::ellipse) {
    std::snprintf(buf, sizeof buf, " %.17g %.17g", mesh.boundary.a,
                  mesh.boundary.b);
    out << buf;
  }
  out << "\nvertices " << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  out << "elements " << mesh.n_elements() << "\n";
  for (const Element& e : mesh.elements) {
    out << e.v[0] << " " << e.v[1] << " " << e.v[2] << " " << e.v[3] << " "
        << e.parent << " " << e.child_index << " " << e.level;
    for (int s = 0; s < 4; ++s) out << " " << (e.boundary_side[s] ? 1 : 0);
    out << "\n";
  }
  out << "hanging " << mesh.hanging.size() << "\n";
  for (const HangingNode& h : mesh.hanging)
    out << h.node << " " << h.master0 << " " << h.master1 << "\n";
}

Mesh read_mesh_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(in, line);
  if (line != "lcamr mesh snapshot v1")
    throw std::runtime_error("not a mesh snapshot: " + path);

  Mesh mesh;
  mesh.id = Mesh::next_id();
  std::string word;
  in >> word;  // "boundary"
  std::string kind;
  in >> kind;
  if (kind == "ellipse") {
    double a, b;
    in >> a >> b;
    mesh.boundary = BoundaryDescriptor::ellipse(a, b);
  } else {
    mesh.boundary = BoundaryDescriptor::polygon();
  }

  int n = 0;
  in >> word >> n;  // vertices
  mesh.vertices.resize(n);
  for (auto& v : mesh.vertices) in >> v.x() >> v.y();
  in >> word >> n;  // elements
  mesh.elements.resize(n);
  for (auto& e : mesh.elements) {
    int b[4];
    in >> e.v[0] >> e.v[1] >> e.v[2] >> e.v[3] >> e.parent >> e.child_index >>
        e.level >> b[0] >> b[1] >> b[2] >> b[3];
  }
  in >> word >> n;  // hanging
  std::unordered_map<std::uint64_t, int> midpoints;
  for (int i = 0; i < n; ++i) {
    int node, m0, m1;
    in >> node >> m0 >> m1;
    midpoints[pack_pair(m0, m1)] = node;
  }
  if (!in) throw std::runtime_error("truncated mesh snapshot: " + path);
  mesh.rebuild_topology(midpoints);
  return mesh;
}

void write_stats_csv(const std::string& path, const SolveStats& stats,
                     double wu) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "level,energy_G,energy_wF,max_dev,min_dev,dofs,newton_iters,"
         "global_estimate\n";
  for (const LevelRecord& r : stats.levels) {
    out << (r.level + 1) << "," << sci6(r.energy.G) << ","
        << sci6(r.energy.wF()) << "," << sci6(r.deviation.max_dev) << ","
        << sci6(r.deviation.min_dev) << "," << r.dofs << ","
        << r.newton_iterations << "," << sci6(r.global_estimate) << "\n";
  }
  out << "fine_dof," << stats.finest_dofs() << ",,,,,,\n";
  out << "WU," << sci6(wu) << ",,,,,,\n";
  out << "wall_time," << sci6(stats.total_wall_time) << ",,,,,,\n";
}

ParsedStats parse_stats_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  ParsedStats ps;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.empty()) continue;
    if (cells[0] == "fine_dof") {
      ps.fine_dof = std::stoi(cells[1]);
    } else if (cells[0] == "WU") {
      ps.wu = std::stod(cells[1]);
    } else if (cells[0] == "wall_time") {
      ps.wall_time = std::stod(cells[1]);
    } else {
      ParsedStats::Row r;
      r.level = std::stoi(cells[0]);
      r.energy_G = std::stod(cells[1]);
      r.energy_wF = std::stod(cells[2]);
      r.max_dev = std::stod(cells[3]);
      r.min_dev = std::stod(cells[4]);
      r.dofs = std::stoi(cells[5]);
      r.newton_iters = std::stoi(cells[6]);
      r.global_estimate = std::stod(cells[7]);
      ps.rows.push_back(r);
    }
  }
  return ps;
}

}  // namespace lcamr
