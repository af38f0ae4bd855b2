#include "romaeh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "romaeh/errors.hpp"

namespace romaeh {

std::string phase_name(Phase p) { return p == Phase::Fiber ? "fiber" : "matrix"; }

Phase phase_from_name(const std::string& name) {
  if (name == "fiber") return Phase::Fiber;
  if (name == "matrix") return Phase::Matrix;
  throw ConfigError("unknown phase name '" + name + "'");
}

int RveMesh::num_partitions() const {
  int m = 0;
  for (int b : partition_of_element) m = std::max(m, b);
  return m;
}

double RveMesh::element_area(int e) const {
  const auto& c = elements[e];
  double a = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector2d& p = nodes[c[k]];
    const Eigen::Vector2d& q = nodes[c[(k + 1) % 4]];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Eigen::Vector2d RveMesh::element_centroid(int e) const {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (int n : elements[e]) c += nodes[n];
  return c / 4.0;
}

double RveMesh::total_area() const {
  double a = 0.0;
  for (size_t e = 0; e < elements.size(); ++e) a += element_area(static_cast<int>(e));
  return a;
}

double RveMesh::fiber_area_fraction() const {
  double fiber = 0.0, total = 0.0;
  for (size_t e = 0; e < elements.size(); ++e) {
    const double a = element_area(static_cast<int>(e));
    total += a;
    if (phase_of_element[e] == Phase::Fiber) fiber += a;
  }
  return fiber / total;
}

void RveMesh::validate() const {
  if (nodes.empty() || elements.empty()) throw ConfigError("mesh is empty");
  if (phase_of_element.size() != elements.size())
    throw ConfigError("mesh: phase labels missing for some elements");

  for (size_t e = 0; e < elements.size(); ++e) {
    if (element_area(static_cast<int>(e)) <= 0.0)
      throw ConfigError("mesh: element " + std::to_string(e + 1) + " has non-positive area");
    for (int n : elements[e])
      if (n < 0 || n >= static_cast<int>(nodes.size()))
        throw ConfigError("mesh: element " + std::to_string(e + 1) + " references a missing node");
  }

  if (!partition_of_element.empty()) {
    if (partition_of_element.size() != elements.size())
      throw ConfigError("mesh: partition labels missing for some elements");
    const int m = num_partitions();
    std::vector<int> count(m, 0);
    std::vector<int> phase_seen(m, -1);
    for (size_t e = 0; e < elements.size(); ++e) {
      const int b = partition_of_element[e];
      if (b < 1 || b > m) throw ConfigError("mesh: element with partition label out of range");
      ++count[b - 1];
      const int ph = static_cast<int>(phase_of_element[e]);
      if (phase_seen[b - 1] < 0) phase_seen[b - 1] = ph;
      if (phase_seen[b - 1] != ph)
        throw ConfigError("mesh: partition " + std::to_string(b) +
                          " straddles the fiber/matrix interface");
    }
    for (int b = 0; b < m; ++b)
      if (count[b] == 0) throw ConfigError("mesh: partition " + std::to_string(b + 1) + " is empty");
  }

  // Pairing must be a bijection per offset direction, with exact partners.
  std::map<std::pair<double, double>, std::set<int>> slaves_by_offset;
  for (const auto& p : periodic_pairs) {
    if (p.master < 0 || p.slave < 0 || p.master >= static_cast<int>(nodes.size()) ||
        p.slave >= static_cast<int>(nodes.size()))
      throw ConfigError("mesh: periodic pair references a missing node");
    const Eigen::Vector2d gap = nodes[p.slave] - nodes[p.master];
    if ((gap - Eigen::Vector2d(p.dx, p.dy)).norm() > 1e-9 * std::max(1.0, cell_size))
      throw ConfigError("mesh: periodic pair offset does not match node coordinates");
    auto key = std::make_pair(p.dx, p.dy);
    if (!slaves_by_offset[key].insert(p.slave).second)
      throw ConfigError("mesh: node is slave twice for the same period direction");
  }
}

PartitionScheme PartitionScheme::named(const std::string& name) {
  if (name != "F1-M1" && name != "F1-M4" && name != "F1-M8")
    throw ConfigError("unknown partition scheme '" + name + "' (expected F1-M1, F1-M4 or F1-M8)");
  return PartitionScheme{name, {}};
}

PartitionScheme PartitionScheme::custom(std::vector<std::vector<Eigen::Vector2d>> polys) {
  return PartitionScheme{"custom", std::move(polys)};
}

RveMesh build_unit_cell(double cell_size, double fiber_diameter, int elements_per_side) {
  if (cell_size <= 0.0) throw ConfigError("cell_size must be positive");
  if (fiber_diameter < 0.0 || fiber_diameter >= cell_size)
    throw ConfigError("fiber_diameter must satisfy 0 <= d < cell_size (got d=" +
                      std::to_string(fiber_diameter) + ", cell=" + std::to_string(cell_size) + ")");
  if (elements_per_side < 8) throw ConfigError("elements_per_side must be at least 8");
  const double h = cell_size / elements_per_side;
  if (fiber_diameter > 0.0 && fiber_diameter / h < 4.0)
    throw ConfigError("mesh too coarse: fewer than 4 elements across the fiber diameter");

  RveMesh mesh;
  mesh.cell_size = cell_size;
  const int n = elements_per_side;
  const int nn = n + 1;

  mesh.nodes.reserve(static_cast<size_t>(nn) * nn);
  for (int j = 0; j < nn; ++j)
    for (int i = 0; i < nn; ++i) mesh.nodes.emplace_back(i * h, j * h);

  auto node_id = [nn](int i, int j) { return j * nn + i; };

  const Eigen::Vector2d center(0.5 * cell_size, 0.5 * cell_size);
  const double r = 0.5 * fiber_diameter;
  mesh.elements.reserve(static_cast<size_t>(n) * n);
  mesh.phase_of_element.reserve(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.elements.push_back(
          {node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1), node_id(i, j + 1)});
      const Eigen::Vector2d c((i + 0.5) * h, (j + 0.5) * h);
      const bool in_fiber = r > 0.0 && (c - center).norm() < r;
      mesh.phase_of_element.push_back(in_fiber ? Phase::Fiber : Phase::Matrix);
    }
  }

  // Edge ties: right -> left and top -> bottom, corners included in
  // both directions.  Chains resolve to the single master at (0,0).
  for (int j = 0; j < nn; ++j)
    mesh.periodic_pairs.push_back({node_id(0, j), node_id(n, j), cell_size, 0.0});
  for (int i = 0; i < nn; ++i)
    mesh.periodic_pairs.push_back({node_id(i, 0), node_id(i, n), 0.0, cell_size});

  mesh.validate();
  return mesh;
}

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

// Matrix sector index for the F1-M8 cut: eight 45-degree sectors around
// the cell center, centered on the +x axis and stepping counter-
// clockwise.  Even sectors face the cell edges, odd sectors hold the
// corners; the two families have different areas.
int octant_sector(const Eigen::Vector2d& rel) {
  double angle = std::atan2(rel.y(), rel.x());
  const double step = std::numbers::pi / 4.0;
  int k = static_cast<int>(std::floor((angle + step / 2.0) / step));
  return ((k % 8) + 8) % 8;
}

}  // namespace

void assign_partitions(RveMesh& mesh, const PartitionScheme& scheme) {
  const size_t ne = mesh.elements.size();
  mesh.partition_of_element.assign(ne, 0);
  const Eigen::Vector2d center(0.5 * mesh.cell_size, 0.5 * mesh.cell_size);

  const bool has_fiber =
      std::any_of(mesh.phase_of_element.begin(), mesh.phase_of_element.end(),
                  [](Phase p) { return p == Phase::Fiber; });

  if (scheme.name == "custom") {
    if (scheme.polygons.empty()) throw ConfigError("custom partition scheme has no polygons");
    for (size_t e = 0; e < ne; ++e) {
      const Eigen::Vector2d c = mesh.element_centroid(static_cast<int>(e));
      for (size_t p = 0; p < scheme.polygons.size(); ++p) {
        if (point_in_polygon(c, scheme.polygons[p])) {
          mesh.partition_of_element[e] = static_cast<int>(p) + 1;
          break;
        }
      }
      if (mesh.partition_of_element[e] == 0)
        throw ConfigError("custom partition scheme does not cover element " + std::to_string(e + 1));
    }
  } else if (scheme.name == "F1-M1" || scheme.name == "F1-M4" || scheme.name == "F1-M8") {
    if (!has_fiber)
      throw ConfigError("scheme " + scheme.name + " needs a fiber; cell is homogeneous");
    for (size_t e = 0; e < ne; ++e) {
      if (mesh.phase_of_element[e] == Phase::Fiber) {
        mesh.partition_of_element[e] = 1;
        continue;
      }
      const Eigen::Vector2d rel = mesh.element_centroid(static_cast<int>(e)) - center;
      if (scheme.name == "F1-M1") {
        mesh.partition_of_element[e] = 2;
      } else if (scheme.name == "F1-M4") {
        const int qx = rel.x() >= 0.0 ? 1 : 0;
        const int qy = rel.y() >= 0.0 ? 1 : 0;
        mesh.partition_of_element[e] = 2 + qx + 2 * qy;
      } else {
        mesh.partition_of_element[e] = 2 + octant_sector(rel);
      }
    }
  } else {
    throw ConfigError("unknown partition scheme '" + scheme.name + "'");
  }

  mesh.validate();
}

std::vector<double> partition_volume_fractions(const RveMesh& mesh) {
  const int m = mesh.num_partitions();
  if (m == 0) throw ConfigError("partitions not assigned");
  std::vector<double> vol(m, 0.0);
  double total = 0.0;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const double a = mesh.element_area(static_cast<int>(e));
    vol[mesh.partition_of_element[e] - 1] += a;
    total += a;
  }
  for (int b = 0; b < m; ++b) {
    if (vol[b] <= 0.0) throw ConfigError("partition " + std::to_string(b + 1) + " is empty");
    vol[b] /= total;
  }
  return vol;
}

std::vector<Phase> partition_phases(const RveMesh& mesh) {
  const int m = mesh.num_partitions();
  std::vector<Phase> out(m, Phase::Matrix);
  std::vector<bool> seen(m, false);
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const int b = mesh.partition_of_element[e] - 1;
    out[b] = mesh.phase_of_element[e];
    seen[b] = true;
  }
  for (int b = 0; b < m; ++b)
    if (!seen[b]) throw ConfigError("partition " + std::to_string(b + 1) + " is empty");
  return out;
}

PeriodicRoots resolve_periodic_roots(const RveMesh& mesh) {
  const int nn = static_cast<int>(mesh.nodes.size());
  std::vector<std::vector<std::pair<int, Eigen::Vector2d>>> links(nn);
  for (const auto& p : mesh.periodic_pairs)
    links[p.slave].push_back({p.master, Eigen::Vector2d(p.dx, p.dy)});

  PeriodicRoots roots;
  roots.root_of_node.assign(nn, -1);
  roots.offset_of_node.assign(nn, Eigen::Vector2d::Zero());

  // 0 unvisited, 1 in progress, 2 done.
  std::vector<int> state(nn, 0);
  auto resolve = [&](auto&& self, int node) -> void {
    if (state[node] == 2) return;
    if (state[node] == 1) throw ConfigError("periodic pairing contains a cycle");
    state[node] = 1;
    if (links[node].empty()) {
      roots.root_of_node[node] = node;
      roots.offset_of_node[node].setZero();
    } else {
      bool first = true;
      for (const auto& [master, off] : links[node]) {
        self(self, master);
        const int root = roots.root_of_node[master];
        const Eigen::Vector2d total = roots.offset_of_node[master] + off;
        if (first) {
          roots.root_of_node[node] = root;
          roots.offset_of_node[node] = total;
          first = false;
        } else if (root != roots.root_of_node[node] ||
                   (total - roots.offset_of_node[node]).norm() >
                       1e-9 * std::max(1.0, mesh.cell_size)) {
          throw ConfigError("periodic pairing is inconsistent at node " + std::to_string(node + 1));
        }
      }
    }
    state[node] = 2;
  };
  for (int n = 0; n < nn; ++n) resolve(resolve, n);
  return roots;
}

std::array<Eigen::Vector2d, 4> partition_bounding_quad(const RveMesh& mesh, int beta) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  bool any = false;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    if (mesh.partition_of_element[e] != beta) continue;
    any = true;
    for (int n : mesh.elements[e]) {
      x0 = std::min(x0, mesh.nodes[n].x());
      y0 = std::min(y0, mesh.nodes[n].y());
      x1 = std::max(x1, mesh.nodes[n].x());
      y1 = std::max(y1, mesh.nodes[n].y());
    }
  }
  if (!any) throw ConfigError("partition " + std::to_string(beta) + " is empty");
  return {Eigen::Vector2d(x0, y0), Eigen::Vector2d(x1, y0), Eigen::Vector2d(x1, y1),
          Eigen::Vector2d(x0, y1)};
}

}  // namespace romaeh
