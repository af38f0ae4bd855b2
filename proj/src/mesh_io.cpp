#include "romaeh/mesh_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "romaeh/errors.hpp"

namespace romaeh {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

}  // namespace

void write_mesh(const RveMesh& mesh, std::ostream& out) {
  out << "# unit cell mesh, units mm\n";
  out << "NODES " << mesh.nodes.size() << "\n";
  for (size_t i = 0; i < mesh.nodes.size(); ++i)
    out << i + 1 << " " << fmt(mesh.nodes[i].x()) << " " << fmt(mesh.nodes[i].y()) << "\n";
  out << "ELEMENTS " << mesh.elements.size() << "\n";
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    out << e + 1;
    for (int n : mesh.elements[e]) out << " " << n + 1;
    out << "\n";
  }
  out << "PHASE\n";
  for (size_t e = 0; e < mesh.elements.size(); ++e)
    out << e + 1 << " " << phase_name(mesh.phase_of_element[e]) << "\n";
  if (!mesh.partition_of_element.empty()) {
    out << "PARTITION\n";
    for (size_t e = 0; e < mesh.elements.size(); ++e)
      out << e + 1 << " " << mesh.partition_of_element[e] << "\n";
  }
  if (!mesh.periodic_pairs.empty()) {
    out << "PERIODIC\n";
    for (const auto& p : mesh.periodic_pairs)
      out << p.master + 1 << " " << p.slave + 1 << " " << fmt(p.dx) << " " << fmt(p.dy) << "\n";
  }
}

void write_mesh(const RveMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open mesh file for writing: " + path);
  write_mesh(mesh, out);
}

RveMesh read_mesh(std::istream& in, const std::string& origin) {
  RveMesh mesh;
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;

    if (first == "NODES" || first == "ELEMENTS" || first == "PHASE" || first == "PARTITION" ||
        first == "PERIODIC") {
      section = first;
      continue;
    }

    if (section == "NODES") {
      size_t id;
      double x, y;
      std::istringstream row(line);
      if (!(row >> id >> x >> y)) fail("bad node row");
      if (id != mesh.nodes.size() + 1) fail("node ids must be 1..n in order");
      mesh.nodes.emplace_back(x, y);
    } else if (section == "ELEMENTS") {
      size_t id;
      std::array<int, 4> c{};
      std::istringstream row(line);
      if (!(row >> id >> c[0] >> c[1] >> c[2] >> c[3])) fail("bad element row");
      if (id != mesh.elements.size() + 1) fail("element ids must be 1..n in order");
      for (int& n : c) --n;
      mesh.elements.push_back(c);
    } else if (section == "PHASE") {
      size_t e;
      std::string name;
      std::istringstream row(line);
      if (!(row >> e >> name)) fail("bad phase row");
      if (mesh.phase_of_element.size() < mesh.elements.size())
        mesh.phase_of_element.resize(mesh.elements.size(), Phase::Matrix);
      if (e < 1 || e > mesh.elements.size()) fail("phase row references a missing element");
      mesh.phase_of_element[e - 1] = phase_from_name(name);
    } else if (section == "PARTITION") {
      size_t e;
      int b;
      std::istringstream row(line);
      if (!(row >> e >> b)) fail("bad partition row");
      if (mesh.partition_of_element.size() < mesh.elements.size())
        mesh.partition_of_element.resize(mesh.elements.size(), 0);
      if (e < 1 || e > mesh.elements.size()) fail("partition row references a missing element");
      mesh.partition_of_element[e - 1] = b;
    } else if (section == "PERIODIC") {
      int m, s;
      double dx, dy;
      std::istringstream row(line);
      if (!(row >> m >> s >> dx >> dy)) fail("bad periodic row");
      mesh.periodic_pairs.push_back({m - 1, s - 1, dx, dy});
    } else {
      fail("data before any section header");
    }
  }

  double extent = 0.0;
  for (const auto& p : mesh.nodes) extent = std::max({extent, p.x(), p.y()});
  mesh.cell_size = extent;
  mesh.validate();
  return mesh;
}

RveMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file: " + path);
  return read_mesh(in, path);
}

}  // namespace romaeh
