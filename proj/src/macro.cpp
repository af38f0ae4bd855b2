#include "romaeh/macro.hpp"

#include <cmath>
#include <map>

#include "romaeh/errors.hpp"

namespace romaeh {

LinearElasticModel::LinearElasticModel(Matrix3 C, int point_count) : C_(std::move(C)) {
  sigma_c_.assign(point_count, Voigt3::Zero());
  sigma_t_.assign(point_count, Voigt3::Zero());
}

bool LinearElasticModel::evaluate(int point, const Voigt3& eps_new, Voigt3& sigma,
                                  Matrix3& tangent) {
  sigma = C_ * eps_new;
  tangent = C_;
  sigma_t_[point] = sigma;
  return true;
}

void LinearElasticModel::commit_all() { sigma_c_ = sigma_t_; }

double LinearElasticModel::field(int point, PointField f) const {
  if (f == PointField::Psi) {
    // Elastic energy density recovered from sigma = C eps.
    const Voigt3 eps = C_.ldlt().solve(sigma_c_[point]);
    return 0.5 * sigma_c_[point].dot(eps);
  }
  return 0.0;
}

RomPointsModel::RomPointsModel(const RomMaterial& rom, int point_count) : rom_(rom) {
  committed_.assign(point_count, rom.make_state());
  trial_ = committed_;
  sigma_c_.assign(point_count, Voigt3::Zero());
  sigma_t_.assign(point_count, Voigt3::Zero());
  psi_c_.assign(point_count, 0.0);
  psi_t_.assign(point_count, 0.0);
}

bool RomPointsModel::evaluate(int point, const Voigt3& eps_new, Voigt3& sigma, Matrix3& tangent) {
  PointState work = committed_[point];
  try {
    const auto r = rom_.material_update(eps_new - work.eps_bar, work);
    sigma = r.sigma_bar;
    tangent = r.tangent;
  } catch (const SolverError&) {
    return false;  // the macro driver bisects the load step
  }
  trial_[point] = std::move(work);
  sigma_t_[point] = sigma;
  // Stored energy of the reduced point: per-partition elastic energy
  // with the phase moduli acting on the elastic part of the strain.
  double psi = 0.0;
  const auto& cs = rom_.coefficients();
  for (int b = 0; b < cs.M; ++b) {
    const Voigt3 ee = trial_[point].eps[b] - trial_[point].mu[b];
    psi += cs.c[b] * 0.5 * ee.dot(cs.Lphase[b] * ee);
  }
  psi_t_[point] = psi;
  return true;
}

void RomPointsModel::commit_all() {
  committed_ = trial_;
  sigma_c_ = sigma_t_;
  psi_c_ = psi_t_;
}

double RomPointsModel::field(int point, PointField f) const {
  const PointState& s = committed_[point];
  switch (f) {
    case PointField::Omega: {
      double w = 0.0;
      for (const auto& p : s.phase) w = std::max(w, p.omega);
      return w;
    }
    case PointField::KappaP: {
      double k = 0.0;
      for (const auto& p : s.phase) k = std::max(k, p.kappa_p);
      return k;
    }
    case PointField::Psi: return psi_c_[point];
  }
  return 0.0;
}

namespace {

// Shared half-index node lattice for 8-node quads.
struct NodeLattice {
  std::map<std::pair<int, int>, int> ids;
  std::vector<Eigen::Vector2d>* nodes;
  std::function<Eigen::Vector2d(int, int)> position;

  int get(int i, int j) {
    auto it = ids.find({i, j});
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(nodes->size());
    nodes->push_back(position(i, j));
    ids.emplace(std::make_pair(i, j), id);
    return id;
  }
};

std::vector<int> q8_cell(NodeLattice& lat, int i2, int j2) {
  // Corner and midside nodes of the cell whose lower-left corner sits
  // at half-index (i2, j2); CCW corners then bottom/right/top/left.
  return {lat.get(i2, j2),         lat.get(i2 + 2, j2),     lat.get(i2 + 2, j2 + 2),
          lat.get(i2, j2 + 2),     lat.get(i2 + 1, j2),     lat.get(i2 + 2, j2 + 1),
          lat.get(i2 + 1, j2 + 2), lat.get(i2, j2 + 1)};
}

bool cell_kept(int ci, int cj, double cell_size, double hole_radius) {
  const Eigen::Vector2d center((ci + 0.5) * cell_size, (cj + 0.5) * cell_size);
  return center.norm() >= hole_radius;
}

}  // namespace

FeMesh build_macro_plate(int cells, double cell_size, double hole_radius) {
  if (cells < 2) throw ConfigError("macro plate needs at least 2x2 cells");
  if (hole_radius >= cells * cell_size)
    throw ConfigError("hole radius exceeds the plate size");
  FeMesh mesh;
  mesh.nodes_per_element = 8;
  NodeLattice lat;
  lat.nodes = &mesh.nodes;
  const double half = 0.5 * cell_size;
  lat.position = [half](int i, int j) { return Eigen::Vector2d(i * half, j * half); };

  bool any_removed = false;
  for (int cj = 0; cj < cells; ++cj)
    for (int ci = 0; ci < cells; ++ci) {
      if (!cell_kept(ci, cj, cell_size, hole_radius)) {
        any_removed = true;
        continue;
      }
      mesh.elements.push_back(q8_cell(lat, 2 * ci, 2 * cj));
    }
  if (hole_radius > 0.0 && !any_removed)
    throw ConfigError("hole radius too small to be resolved by the cell grid");
  if (mesh.elements.empty()) throw ConfigError("hole swallowed the whole plate");
  return mesh;
}

FeMesh build_plate_dns_mesh(int cells, double cell_size, double hole_radius,
                            double fiber_diameter, int micro_per_cell,
                            std::vector<Phase>& phase_of_element) {
  if (micro_per_cell < 8) throw ConfigError("micro_per_cell must be at least 8");
  FeMesh mesh;
  mesh.nodes_per_element = 4;
  phase_of_element.clear();

  const double h = cell_size / micro_per_cell;
  std::map<std::pair<int, int>, int> ids;
  auto get = [&](int i, int j) {
    auto it = ids.find({i, j});
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(mesh.nodes.size());
    mesh.nodes.emplace_back(i * h, j * h);
    ids.emplace(std::make_pair(i, j), id);
    return id;
  };

  const double r_fiber = 0.5 * fiber_diameter;
  for (int cj = 0; cj < cells; ++cj)
    for (int ci = 0; ci < cells; ++ci) {
      if (!cell_kept(ci, cj, cell_size, hole_radius)) continue;
      for (int j = 0; j < micro_per_cell; ++j)
        for (int i = 0; i < micro_per_cell; ++i) {
          const int gi = ci * micro_per_cell + i;
          const int gj = cj * micro_per_cell + j;
          mesh.elements.push_back(
              {get(gi, gj), get(gi + 1, gj), get(gi + 1, gj + 1), get(gi, gj + 1)});
          // Phase from the element center position within its cell.
          const Eigen::Vector2d local((i + 0.5) * h - 0.5 * cell_size,
                                      (j + 0.5) * h - 0.5 * cell_size);
          phase_of_element.push_back(r_fiber > 0.0 && local.norm() < r_fiber ? Phase::Fiber
                                                                             : Phase::Matrix);
        }
    }
  return mesh;
}

FeMesh build_plate_ogrid(double width, double hole_radius, int n_arc, int n_rings,
                         double grading) {
  if (hole_radius <= 0.0 || hole_radius >= width)
    throw ConfigError("ogrid: need 0 < hole_radius < width");
  if (n_arc < 2 || n_rings < 2) throw ConfigError("ogrid: need at least 2x2 elements");

  // Ray from the hole center (origin) at angle phi hits the outer
  // square boundary at B(phi).
  auto boundary = [&](double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return width / std::max(c, s) * Eigen::Vector2d(c, s);
  };
  // Geometric grading of the 2*n_rings half-steps toward the hole.
  auto radial_fraction = [&](int t2) {
    const double steps = 2.0 * n_rings;
    if (grading == 1.0) return t2 / steps;
    const double g = std::pow(grading, 0.5);  // per half-step ratio
    return (std::pow(g, t2) - 1.0) / (std::pow(g, steps) - 1.0);
  };

  FeMesh mesh;
  mesh.nodes_per_element = 8;
  NodeLattice lat;
  lat.nodes = &mesh.nodes;
  lat.position = [&](int s2, int t2) {
    const double phi = 0.5 * M_PI * s2 / (2.0 * n_arc);
    const double f = radial_fraction(t2);
    const Eigen::Vector2d inner = hole_radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
    return ((1.0 - f) * inner + f * boundary(phi)).eval();
  };

  for (int t = 0; t < n_rings; ++t)
    for (int s = 0; s < n_arc; ++s) mesh.elements.push_back(q8_cell(lat, 2 * s, 2 * t));
  return mesh;
}

Constraints plate_tension_constraints(const FeMesh& mesh, double width, double height,
                                      double end_displacement) {
  Constraints cons(2 * static_cast<int>(mesh.nodes.size()), 1);
  Eigen::RowVectorXd g1(1);
  g1 << end_displacement;
  const double tol = 1e-8 * std::max(width, height);
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    const int d = 2 * static_cast<int>(n);
    if (std::abs(mesh.nodes[n].x()) < tol) cons.fix(d);
    if (std::abs(mesh.nodes[n].y()) < tol) cons.fix(d + 1);
    if (std::abs(mesh.nodes[n].y() - height) < tol) cons.fix(d + 1, g1);
  }
  cons.finalize();
  return cons;
}

MacroCurve run_plate(NonlinearFe& solver, double end_displacement, int steps,
                     const std::function<void(int, NonlinearFe&)>& on_step) {
  MacroCurve curve;
  curve.displacement.push_back(0.0);
  curve.force.push_back(0.0);
  Eigen::VectorXd target(1);
  for (int s = 1; s <= steps; ++s) {
    target[0] = static_cast<double>(s) / steps;
    if (!solver.advance_to(target)) {
      curve.completed = false;
      break;
    }
    // reaction() is conjugate to the multiplier; divide by the end
    // displacement to get the physical edge force.
    curve.displacement.push_back(target[0] * end_displacement);
    curve.force.push_back(solver.reaction()[0] / end_displacement);
    if (on_step) on_step(s, solver);
  }
  return curve;
}

}  // namespace romaeh
