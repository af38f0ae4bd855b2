#include "romaeh/dns.hpp"

#include <cmath>
#include <map>

#include "romaeh/crackband.hpp"
#include "romaeh/errors.hpp"

namespace romaeh {

PhasePointsModel::PhasePointsModel(std::vector<PhaseMaterial> mat_of_element,
                                   int gauss_per_element)
    : mat_(std::move(mat_of_element)), ngp_(gauss_per_element) {
  const size_t np = mat_.size() * ngp_;
  committed_.assign(np, PhaseState{});
  trial_.assign(np, PhaseState{});
  sigma_c_.assign(np, Voigt3::Zero());
  sigma_t_.assign(np, Voigt3::Zero());
  psi_c_.assign(np, 0.0);
  psi_t_.assign(np, 0.0);
}

bool PhasePointsModel::evaluate(int point, const Voigt3& eps_new, Voigt3& sigma,
                                Matrix3& tangent) {
  const PointResult r = integrate_point(eps_new, committed_[point], mat_[point / ngp_]);
  trial_[point] = r.state;
  sigma_t_[point] = r.sigma;
  psi_t_[point] = r.psi;
  sigma = r.sigma;
  tangent = r.tangent;
  return true;
}

void PhasePointsModel::commit_all() {
  committed_ = trial_;
  sigma_c_ = sigma_t_;
  psi_c_ = psi_t_;
}

double PhasePointsModel::field(int point, PointField f) const {
  switch (f) {
    case PointField::Omega: return committed_[point].omega;
    case PointField::KappaP: return committed_[point].kappa_p;
    case PointField::Psi: return psi_c_[point];
  }
  return 0.0;
}

std::vector<PhaseMaterial> dns_element_materials(const RveMesh& mesh, const PhaseMaterial& fiber,
                                                 const PhaseMaterial& matrix,
                                                 const DnsOptions& opt) {
  std::vector<PhaseMaterial> out(mesh.elements.size());
  // calibrate_m is deterministic in (material, Lc); cache by length.
  std::map<std::pair<int, long long>, double> m_cache;

  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const bool is_fiber = mesh.phase_of_element[e] == Phase::Fiber;
    PhaseMaterial mat = is_fiber ? fiber : matrix;
    if (opt.calibrate && mat.damage_enabled && mat.G_F > 0.0) {
      double Lc;
      if (opt.lc_mode == LcMode::SqrtArea) {
        Lc = std::sqrt(mesh.element_area(static_cast<int>(e)));
      } else {
        std::array<Eigen::Vector2d, 4> corners;
        for (int a = 0; a < 4; ++a) corners[a] = mesh.nodes[mesh.elements[e][a]];
        Lc = characteristic_length(corners, opt.oliver_theta);
      }
      const auto key = std::make_pair(is_fiber ? 0 : 1,
                                      static_cast<long long>(std::llround(Lc * 1e12)));
      auto it = m_cache.find(key);
      if (it == m_cache.end()) it = m_cache.emplace(key, calibrate_m(mat, Lc)).first;
      mat.m = it->second;
    }
    out[e] = mat;
  }
  return out;
}

DnsResult run_unitcell_dns(const RveMesh& mesh, const PhaseMaterial& fiber,
                           const PhaseMaterial& matrix, const std::vector<Voigt3>& program,
                           const DnsOptions& opt,
                           const std::function<void(int, NonlinearFe&)>& on_step) {
  PhasePointsModel model(dns_element_materials(mesh, fiber, matrix, opt), 4);
  NonlinearFe solver(fe_from_rve(mesh), Constraints::periodic_cell(mesh), model, opt.newton,
                     opt.mode);

  DnsResult result;
  result.curve.push_back({Voigt3::Zero(), Voigt3::Zero()});

  Voigt3 eps_prev = Voigt3::Zero();
  Voigt3 sig_prev = Voigt3::Zero();
  const double volume = solver.volume();

  for (size_t step = 0; step < program.size(); ++step) {
    if (!solver.advance_to(program[step])) {
      result.completed = false;
      break;
    }
    const Voigt3 eps = program[step];
    const Voigt3 sig = solver.volume_average_stress();
    result.curve.push_back({eps, sig});
    result.external_work += 0.5 * volume * (sig + sig_prev).dot(eps - eps_prev);
    eps_prev = eps;
    sig_prev = sig;
    if (on_step) on_step(static_cast<int>(step), solver);
  }

  result.stored_energy_end = solver.stored_energy();
  const int ne = static_cast<int>(mesh.elements.size());
  result.omega.resize(ne);
  result.kappa_p.resize(ne);
  result.sigma_elem.resize(ne);
  for (int e = 0; e < ne; ++e) {
    result.omega[e] = solver.element_field(e, PointField::Omega, true);
    result.kappa_p[e] = solver.element_field(e, PointField::KappaP, true);
    result.sigma_elem[e] = solver.element_stress(e);
  }
  return result;
}

namespace {

// Strain at which the uniaxial softening branch has decayed to the
// given stress fraction.
double tail_strain(const PhaseMaterial& mat, double m, double fraction) {
  double kappa = mat.kappa_Df;
  while (kappa < 1e6 * mat.kappa_Df) {
    const double t = kappa / mat.kappa_Df;
    const double s = t * std::exp((1.0 / m) * (1.0 - std::pow(t, m)));
    if (s < fraction) return kappa;
    kappa *= 1.05;
  }
  return kappa;
}

}  // namespace

double softening_strip_test(int n_elements, const PhaseMaterial& material, bool calibration,
                            const StripOptions& opt) {
  if (n_elements < 1) throw ConfigError("strip test needs at least one element");
  const double L = opt.length, W = opt.width;
  const int n = n_elements;
  const double h = L / n;

  RveMesh strip;
  strip.cell_size = L;
  for (int i = 0; i <= n; ++i) {
    strip.nodes.emplace_back(i * h, 0.0);
    strip.nodes.emplace_back(i * h, W);
  }
  for (int i = 0; i < n; ++i) {
    strip.elements.push_back({2 * i, 2 * (i + 1), 2 * (i + 1) + 1, 2 * i + 1});
    strip.phase_of_element.push_back(Phase::Matrix);
  }
  strip.partition_of_element.assign(n, 1);

  // Element materials: seeded imperfection in the first element, then
  // the crack band applied to the element width along the bar axis.
  std::vector<PhaseMaterial> mats(n, material);
  mats[0].kappa_Df *= opt.weak_factor;
  if (calibration) {
    for (int e = 0; e < n; ++e) {
      if (!mats[e].damage_enabled || mats[e].G_F <= 0.0) continue;
      std::array<Eigen::Vector2d, 4> corners;
      for (int a = 0; a < 4; ++a) corners[a] = strip.nodes[strip.elements[e][a]];
      mats[e].m = calibrate_m(mats[e], characteristic_length(corners, 0.0));
    }
  }

  // Driver: uniform end displacement; symmetry rollers elsewhere.
  FeMesh fe = fe_from_rve(strip);
  Constraints cons(2 * static_cast<int>(fe.nodes.size()), 1);
  double end_strain = opt.end_strain;
  if (end_strain <= 0.0) {
    // Far enough that the weak band has fully unloaded.
    const double kappa_end = tail_strain(mats[0], mats[0].m, 1e-4);
    end_strain = 1.2 * kappa_end * h / L + material.kappa_Df;
  }
  const double end_disp = end_strain * L;
  Eigen::RowVectorXd g1(1);
  g1 << end_disp;
  const double tol = 1e-9 * L;
  for (size_t nd = 0; nd < fe.nodes.size(); ++nd) {
    const int d = 2 * static_cast<int>(nd);
    const double x = fe.nodes[nd].x();
    const double y = fe.nodes[nd].y();
    if (std::abs(x) < tol) cons.fix(d);
    if (std::abs(x - L) < tol) cons.fix(d, g1);
    if (std::abs(y) < tol) cons.fix(d + 1);
  }
  cons.finalize();

  PhasePointsModel model(mats, 4);
  NonlinearFe solver(std::move(fe), std::move(cons), model, opt.newton, opt.mode);

  double work = 0.0;
  double f_prev = 0.0, d_prev = 0.0;
  Eigen::VectorXd target(1);
  for (int s = 1; s <= opt.steps; ++s) {
    target[0] = static_cast<double>(s) / opt.steps;
    if (!solver.advance_to(target)) break;
    const double force = solver.reaction()[0];  // conjugate to the unit driver
    const double disp = target[0];
    work += 0.5 * (force + f_prev) * (disp - d_prev);
    f_prev = force;
    d_prev = disp;
  }
  return work - solver.stored_energy();
}

std::vector<Voigt3> uniaxial_program(double eps_end, int steps) {
  std::vector<Voigt3> out;
  out.reserve(steps);
  for (int s = 1; s <= steps; ++s)
    out.push_back(Voigt3(eps_end * s / steps, 0.0, 0.0));
  return out;
}

std::vector<Voigt3> biaxial_program(double eps_end, int steps) {
  std::vector<Voigt3> out;
  out.reserve(steps);
  for (int s = 1; s <= steps; ++s) {
    const double e = eps_end * s / steps;
    out.push_back(Voigt3(e, e, 0.0));
  }
  return out;
}

}  // namespace romaeh
