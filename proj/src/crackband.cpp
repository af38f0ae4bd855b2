#include "romaeh/crackband.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

#include "romaeh/errors.hpp"

namespace romaeh {

double characteristic_length(const std::array<Eigen::Vector2d, 4>& corners, double theta) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& c : corners) centroid += c;
  centroid /= 4.0;

  // Bilinear shape-function derivatives at the reference-square center.
  const double dxi[4] = {-0.25, 0.25, 0.25, -0.25};
  const double det[4] = {-0.25, -0.25, 0.25, 0.25};
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 4; ++a) {
    J(0, 0) += dxi[a] * corners[a].x();
    J(0, 1) += dxi[a] * corners[a].y();
    J(1, 0) += det[a] * corners[a].x();
    J(1, 1) += det[a] * corners[a].y();
  }
  if (J.determinant() <= 0.0) throw ConfigError("characteristic_length: degenerate region");
  const Eigen::Matrix2d Jinv = J.inverse();

  const Eigen::Vector2d n(std::cos(theta), std::sin(theta));
  const double scale = std::sqrt(J.determinant());
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    const double side = (corners[a] - centroid).dot(n);
    if (side < -1e-12 * scale) continue;  // corner on the crack line counts as positive
    const double dNdx = Jinv(0, 0) * dxi[a] + Jinv(0, 1) * det[a];
    const double dNdy = Jinv(1, 0) * dxi[a] + Jinv(1, 1) * det[a];
    sum += dNdx * n.x() + dNdy * n.y();
  }
  if (sum <= 0.0) throw ConfigError("characteristic_length: indicator gradient vanished");
  return 1.0 / sum;
}

double crack_direction(const std::vector<Matrix3>& E_of_partition, int beta, bool* warned) {
  if (warned) *warned = false;
  const Matrix3& E = E_of_partition.at(beta - 1);
  int best = 0;
  double best_eps = -1.0;
  for (int j = 0; j < 3; ++j) {
    const double d = damage_equivalent_strain(E.col(j));
    if (d > best_eps) {
      best_eps = d;
      best = j;
    }
  }
  const Voigt3 eps = E.col(best);
  if (is_isotropic_strain(eps, 1e-9)) {
    if (warned) *warned = true;
    return 0.0;
  }
  return principal_angle(eps);
}

namespace {

// Adaptive Simpson on one bracket.
double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, fm, whole, tol, 48);
}

}  // namespace

double dissipation_density(const PhaseMaterial& mat, double m) {
  if (m <= 0.05)
    throw ConfigError("dissipation_density: softening exponent m <= 0.05 is unsupported");
  const double E = mat.E;
  const double kf = mat.kappa_Df;
  if (E <= 0.0 || kf <= 0.0) throw ConfigError("dissipation_density: needs E > 0 and kappa_Df > 0");

  // Uncapped uniaxial softening branch; the omega cap is a solver
  // device and would make this integral diverge.
  auto sigma = [&](double kappa) {
    const double t = kappa / kf;
    return E * kappa * std::exp((1.0 / m) * (1.0 - std::pow(t, m)));
  };

  const double peak = E * kf;
  double end = kf;
  int guard = 0;
  while (sigma(end) > 1e-12 * peak) {
    end *= 2.0;
    if (++guard > 120) throw SolverError("dissipation_density: quadrature did not truncate");
  }

  // Elastic triangle up to the threshold, then the softening tail on
  // geometrically growing spans so slow decays stay accurate.
  double g = 0.5 * E * kf * kf;
  double a = kf;
  while (a < end) {
    const double b = std::min(2.0 * a, end);
    g += integrate(sigma, a, b, 1e-12 * peak * kf);
    a = b;
  }
  return g;
}

double calibrate_m(const PhaseMaterial& mat, double Lc) {
  if (Lc <= 0.0) throw ConfigError("calibrate_m: characteristic length must be positive");
  if (mat.G_F <= 0.0) throw ConfigError("calibrate_m: fracture energy G_F must be positive");
  double lo = 0.0500001, hi = 50.0;
  const double g_lo = dissipation_density(mat, lo);  // largest attainable density
  const double g_hi = dissipation_density(mat, hi);  // smallest attainable density
  const double target = mat.G_F / Lc;
  if (target > g_lo || target < g_hi) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "calibrate_m: G_F/Lc = %.6g outside attainable density [%.6g, %.6g]; "
                  "admissible Lc in [%.6g, %.6g] mm",
                  target, g_hi, g_lo, mat.G_F / g_lo, mat.G_F / g_hi);
    throw ConfigError(buf);
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g = dissipation_density(mat, mid);
    if (std::abs(Lc * g - mat.G_F) <= 1e-6 * mat.G_F) return mid;
    (g > target ? lo : hi) = mid;
    if (hi - lo < 1e-13 * mid) break;
  }
  const double mid = 0.5 * (lo + hi);
  if (std::abs(Lc * dissipation_density(mat, mid) - mat.G_F) <= 1e-6 * mat.G_F) return mid;
  throw SolverError("calibrate_m: bisection failed to meet tolerance");
}

std::vector<CrackBandSpec> calibrate_partitions(const RveMesh& mesh,
                                                const std::vector<PhaseMaterial>& mat_of_partition,
                                                const std::vector<Matrix3>& E_of_partition,
                                                std::optional<double> theta_override) {
  const int M = mesh.num_partitions();
  std::vector<CrackBandSpec> out;
  out.reserve(M);
  for (int b = 1; b <= M; ++b) {
    CrackBandSpec spec;
    spec.partition = b;
    spec.corners = partition_bounding_quad(mesh, b);
    const PhaseMaterial& mat = mat_of_partition[b - 1];
    spec.theta = theta_override ? *theta_override : crack_direction(E_of_partition, b);
    spec.Lc = characteristic_length(spec.corners, spec.theta);
    if (mat.damage_enabled && mat.G_F > 0.0) {
      spec.m = calibrate_m(mat, spec.Lc);
      spec.g_f = dissipation_density(mat, spec.m);
      spec.calibrated = true;
    } else {
      spec.m = mat.m;
      spec.g_f = mat.damage_enabled ? dissipation_density(mat, mat.m) : 0.0;
    }
    out.push_back(spec);
  }
  return out;
}

void write_calibration_csv(const std::string& path, const std::vector<CrackBandSpec>& specs) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open calibration report for writing: " + path);
  out << "partition,theta,Lc,m,g_f,Lc_g_f\n";
  char buf[256];
  for (const auto& s : specs) {
    std::snprintf(buf, sizeof(buf), "%d,%.16e,%.16e,%.16e,%.16e,%.16e\n", s.partition, s.theta,
                  s.Lc, s.m, s.g_f, s.Lc * s.g_f);
    out << buf;
  }
}

}  // namespace romaeh
