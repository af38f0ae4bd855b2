#include "romaeh/material.hpp"

#include <cmath>

#include "romaeh/errors.hpp"

namespace romaeh {

void PhaseMaterial::validate(const std::string& label) const {
  if (E <= 0.0) throw ConfigError(label + ": E must be positive");
  if (nu <= -1.0 || nu >= 0.5) throw ConfigError(label + ": nu must lie in (-1, 0.5)");
  if (damage_enabled) {
    if (kappa_Df <= 0.0) throw ConfigError(label + ": kappa_Df must be positive");
    if (m <= 0.0) throw ConfigError(label + ": m must be positive");
  }
  if (plasticity_enabled) {
    if (sigma_y0 <= 0.0) throw ConfigError(label + ": sigma_y0 must be positive");
    if (H < 0.0) throw ConfigError(label + ": H must be non-negative");
  }
}

double damage_equivalent_strain(const Voigt3& eps) {
  const auto [e1, e2] = principal_strains(eps);
  (void)e2;  // e1 >= e2, and the out-of-plane principal strain is zero
  return std::max(e1, 0.0);
}

std::pair<double, double> damage_update(double kappa_D_old, double eps_D,
                                        const PhaseMaterial& mat) {
  const double kappa = std::max({kappa_D_old, eps_D, mat.kappa_Df});
  double omega = 0.0;
  if (kappa > mat.kappa_Df) {
    const double t = kappa / mat.kappa_Df;
    omega = 1.0 - std::exp((1.0 / mat.m) * (1.0 - std::pow(t, mat.m)));
    omega = std::min(omega, kOmegaCap);
  }
  return {omega, kappa};
}

double damage_rate(double kappa_D, const PhaseMaterial& mat) {
  const double t = kappa_D / mat.kappa_Df;
  const double omega = 1.0 - std::exp((1.0 / mat.m) * (1.0 - std::pow(t, mat.m)));
  return (1.0 - omega) * std::pow(t, mat.m - 1.0) / mat.kappa_Df;
}

namespace {

// Internal symmetric tensor with explicit out-of-plane terms; shear is
// the tensor component (not engineering).
struct Sym {
  double s11 = 0, s22 = 0, s33 = 0, s12 = 0;
  double trace() const { return s11 + s22 + s33; }
  Sym dev() const {
    const double p = trace() / 3.0;
    return {s11 - p, s22 - p, s33 - p, s12};
  }
  double norm() const { return std::sqrt(s11 * s11 + s22 * s22 + s33 * s33 + 2.0 * s12 * s12); }
};

Matrix3 condensed_elastic(double K, double G) {
  Matrix3 D;
  const double a = K + 4.0 * G / 3.0;
  const double b = K - 2.0 * G / 3.0;
  D << a, b, 0, b, a, 0, 0, 0, G;
  return D;
}

}  // namespace

ReturnMapResult plastic_return_map(const Voigt3& eps_new, const PhaseState& state,
                                   const PhaseMaterial& mat) {
  const double G = shear_modulus(mat.E, mat.nu);
  const double lam = lame_lambda(mat.E, mat.nu);
  const double K = lam + 2.0 * G / 3.0;

  ReturnMapResult r;
  r.eps_p = state.eps_p;
  r.eps_p33 = state.eps_p33;
  r.kappa_p = state.kappa_p;

  // Elastic trial strain; total out-of-plane strain is zero.
  Sym e{eps_new[0] - state.eps_p[0], eps_new[1] - state.eps_p[1], -state.eps_p33,
        0.5 * (eps_new[2] - state.eps_p[2])};

  auto stress_of = [&](const Sym& ee) {
    const double p = lam * ee.trace();
    return Sym{p + 2.0 * G * ee.s11, p + 2.0 * G * ee.s22, p + 2.0 * G * ee.s33, 2.0 * G * ee.s12};
  };

  Sym sig = stress_of(e);
  const Sym s = sig.dev();
  const double snorm = s.norm();
  const double q_tr = std::sqrt(1.5) * snorm;
  const double sig_y = mat.sigma_y0 + mat.H * state.kappa_p;
  const double f = q_tr - sig_y;

  if (!mat.plasticity_enabled || f <= 0.0) {
    r.eps_e = Voigt3(e.s11, e.s22, 2.0 * e.s12);
    r.eps_e33 = e.s33;
    r.sigma_eff = Voigt3(sig.s11, sig.s22, sig.s12);
    r.sigma_eff33 = sig.s33;
    r.tangent = condensed_elastic(K, G);
    return r;
  }

  const double dlam = f / (3.0 * G + mat.H);
  // Flow direction n = (3/2) s / q_tr; plastic increment dlam * n.
  const double c = 1.5 * dlam / q_tr;
  const Sym dep{c * s.s11, c * s.s22, c * s.s33, c * s.s12};

  r.plastic = true;
  r.kappa_p = state.kappa_p + dlam;
  r.eps_p = state.eps_p + Voigt3(dep.s11, dep.s22, 2.0 * dep.s12);
  r.eps_p33 = state.eps_p33 + dep.s33;

  e = Sym{e.s11 - dep.s11, e.s22 - dep.s22, e.s33 - dep.s33, e.s12 - dep.s12};
  sig = stress_of(e);
  r.eps_e = Voigt3(e.s11, e.s22, 2.0 * e.s12);
  r.eps_e33 = e.s33;
  r.sigma_eff = Voigt3(sig.s11, sig.s22, sig.s12);
  r.sigma_eff33 = sig.s33;

  // Consistent tangent: K I(x)I + 2G c1 I_dev - 2G c2 N(x)N with N the
  // unit deviatoric direction, condensed to the in-plane block.
  const double c1 = 1.0 - 3.0 * G * dlam / q_tr;
  const double c2 = 3.0 * G / (3.0 * G + mat.H) - 3.0 * G * dlam / q_tr;
  const Eigen::Vector3d N(s.s11 / snorm, s.s22 / snorm, s.s12 / snorm);

  Matrix3 J = Matrix3::Zero();
  J.topLeftCorner<2, 2>().setConstant(1.0);
  Matrix3 Idev;
  Idev << 1, 0, 0, 0, 1, 0, 0, 0, 0.5;
  Idev -= J / 3.0;
  r.tangent = K * J + 2.0 * G * c1 * Idev - 2.0 * G * c2 * (N * N.transpose());
  return r;
}

PointResult integrate_point(const Voigt3& eps_new, const PhaseState& state,
                            const PhaseMaterial& mat) {
  PointResult out;
  const ReturnMapResult rm = plastic_return_map(eps_new, state, mat);
  out.plastic = rm.plastic;
  out.state.eps_p = rm.eps_p;
  out.state.eps_p33 = rm.eps_p33;
  out.state.kappa_p = rm.kappa_p;

  double omega = 0.0;
  double kappa_D = state.kappa_D;
  bool damage_loading = false;
  if (mat.damage_enabled) {
    const double eps_D = damage_equivalent_strain(eps_new);
    std::tie(omega, kappa_D) = damage_update(state.kappa_D, eps_D, mat);
    damage_loading = kappa_D > std::max(state.kappa_D, mat.kappa_Df) && omega < kOmegaCap;
  }
  out.state.omega = omega;
  out.state.kappa_D = kappa_D;

  out.sigma = (1.0 - omega) * rm.sigma_eff;
  out.tangent = (1.0 - omega) * rm.tangent;
  if (damage_loading) {
    // d omega = omega'(kappa_D) * d eps_D, with d eps_D / d eps the
    // dyad of the major principal direction.
    const auto [e1, e2] = principal_strains(eps_new);
    (void)e2;
    if (e1 > 0.0) {
      const double ang = principal_angle(eps_new);
      const double vx = std::cos(ang), vy = std::sin(ang);
      const Eigen::Vector3d g(vx * vx, vy * vy, vx * vy);
      out.tangent -= damage_rate(kappa_D, mat) * (rm.sigma_eff * g.transpose());
    }
  }

  // Stored elastic energy with the full out-of-plane bookkeeping.
  const double sig_dot_eps = rm.sigma_eff[0] * rm.eps_e[0] + rm.sigma_eff[1] * rm.eps_e[1] +
                             rm.sigma_eff[2] * rm.eps_e[2] + rm.sigma_eff33 * rm.eps_e33;
  out.psi = 0.5 * (1.0 - omega) * sig_dot_eps;
  return out;
}

}  // namespace romaeh
