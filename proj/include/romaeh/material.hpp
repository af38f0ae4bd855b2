#ifndef ROMAEH_MATERIAL_HPP
#define ROMAEH_MATERIAL_HPP

#include <string>

#include "romaeh/voigt.hpp"

namespace romaeh {

// Phase point model: isotropic elasticity, optional von Mises
// plasticity with linear hardening resolved in effective-stress space,
// and scalar damage driven by the maximum positive principal strain
// with exponential softening
//   omega = 1 - exp((1/m) (1 - (kappa_D/kappa_Df)^m)),  kappa_D > kappa_Df.
// Below the threshold kappa_Df the material is undamaged.  A large m
// gives a brittle drop, a small m a long ductile tail; crack-band
// calibration adjusts m per partition or per element.
struct PhaseMaterial {
  double E = 0.0;      // MPa
  double nu = 0.0;     // -
  bool plasticity_enabled = false;
  double sigma_y0 = 0.0;  // MPa, initial yield
  double H = 0.0;         // MPa, linear hardening modulus
  bool damage_enabled = false;
  double kappa_Df = 0.0;  // -, damage threshold strain
  double m = 1.0;         // -, softening exponent
  double G_F = 0.0;       // N/mm, mode-I fracture energy

  void validate(const std::string& label = "phase") const;
  Matrix3 elastic_matrix() const { return plane_strain_stiffness(E, nu); }
};

// History at one phase point.  Plane strain with full out-of-plane
// plastic bookkeeping: eps_p holds the in-plane components (engineering
// shear), eps_p33 the out-of-plane normal plastic strain.
struct PhaseState {
  Voigt3 eps_p = Voigt3::Zero();
  double eps_p33 = 0.0;
  double kappa_p = 0.0;
  double omega = 0.0;
  double kappa_D = 0.0;
};

// Damage never reaches one; the cap keeps inverse-moduli expressions
// finite at full failure.
constexpr double kOmegaCap = 1.0 - 1e-9;

// Largest Macaulay-bracketed principal strain (in-plane eigenvalues and
// the zero out-of-plane strain); always >= 0.
double damage_equivalent_strain(const Voigt3& eps);

// History update; returns (omega, kappa_D_new) with
// kappa_D_new = max(kappa_D_old, eps_D, kappa_Df).
std::pair<double, double> damage_update(double kappa_D_old, double eps_D,
                                        const PhaseMaterial& mat);

// d omega / d kappa_D of the exponential law at kappa_D (> kappa_Df).
double damage_rate(double kappa_D, const PhaseMaterial& mat);

struct ReturnMapResult {
  Voigt3 eps_e = Voigt3::Zero();    // in-plane elastic strain
  double eps_e33 = 0.0;
  Voigt3 eps_p = Voigt3::Zero();
  double eps_p33 = 0.0;
  double kappa_p = 0.0;
  Voigt3 sigma_eff = Voigt3::Zero();  // effective (undamaged) stress, in-plane
  double sigma_eff33 = 0.0;
  Matrix3 tangent = Matrix3::Zero();  // d sigma_eff / d eps, consistent
  bool plastic = false;
};

// Radial return for the trial total strain eps_new given the previous
// plastic state; closed form for linear hardening.
ReturnMapResult plastic_return_map(const Voigt3& eps_new, const PhaseState& state,
                                   const PhaseMaterial& mat);

struct PointResult {
  Voigt3 sigma = Voigt3::Zero();
  PhaseState state;
  Matrix3 tangent = Matrix3::Zero();  // d sigma / d eps, algorithmic
  double psi = 0.0;                   // stored elastic energy density (1-omega)/2 e:L:e
  bool plastic = false;
};

// One strain-driven step: plasticity in effective-stress space first,
// then damage from the total strain, sigma = (1-omega) L : eps_e.
PointResult integrate_point(const Voigt3& eps_new, const PhaseState& state,
                            const PhaseMaterial& mat);

}  // namespace romaeh

#endif
