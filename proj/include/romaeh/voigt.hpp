#ifndef ROMAEH_VOIGT_HPP
#define ROMAEH_VOIGT_HPP

#include <Eigen/Dense>

#include <cmath>

namespace romaeh {

// Voigt convention used throughout: strain vectors are
// (eps_11, eps_22, gamma_12) with ENGINEERING shear gamma_12 = 2*eps_12,
// stress vectors are (sig_11, sig_22, sig_12).  Material matrices carry
// the compensating 1/2 factor in the shear column so that sig = C*eps
// holds with this layout.  Strains are dimensionless, stresses MPa.
using Voigt3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline Eigen::Matrix2d strain_tensor(const Voigt3& eps) {
  Eigen::Matrix2d t;
  t << eps[0], 0.5 * eps[2], 0.5 * eps[2], eps[1];
  return t;
}

inline Voigt3 strain_voigt(const Eigen::Matrix2d& t) {
  return Voigt3(t(0, 0), t(1, 1), t(0, 1) + t(1, 0));
}

// In-plane principal strains, largest first.
inline std::pair<double, double> principal_strains(const Voigt3& eps) {
  const double mean = 0.5 * (eps[0] + eps[1]);
  const double r = std::hypot(0.5 * (eps[0] - eps[1]), 0.5 * eps[2]);
  return {mean + r, mean - r};
}

// Angle (radians from the x-axis) of the major principal strain axis.
// Undefined for an isotropic state; the caller decides the fallback.
inline double principal_angle(const Voigt3& eps) {
  return 0.5 * std::atan2(eps[2], eps[0] - eps[1]);
}

inline bool is_isotropic_strain(const Voigt3& eps, double tol = 1e-12) {
  const double scale = eps.cwiseAbs().maxCoeff();
  return std::abs(eps[0] - eps[1]) <= tol * std::max(1.0, scale) &&
         std::abs(eps[2]) <= tol * std::max(1.0, scale);
}

// Plane-strain elastic stiffness (engineering-shear Voigt layout).
inline Matrix3 plane_strain_stiffness(double E, double nu) {
  const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
  Matrix3 C = Matrix3::Zero();
  C(0, 0) = C(1, 1) = f * (1.0 - nu);
  C(0, 1) = C(1, 0) = f * nu;
  C(2, 2) = 0.5 * E / (1.0 + nu);  // = G, acting on engineering shear
  return C;
}

inline double shear_modulus(double E, double nu) { return 0.5 * E / (1.0 + nu); }
inline double lame_lambda(double E, double nu) {
  return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
}

}  // namespace romaeh

#endif
