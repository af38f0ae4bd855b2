#ifndef ROMAEH_CRACKBAND_HPP
#define ROMAEH_CRACKBAND_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "romaeh/material.hpp"
#include "romaeh/mesh.hpp"

namespace romaeh {

// Characteristic length of a convex quadrilateral region for a crack
// whose normal makes angle theta with the x-axis: the reciprocal of
// the directional derivative of the corner indicator interpolated with
// bilinear shape functions at the centroid.  Corners on the crack line
// count as the positive side.  For an axis-aligned rectangle and
// theta = 0 this is exactly the width.
double characteristic_length(const std::array<Eigen::Vector2d, 4>& corners, double theta);

// Crack-normal angle for one partition: direction of the maximum
// principal strain of the partition-average strain under whichever of
// the three unit elastic load cases drives that partition's damage
// strain hardest.  An isotropic strain state falls back to theta = 0
// and sets *warned.
double crack_direction(const std::vector<Matrix3>& E_of_partition, int beta,
                       bool* warned = nullptr);

// Energy dissipated per unit volume by the damage-only uniaxial law
// sigma(kappa) = (1 - omega(kappa; m)) E kappa, integrated to complete
// failure by adaptive quadrature.  Strictly decreasing in m; m <= 0.05
// is rejected as unsupported.
double dissipation_density(const PhaseMaterial& mat, double m);

// Softening exponent such that Lc * g_f(m) = G_F to 1e-6 relative,
// found by bisection on the monotone map.  Throws ConfigError naming
// the admissible Lc interval when the target is out of range.
double calibrate_m(const PhaseMaterial& mat, double Lc);

struct CrackBandSpec {
  int partition = 0;
  std::array<Eigen::Vector2d, 4> corners{};
  double theta = 0.0;  // radians
  double Lc = 0.0;     // mm
  double m = 0.0;
  double g_f = 0.0;    // N/mm^2 per mm (dissipation density)
  bool calibrated = false;
};

// Per-partition calibration for every damage-enabled partition; the
// others keep their configured m.  theta_override, when given, applies
// to all partitions.
std::vector<CrackBandSpec> calibrate_partitions(const RveMesh& mesh,
                                                const std::vector<PhaseMaterial>& mat_of_partition,
                                                const std::vector<Matrix3>& E_of_partition,
                                                std::optional<double> theta_override = {});

// CSV report: partition, theta, Lc, m, g_f, Lc*g_f.
void write_calibration_csv(const std::string& path, const std::vector<CrackBandSpec>& specs);

}  // namespace romaeh

#endif
