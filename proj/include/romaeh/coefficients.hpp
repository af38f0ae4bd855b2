#ifndef ROMAEH_COEFFICIENTS_HPP
#define ROMAEH_COEFFICIENTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "romaeh/fem.hpp"
#include "romaeh/material.hpp"
#include "romaeh/mesh.hpp"

namespace romaeh {

// Reduced-order data of one partitioned unit cell.
//
//   E[b]      strain concentration: partition-(b+1) average strain per
//             unit macro strain at zero eigenstrain.
//   S[a][b]   eigenstrain influence: partition-(b+1) average strain per
//             unit eigenstrain imposed over partition (a+1) at zero
//             macro strain (source first, receiver second).
//   Lbar      homogenized moduli, sum_b c_b L_b E_b.
//   Mbar[a]   eigenstrain moduli, sum_b c_b L_b (S[a][b] - delta_ab I),
//             so that Lbar:eps + sum_a Mbar[a]:mu_a reproduces the
//             volume-averaged stress identically.
struct CoefficientSet {
  std::string scheme;
  int M = 0;
  std::vector<double> c;
  std::vector<Phase> phase;
  std::vector<Matrix3> E;
  std::vector<std::vector<Matrix3>> S;
  Matrix3 Lbar = Matrix3::Zero();
  std::vector<Matrix3> Mbar;
  std::vector<Matrix3> Lphase;

  // Macro stress for a given macro strain and per-partition eigenstrains.
  Voigt3 macro_stress(const Voigt3& eps_bar, const std::vector<Voigt3>& mu) const;
};

std::vector<Matrix3> compute_elastic_coefficients(const RveMesh& mesh,
                                                  const PeriodicSystem& system);

std::vector<std::vector<Matrix3>> compute_eigenstrain_coefficients(
    const RveMesh& mesh, const PeriodicSystem& system, const std::vector<Matrix3>& C_of_element,
    ExecMode mode = ExecMode::Parallel);

void compute_homogenized_moduli(CoefficientSet& cs);

// Full pipeline: one factorization, 3 + 3M load cases (solved in
// parallel against the shared factorization), then the moduli.
CoefficientSet compute_coefficients(const RveMesh& mesh, const PhaseMaterial& fiber,
                                    const PhaseMaterial& matrix, const std::string& scheme_name,
                                    ExecMode mode = ExecMode::Parallel);

struct IdentityReport {
  double strain_average = 0.0;  // max | sum_b c_b E_b - I |
  double dvorak = 0.0;          // max | sum_a S_ab - (I - E_b) |
  double mbar_sum = 0.0;        // max | sum_a Mbar_a + Lbar |
  double max_residual() const;
};

IdentityReport check_identities(const CoefficientSet& cs);

// Text round-trip with 17-significant-digit values.
void write_coefficients(const CoefficientSet& cs, std::ostream& out);
void write_coefficients(const CoefficientSet& cs, const std::string& path);
CoefficientSet read_coefficients(std::istream& in, const std::string& origin = "<stream>");
CoefficientSet read_coefficients(const std::string& path);

}  // namespace romaeh

#endif
