#ifndef ROMAEH_ROM_HPP
#define ROMAEH_ROM_HPP

#include <vector>

#include "romaeh/coefficients.hpp"
#include "romaeh/material.hpp"

namespace romaeh {

// Full history of one macroscale integration point under the reduced
// model: macro strain, and per partition the phase history, the
// accumulated eigenstrain and the accumulated partition strain.
struct PointState {
  Voigt3 eps_bar = Voigt3::Zero();
  std::vector<PhaseState> phase;
  std::vector<Voigt3> mu;
  std::vector<Voigt3> eps;
  std::vector<Voigt3> last_dmu;  // previous step's increments, used by the single-pass mode

  explicit PointState(int M = 0)
      : phase(M), mu(M, Voigt3::Zero()), eps(M, Voigt3::Zero()), last_dmu(M, Voigt3::Zero()) {}
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  int substeps = 0;
  bool converged = false;
};

struct RomOptions {
  double tol = 1e-8;       // residual tolerance, relative to |d eps_bar|
  int max_iterations = 40;
  int max_bisections = 6;  // substep floor: increment / 2^6
  bool single_pass = false;
  double tangent_perturbation = 1e-7;
};

// d mu / d eps of one partition: I - L^-1 : (d sigma / d eps).
Matrix3 eigenstrain_increment_tangent(const Matrix3& Lphase, const Matrix3& tangent);

// Solves the coupled per-partition strain increments
//   deps_b - sum_a S_ab dmu_a(deps_a) - E_b dE = 0
// for given per-partition eigenstrain tangents T_a (block Newton
// matrix [delta_bg I - S_gb T_g]).  Throws SolverError naming the
// partition when the block matrix is singular.
std::vector<Voigt3> partition_strain_solve(const Voigt3& deps_bar, const CoefficientSet& cs,
                                           const std::vector<Matrix3>& T);

// Reduced-order material law at one integration point.  Shared and
// immutable; every material_update owns its PointState exclusively, so
// distinct points may update concurrently.
class RomMaterial {
 public:
  RomMaterial(CoefficientSet cs, std::vector<PhaseMaterial> mat_of_partition,
              RomOptions opt = {});

  const CoefficientSet& coefficients() const { return cs_; }
  const std::vector<PhaseMaterial>& materials() const { return mat_; }
  const RomOptions& options() const { return opt_; }

  PointState make_state() const { return PointState(cs_.M); }

  struct UpdateResult {
    Voigt3 sigma_bar = Voigt3::Zero();
    Matrix3 tangent = Matrix3::Zero();
    SolveReport report;
  };

  // Advances state by the macro strain increment; substeps on
  // non-convergence down to increment/2^max_bisections, then throws
  // SolverError.  The macro tangent comes from three perturbed extra
  // solves unless the step stayed fully elastic (then Lbar).
  UpdateResult material_update(const Voigt3& deps_bar, PointState& state) const;

  // Macro stress of a converged state (Lbar:eps + sum Mbar:mu).
  Voigt3 macro_stress(const PointState& state) const { return cs_.macro_stress(state.eps_bar, state.mu); }

  // Cross-check route: sum_b c_b L_b (eps_b - mu_b).
  Voigt3 macro_stress_partitionwise(const PointState& state) const;

 private:
  struct StepOutcome {
    bool ok = false;
    bool inelastic = false;
    int iterations = 0;
    double residual = 0.0;
  };

  StepOutcome try_increment(const Voigt3& deps_bar, PointState& state) const;
  StepOutcome single_pass_increment(const Voigt3& deps_bar, PointState& state) const;
  bool advance(const Voigt3& deps_bar, PointState& state, SolveReport& report, int depth) const;

  CoefficientSet cs_;
  std::vector<PhaseMaterial> mat_;
  std::vector<Matrix3> Linv_;
  RomOptions opt_;
};

}  // namespace romaeh

#endif
