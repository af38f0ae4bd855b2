#ifndef ROMAEH_DNS_HPP
#define ROMAEH_DNS_HPP

#include <functional>
#include <vector>

#include "romaeh/material.hpp"
#include "romaeh/nlfem.hpp"

namespace romaeh {

// Phase constitutive law at every quadrature point; the direct
// numerical simulation material.  Materials are per element so crack
// band calibration and seeded imperfections can vary element-wise.
class PhasePointsModel : public MaterialModel {
 public:
  PhasePointsModel(std::vector<PhaseMaterial> mat_of_element, int gauss_per_element);

  int point_count() const override { return static_cast<int>(committed_.size()); }
  bool evaluate(int point, const Voigt3& eps_new, Voigt3& sigma, Matrix3& tangent) override;
  void commit_all() override;
  double field(int point, PointField f) const override;
  Voigt3 committed_stress(int point) const override { return sigma_c_[point]; }

  const PhaseState& committed_state(int point) const { return committed_[point]; }
  const PhaseMaterial& material_of_element(int e) const { return mat_[e]; }

 private:
  std::vector<PhaseMaterial> mat_;  // per element
  int ngp_ = 4;
  std::vector<PhaseState> committed_, trial_;
  std::vector<Voigt3> sigma_c_, sigma_t_;
  std::vector<double> psi_c_, psi_t_;
};

enum class LcMode { SqrtArea, Oliver };

struct DnsOptions {
  NlOptions newton;
  bool calibrate = true;
  LcMode lc_mode = LcMode::SqrtArea;
  double oliver_theta = 0.0;  // crack normal angle for LcMode::Oliver
  ExecMode mode = ExecMode::Parallel;
};

struct CurvePoint {
  Voigt3 eps = Voigt3::Zero();
  Voigt3 sig = Voigt3::Zero();
};

struct DnsResult {
  std::vector<CurvePoint> curve;  // includes the initial zero state
  bool completed = true;
  double external_work = 0.0;       // per unit thickness, N*mm
  double stored_energy_end = 0.0;
  double dissipated() const { return external_work - stored_energy_end; }
  // Final per-element fields.
  std::vector<double> omega, kappa_p;
  std::vector<Voigt3> sigma_elem;
};

// Per-element materials with the crack band applied: every
// damage-enabled element gets m calibrated to its own characteristic
// length (sqrt of element area, or the Oliver length at a fixed crack
// angle).  Calibration results are cached by length.
std::vector<PhaseMaterial> dns_element_materials(const RveMesh& mesh, const PhaseMaterial& fiber,
                                                 const PhaseMaterial& matrix,
                                                 const DnsOptions& opt);

// Strain-controlled nonlinear run of the periodic unit cell through
// the given absolute macro strain targets.  On persistent divergence
// the curve is truncated at the last converged step.
DnsResult run_unitcell_dns(const RveMesh& mesh, const PhaseMaterial& fiber,
                           const PhaseMaterial& matrix, const std::vector<Voigt3>& program,
                           const DnsOptions& opt = {},
                           const std::function<void(int, NonlinearFe&)>& on_step = {});

struct StripOptions {
  double length = 8.0;        // mm, along the loading axis
  double width = 1.0;         // mm
  double weak_factor = 0.95;  // kappa_Df knockdown of the seeded element
  double end_strain = 0.0;    // 0: pick automatically from the softening tail
  int steps = 120;
  NlOptions newton;
  ExecMode mode = ExecMode::Parallel;
};

// Canonical localization check: a 1D-like strip in tension with one
// weakened element.  Returns the energy dissipated over a run to
// complete failure.  With calibration the result is independent of
// n_elements; without it the dissipation scales like the element size.
double softening_strip_test(int n_elements, const PhaseMaterial& material, bool calibration,
                            const StripOptions& opt = {});

// Evenly spaced proportional strain programs.
std::vector<Voigt3> uniaxial_program(double eps_end, int steps);
std::vector<Voigt3> biaxial_program(double eps_end, int steps);

}  // namespace romaeh

#endif
