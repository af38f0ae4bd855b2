#ifndef ROMAEH_MACRO_HPP
#define ROMAEH_MACRO_HPP

#include <functional>
#include <vector>

#include "romaeh/nlfem.hpp"
#include "romaeh/rom.hpp"

namespace romaeh {

// Homogenized linear elasticity at every quadrature point; used for
// elastic checks of the macro model.
class LinearElasticModel : public MaterialModel {
 public:
  LinearElasticModel(Matrix3 C, int point_count);
  int point_count() const override { return static_cast<int>(sigma_c_.size()); }
  bool evaluate(int point, const Voigt3& eps_new, Voigt3& sigma, Matrix3& tangent) override;
  void commit_all() override;
  double field(int point, PointField f) const override;
  Voigt3 committed_stress(int point) const override { return sigma_c_[point]; }

 private:
  Matrix3 C_;
  std::vector<Voigt3> sigma_c_, sigma_t_;
};

// The reduced-order law as a macroscale material: one PointState per
// quadrature point, advanced against the shared immutable RomMaterial.
class RomPointsModel : public MaterialModel {
 public:
  RomPointsModel(const RomMaterial& rom, int point_count);
  int point_count() const override { return static_cast<int>(committed_.size()); }
  bool evaluate(int point, const Voigt3& eps_new, Voigt3& sigma, Matrix3& tangent) override;
  void commit_all() override;
  double field(int point, PointField f) const override;
  Voigt3 committed_stress(int point) const override { return sigma_c_[point]; }
  const PointState& committed_state(int point) const { return committed_[point]; }

 private:
  const RomMaterial& rom_;
  std::vector<PointState> committed_, trial_;
  std::vector<Voigt3> sigma_c_, sigma_t_;
  std::vector<double> psi_c_, psi_t_;
};

// Quarter plate of N x N unit cells with a staircase hole: cells whose
// center lies inside the hole radius (measured from the plate corner
// at the origin, the hole center) are omitted.  One 8-node element per
// cell, 3x3 quadrature.
FeMesh build_macro_plate(int cells, double cell_size, double hole_radius);

// Matched heterogeneous twin: every kept cell meshed micro_per_cell^2
// with the fiber/matrix layout of the unit cell.
FeMesh build_plate_dns_mesh(int cells, double cell_size, double hole_radius,
                            double fiber_diameter, int micro_per_cell,
                            std::vector<Phase>& phase_of_element);

// Hole-fitted quarter plate (radial rings from the hole arc to the
// outer square boundary, geometric grading toward the hole) for
// elastic stress-concentration checks.
FeMesh build_plate_ogrid(double width, double hole_radius, int n_arc, int n_rings,
                         double grading = 1.25);

// Uniaxial tension of the quarter plate: symmetry rollers on the two
// cut edges (x=0: u_x=0, y=0: u_y=0), prescribed vertical displacement
// on the top edge (driver is the load multiplier, top edge moves
// end_displacement at multiplier 1).
Constraints plate_tension_constraints(const FeMesh& mesh, double width, double height,
                                      double end_displacement);

struct MacroCurve {
  std::vector<double> displacement;  // applied top-edge displacement, mm
  std::vector<double> force;         // work-conjugate edge force per unit thickness, N/mm
  bool completed = true;
};

// Drives the load multiplier from its current value to 1 in the given
// number of steps, recording the force-displacement curve.
MacroCurve run_plate(NonlinearFe& solver, double end_displacement, int steps,
                     const std::function<void(int, NonlinearFe&)>& on_step = {});

}  // namespace romaeh

#endif
