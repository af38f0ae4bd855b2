#ifndef ROMAEH_NLFEM_HPP
#define ROMAEH_NLFEM_HPP

#include <Eigen/Sparse>

#include <memory>
#include <vector>

#include "romaeh/mesh.hpp"
#include "romaeh/parallel.hpp"
#include "romaeh/voigt.hpp"

namespace romaeh {

// General 2D plane-strain mesh for the nonlinear solvers: 4-node
// bilinear (2x2 quadrature) or 8-node serendipity (3x3) elements.
struct FeMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::vector<int>> elements;
  int nodes_per_element = 4;

  int gauss_per_element() const { return nodes_per_element == 4 ? 4 : 9; }
  int point_count() const { return static_cast<int>(elements.size()) * gauss_per_element(); }
};

FeMesh fe_from_rve(const RveMesh& mesh);

// Shape function values and reference-coordinate derivatives for the
// two supported element families.
void fe_shape(int nodes_per_element, double xi, double eta, double* N, double* dxi, double* deta);
void fe_gauss(int nodes_per_element, int p, double& xi, double& eta, double& w);

// Affine kinematic constraints u = T u_reduced + G d, where d is the
// load driver: the three macro strain components for a periodic cell,
// or a single load multiplier for prescribed-displacement problems.
// Ties must reference free master dofs (resolve chains beforehand).
class Constraints {
 public:
  Constraints(int ndof, int ndriver);

  void tie(int slave_dof, int master_dof, const Eigen::RowVectorXd& gcoef);
  void fix(int dof, const Eigen::RowVectorXd& gcoef);
  void fix(int dof) { fix(dof, Eigen::RowVectorXd::Zero(ndriver_)); }
  void finalize();

  // Periodic cell: driver = macro strain Voigt vector.
  static Constraints periodic_cell(const RveMesh& mesh, int anchor_hint = -1);

  int ndriver() const { return ndriver_; }
  int ndof() const { return ndof_; }
  const Eigen::SparseMatrix<double>& T() const { return T_; }
  const Eigen::SparseMatrix<double>& G() const { return G_; }

 private:
  int ndof_ = 0;
  int ndriver_ = 0;
  std::vector<int> master_of_dof_;  // self = free, -2 = fixed, >=0 = tied master
  std::vector<Eigen::RowVectorXd> gcoef_;
  Eigen::SparseMatrix<double> T_, G_;
  bool finalized_ = false;
};

enum class PointField { Omega, KappaP, Psi };

// Strain-driven history material attached to the quadrature points of
// one FeMesh.  evaluate() integrates from the committed state to the
// given total strain and parks the result in a trial bank; distinct
// points may be evaluated concurrently.  commit_all() accepts the last
// trial as the new committed state.
class MaterialModel {
 public:
  virtual ~MaterialModel() = default;
  virtual int point_count() const = 0;
  // Returns false when the local update cannot converge (the step is
  // then bisected by the driver).
  virtual bool evaluate(int point, const Voigt3& eps_new, Voigt3& sigma, Matrix3& tangent) = 0;
  virtual void commit_all() = 0;
  virtual double field(int point, PointField f) const = 0;
  virtual Voigt3 committed_stress(int point) const = 0;
};

struct NlOptions {
  double rel_tol = 1e-6;
  int max_iterations = 30;
  int max_bisections = 8;
  double force_floor = 1e-12;  // absolute floor for the reference force norm
};

// Incremental Newton driver with recursive substepping on the load
// parameter.  The committed state survives a failed step, so a partial
// curve is always usable.
class NonlinearFe {
 public:
  NonlinearFe(FeMesh mesh, Constraints constraints, MaterialModel& material, NlOptions opt = {},
              ExecMode mode = ExecMode::Parallel);

  // Advances to the given driver value; false if the substep floor was
  // reached (state = last converged).
  bool advance_to(const Eigen::VectorXd& driver_target);

  const Eigen::VectorXd& displacement() const { return u_; }
  const Eigen::VectorXd& driver() const { return driver_; }
  int newton_iterations_last_step() const { return last_iterations_; }

  // Generalized force conjugate to the driver: G^T f_int.  For the
  // periodic cell this is |cell| * macro stress; for a prescribed-edge
  // problem it is the edge reaction.
  Eigen::VectorXd reaction() const;

  Voigt3 volume_average_stress() const;
  Voigt3 volume_average_strain() const;
  double stored_energy() const;
  double volume() const { return volume_; }

  const FeMesh& mesh() const { return mesh_; }
  MaterialModel& material() { return material_; }
  double element_field(int e, PointField f, bool take_max) const;
  Voigt3 element_stress(int e) const;
  // Total strain at a quadrature point of the committed displacement.
  Voigt3 point_strain(int e, int gp) const;
  // Total strain anywhere in an element's reference square.
  Voigt3 strain_at(int e, double xi, double eta) const;

 private:
  struct AssemblyResult {
    bool ok = true;
    Eigen::VectorXd f_int;
  };

  bool assemble(const Eigen::VectorXd& u, bool need_matrix);
  bool newton(const Eigen::VectorXd& target);
  bool advance_recursive(const Eigen::VectorXd& target, int depth);

  FeMesh mesh_;
  Constraints cons_;
  MaterialModel& material_;
  NlOptions opt_;
  ExecMode mode_;

  int ndof_ = 0;
  double volume_ = 0.0;
  // Cached kinematics: per point B (3 x 2n) and weight detJ*w.
  std::vector<Eigen::MatrixXd> B_;
  std::vector<double> w_;

  Eigen::VectorXd u_;       // committed displacement
  Eigen::VectorXd driver_;  // committed driver
  Eigen::VectorXd f_int_;   // internal force at last assembly
  Eigen::SparseMatrix<double> K_;
  double f_ref_ = 0.0;  // running reference force norm
  int last_iterations_ = 0;
};

}  // namespace romaeh

#endif
