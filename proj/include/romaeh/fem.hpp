#ifndef ROMAEH_FEM_HPP
#define ROMAEH_FEM_HPP

#include <Eigen/Sparse>

#include <array>
#include <vector>

#include "romaeh/mesh.hpp"
#include "romaeh/parallel.hpp"
#include "romaeh/voigt.hpp"

namespace romaeh {

// Plane-strain bilinear quadrilateral, 2x2 Gauss quadrature throughout.
constexpr int kQ4Gauss = 4;

// B-matrix (3x8, engineering shear) and Jacobian determinant of a Q4
// element at one quadrature point, reference coordinates (xi, eta).
void q4_bmatrix(const std::array<Eigen::Vector2d, 4>& xy, double xi, double eta,
                Eigen::Matrix<double, 3, 8>& B, double& detJ);

// Quadrature point p in 0..3: abscissa +-1/sqrt(3), weight 1.
void q4_gauss_point(int p, double& xi, double& eta, double& w);

// Stiffness of one element; symmetric, with the three rigid-body modes
// in its null space.  Throws SolverError on a non-positive Jacobian.
Eigen::Matrix<double, 8, 8> element_stiffness(const std::array<Eigen::Vector2d, 4>& xy,
                                              const Matrix3& C);

// Equivalent nodal force of a stress-free strain mu imposed on every
// element of partition beta: assembly of B^T C mu over that partition.
Eigen::VectorXd eigenstrain_load(const RveMesh& mesh, int beta, const Voigt3& mu,
                                 const std::vector<Matrix3>& C_of_element);

// Linear periodic cell problem.  Slave dofs are eliminated against
// their (chained) masters, one root node is anchored, and the reduced
// symmetric positive definite system is factored once with a sparse
// Cholesky decomposition; all load cases reuse the factorization.
//
// The tie u_slave = u_master + eps_macro * offset is enforced exactly,
// so the solved displacement field already carries the affine part of
// the applied macro strain.
class PeriodicSystem {
 public:
  PeriodicSystem(const RveMesh& mesh, const std::vector<Matrix3>& C_of_element,
                 ExecMode mode = ExecMode::Parallel);

  // Full nodal displacement under a macro strain plus an optional
  // pre-assembled nodal load (e.g. an eigenstrain load).  Residual is
  // verified against 1e-10 * |rhs| with one refinement pass.
  Eigen::VectorXd solve(const Voigt3& macro_strain) const;
  Eigen::VectorXd solve(const Voigt3& macro_strain, const Eigen::VectorXd& load) const;

  int reduced_dofs() const { return static_cast<int>(reduced_of_dof_.size()) - anchored_count_; }
  int anchor_node() const { return anchor_; }

  // Constraint forces recovered at slave/anchor dofs for the last
  // solved field; used for the reaction route to the macro stress.
  Voigt3 reaction_macro_stress(const Eigen::VectorXd& u, const Eigen::VectorXd& load) const;

 private:
  void build_constraints(const RveMesh& mesh);
  void assemble(const RveMesh& mesh, const std::vector<Matrix3>& C_of_element, ExecMode mode);

  const RveMesh& mesh_;
  int ndof_ = 0;
  int anchor_ = -1;
  int anchored_count_ = 0;
  // Per node: resolved root master and accumulated period offset.
  std::vector<int> root_of_node_;
  std::vector<Eigen::Vector2d> offset_of_node_;
  std::vector<int> reduced_of_dof_;  // -1 for eliminated dofs
  Eigen::SparseMatrix<double> K_;     // full, symmetric
  Eigen::SparseMatrix<double> T_;     // full-dof x reduced-dof selection
  Eigen::SparseMatrix<double> Kred_;  // T^T K T
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;

  Eigen::VectorXd tie_offsets(const Voigt3& macro_strain) const;
};

// Volume-weighted average total strain per partition (index beta-1).
std::vector<Voigt3> partition_average_strain(const RveMesh& mesh, const Eigen::VectorXd& u);

// Volume-weighted average stress per partition for a linear elastic
// field with an optional per-partition eigenstrain.
std::vector<Voigt3> partition_average_stress(const RveMesh& mesh, const Eigen::VectorXd& u,
                                             const std::vector<Matrix3>& C_of_element,
                                             const std::vector<Voigt3>* mu_of_partition = nullptr);

Voigt3 volume_average_strain(const RveMesh& mesh, const Eigen::VectorXd& u);
Voigt3 volume_average_stress(const RveMesh& mesh, const Eigen::VectorXd& u,
                             const std::vector<Matrix3>& C_of_element,
                             const std::vector<Voigt3>* mu_of_partition = nullptr);

// Per-element elastic matrices from per-phase materials.
std::vector<Matrix3> element_stiffness_matrices(const RveMesh& mesh, const Matrix3& C_fiber,
                                                const Matrix3& C_matrix);

}  // namespace romaeh

#endif
