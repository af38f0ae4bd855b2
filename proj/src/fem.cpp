#include "romaeh/fem.hpp"

#include <cmath>

#include "romaeh/errors.hpp"

namespace romaeh {

void q4_gauss_point(int p, double& xi, double& eta, double& w) {
  static const double g = 1.0 / std::sqrt(3.0);
  xi = (p == 1 || p == 2) ? g : -g;
  eta = (p >= 2) ? g : -g;
  w = 1.0;
}

void q4_bmatrix(const std::array<Eigen::Vector2d, 4>& xy, double xi, double eta,
                Eigen::Matrix<double, 3, 8>& B, double& detJ) {
  // dN/dxi, dN/deta for the bilinear quad, node order CCW from (-1,-1).
  const double dxi[4] = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const double det[4] = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};

  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int a = 0; a < 4; ++a) {
    J(0, 0) += dxi[a] * xy[a].x();
    J(0, 1) += dxi[a] * xy[a].y();
    J(1, 0) += det[a] * xy[a].x();
    J(1, 1) += det[a] * xy[a].y();
  }
  detJ = J.determinant();
  if (detJ <= 0.0) throw SolverError("non-positive element Jacobian");
  const Eigen::Matrix2d Jinv = J.inverse();

  B.setZero();
  for (int a = 0; a < 4; ++a) {
    const double dNdx = Jinv(0, 0) * dxi[a] + Jinv(0, 1) * det[a];
    const double dNdy = Jinv(1, 0) * dxi[a] + Jinv(1, 1) * det[a];
    B(0, 2 * a) = dNdx;
    B(1, 2 * a + 1) = dNdy;
    B(2, 2 * a) = dNdy;
    B(2, 2 * a + 1) = dNdx;
  }
}

Eigen::Matrix<double, 8, 8> element_stiffness(const std::array<Eigen::Vector2d, 4>& xy,
                                              const Matrix3& C) {
  Eigen::Matrix<double, 8, 8> K = Eigen::Matrix<double, 8, 8>::Zero();
  Eigen::Matrix<double, 3, 8> B;
  double detJ, xi, eta, w;
  for (int p = 0; p < kQ4Gauss; ++p) {
    q4_gauss_point(p, xi, eta, w);
    q4_bmatrix(xy, xi, eta, B, detJ);
    K += B.transpose() * C * B * (detJ * w);
  }
  return K;
}

namespace {

std::array<Eigen::Vector2d, 4> element_coords(const RveMesh& mesh, int e) {
  std::array<Eigen::Vector2d, 4> xy;
  for (int a = 0; a < 4; ++a) xy[a] = mesh.nodes[mesh.elements[e][a]];
  return xy;
}

}  // namespace

Eigen::VectorXd eigenstrain_load(const RveMesh& mesh, int beta, const Voigt3& mu,
                                 const std::vector<Matrix3>& C_of_element) {
  if (beta < 1 || beta > mesh.num_partitions())
    throw ConfigError("eigenstrain_load: partition " + std::to_string(beta) + " does not exist");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * mesh.nodes.size());
  Eigen::Matrix<double, 3, 8> B;
  double detJ, xi, eta, w;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    if (mesh.partition_of_element[e] != beta) continue;
    const auto xy = element_coords(mesh, static_cast<int>(e));
    const Voigt3 sig0 = C_of_element[e] * mu;
    Eigen::Matrix<double, 8, 1> fe = Eigen::Matrix<double, 8, 1>::Zero();
    for (int p = 0; p < kQ4Gauss; ++p) {
      q4_gauss_point(p, xi, eta, w);
      q4_bmatrix(xy, xi, eta, B, detJ);
      fe += B.transpose() * sig0 * (detJ * w);
    }
    for (int a = 0; a < 4; ++a) {
      const int n = mesh.elements[e][a];
      f[2 * n] += fe[2 * a];
      f[2 * n + 1] += fe[2 * a + 1];
    }
  }
  return f;
}

PeriodicSystem::PeriodicSystem(const RveMesh& mesh, const std::vector<Matrix3>& C_of_element,
                               ExecMode mode)
    : mesh_(mesh), ndof_(2 * static_cast<int>(mesh.nodes.size())) {
  build_constraints(mesh);
  assemble(mesh, C_of_element, mode);
}

void PeriodicSystem::build_constraints(const RveMesh& mesh) {
  const int nn = static_cast<int>(mesh.nodes.size());
  PeriodicRoots roots = resolve_periodic_roots(mesh);
  root_of_node_ = std::move(roots.root_of_node);
  offset_of_node_ = std::move(roots.offset_of_node);

  // Anchor the root node nearest the origin to remove rigid translation.
  double best = 1e300;
  for (int n = 0; n < nn; ++n) {
    if (root_of_node_[n] != n) continue;
    const double d = mesh.nodes[n].squaredNorm();
    if (d < best) {
      best = d;
      anchor_ = n;
    }
  }

  reduced_of_dof_.assign(ndof_, -1);
  int next = 0;
  for (int n = 0; n < nn; ++n) {
    if (root_of_node_[n] != n || n == anchor_) continue;
    reduced_of_dof_[2 * n] = next++;
    reduced_of_dof_[2 * n + 1] = next++;
  }
  anchored_count_ = 0;

  std::vector<Eigen::Triplet<double>> trip;
  for (int n = 0; n < nn; ++n) {
    const int root = root_of_node_[n];
    for (int d = 0; d < 2; ++d) {
      const int r = reduced_of_dof_[2 * root + d];
      if (r >= 0) trip.emplace_back(2 * n + d, r, 1.0);
    }
  }
  T_.resize(ndof_, next);
  T_.setFromTriplets(trip.begin(), trip.end());
}

void PeriodicSystem::assemble(const RveMesh& mesh, const std::vector<Matrix3>& C_of_element,
                              ExecMode mode) {
  const int ne = static_cast<int>(mesh.elements.size());
  std::vector<Eigen::Matrix<double, 8, 8>> Ke(ne);

  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int e = 0; e < ne; ++e)
      Ke[e] = element_stiffness(element_coords(mesh, e), C_of_element[e]);
  } else {
    for (int e = 0; e < ne; ++e)
      Ke[e] = element_stiffness(element_coords(mesh, e), C_of_element[e]);
  }

  // Scatter serially in element order so the triplet list, and hence
  // the assembled matrix, does not depend on the thread count.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(ne) * 64);
  for (int e = 0; e < ne; ++e) {
    const auto& conn = mesh.elements[e];
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 2; ++i)
        for (int b = 0; b < 4; ++b)
          for (int j = 0; j < 2; ++j)
            trip.emplace_back(2 * conn[a] + i, 2 * conn[b] + j, Ke[e](2 * a + i, 2 * b + j));
  }
  K_.resize(ndof_, ndof_);
  K_.setFromTriplets(trip.begin(), trip.end());

  Kred_ = T_.transpose() * K_ * T_;
  llt_.compute(Kred_);
  if (llt_.info() != Eigen::Success)
    throw SolverError("periodic system factorization failed (singular or indefinite)");
}

Eigen::VectorXd PeriodicSystem::tie_offsets(const Voigt3& macro_strain) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(ndof_);
  const Eigen::Matrix2d eps = strain_tensor(macro_strain);
  for (size_t n = 0; n < mesh_.nodes.size(); ++n) {
    if (root_of_node_[n] == static_cast<int>(n)) continue;
    const Eigen::Vector2d du = eps * offset_of_node_[n];
    g[2 * n] = du.x();
    g[2 * n + 1] = du.y();
  }
  return g;
}

Eigen::VectorXd PeriodicSystem::solve(const Voigt3& macro_strain) const {
  return solve(macro_strain, Eigen::VectorXd::Zero(ndof_));
}

Eigen::VectorXd PeriodicSystem::solve(const Voigt3& macro_strain,
                                      const Eigen::VectorXd& load) const {
  const Eigen::VectorXd g = tie_offsets(macro_strain);
  const Eigen::VectorXd rhs = T_.transpose() * (load - K_ * g);
  Eigen::VectorXd u_red = llt_.solve(rhs);

  const double rhs_norm = rhs.norm();
  double res = (Kred_ * u_red - rhs).norm();
  if (res > 1e-10 * std::max(rhs_norm, 1e-30)) {
    u_red += llt_.solve(rhs - Kred_ * u_red);  // one refinement pass
    res = (Kred_ * u_red - rhs).norm();
    if (res > 1e-10 * std::max(rhs_norm, 1e-30))
      throw SolverError("periodic solve residual " + std::to_string(res) + " exceeds tolerance");
  }
  return T_ * u_red + g;
}

Voigt3 PeriodicSystem::reaction_macro_stress(const Eigen::VectorXd& u,
                                             const Eigen::VectorXd& load) const {
  // Constraint forces live in the unreduced residual at slave dofs;
  // virtual work against a field moving with the macro strain gives
  // |cell| sigma_bar = sum_slaves sym(f_slave (x) offset).
  const Eigen::VectorXd r = K_ * u - load;
  Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
  for (size_t n = 0; n < mesh_.nodes.size(); ++n) {
    if (root_of_node_[n] == static_cast<int>(n)) continue;
    const Eigen::Vector2d f(r[2 * n], r[2 * n + 1]);
    s += f * offset_of_node_[n].transpose();
  }
  s = 0.5 * (s + s.transpose()).eval();
  const double vol = mesh_.total_area();
  return Voigt3(s(0, 0), s(1, 1), s(0, 1)) / vol;
}

std::vector<Voigt3> partition_average_strain(const RveMesh& mesh, const Eigen::VectorXd& u) {
  const int m = mesh.num_partitions();
  if (m == 0) throw ConfigError("partition averages need assigned partitions");
  std::vector<Voigt3> avg(m, Voigt3::Zero());
  std::vector<double> vol(m, 0.0);
  Eigen::Matrix<double, 3, 8> B;
  double detJ, xi, eta, w;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto xy = element_coords(mesh, static_cast<int>(e));
    Eigen::Matrix<double, 8, 1> ue;
    for (int a = 0; a < 4; ++a) {
      const int n = mesh.elements[e][a];
      ue[2 * a] = u[2 * n];
      ue[2 * a + 1] = u[2 * n + 1];
    }
    const int b = mesh.partition_of_element[e] - 1;
    for (int p = 0; p < kQ4Gauss; ++p) {
      q4_gauss_point(p, xi, eta, w);
      q4_bmatrix(xy, xi, eta, B, detJ);
      avg[b] += (B * ue) * (detJ * w);
      vol[b] += detJ * w;
    }
  }
  for (int b = 0; b < m; ++b) avg[b] /= vol[b];
  return avg;
}

std::vector<Voigt3> partition_average_stress(const RveMesh& mesh, const Eigen::VectorXd& u,
                                             const std::vector<Matrix3>& C_of_element,
                                             const std::vector<Voigt3>* mu_of_partition) {
  const int m = mesh.num_partitions();
  if (m == 0) throw ConfigError("partition averages need assigned partitions");
  std::vector<Voigt3> avg(m, Voigt3::Zero());
  std::vector<double> vol(m, 0.0);
  Eigen::Matrix<double, 3, 8> B;
  double detJ, xi, eta, w;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto xy = element_coords(mesh, static_cast<int>(e));
    Eigen::Matrix<double, 8, 1> ue;
    for (int a = 0; a < 4; ++a) {
      const int n = mesh.elements[e][a];
      ue[2 * a] = u[2 * n];
      ue[2 * a + 1] = u[2 * n + 1];
    }
    const int b = mesh.partition_of_element[e] - 1;
    const Voigt3 mu = mu_of_partition ? (*mu_of_partition)[b] : Voigt3::Zero();
    for (int p = 0; p < kQ4Gauss; ++p) {
      q4_gauss_point(p, xi, eta, w);
      q4_bmatrix(xy, xi, eta, B, detJ);
      const Voigt3 eps = B * ue;
      avg[b] += C_of_element[e] * (eps - mu) * (detJ * w);
      vol[b] += detJ * w;
    }
  }
  for (int b = 0; b < m; ++b) avg[b] /= vol[b];
  return avg;
}

Voigt3 volume_average_strain(const RveMesh& mesh, const Eigen::VectorXd& u) {
  const auto per = partition_average_strain(mesh, u);
  const auto c = partition_volume_fractions(mesh);
  Voigt3 out = Voigt3::Zero();
  for (size_t b = 0; b < per.size(); ++b) out += c[b] * per[b];
  return out;
}

Voigt3 volume_average_stress(const RveMesh& mesh, const Eigen::VectorXd& u,
                             const std::vector<Matrix3>& C_of_element,
                             const std::vector<Voigt3>* mu_of_partition) {
  const auto per = partition_average_stress(mesh, u, C_of_element, mu_of_partition);
  const auto c = partition_volume_fractions(mesh);
  Voigt3 out = Voigt3::Zero();
  for (size_t b = 0; b < per.size(); ++b) out += c[b] * per[b];
  return out;
}

std::vector<Matrix3> element_stiffness_matrices(const RveMesh& mesh, const Matrix3& C_fiber,
                                                const Matrix3& C_matrix) {
  std::vector<Matrix3> out(mesh.elements.size());
  for (size_t e = 0; e < mesh.elements.size(); ++e)
    out[e] = mesh.phase_of_element[e] == Phase::Fiber ? C_fiber : C_matrix;
  return out;
}

}  // namespace romaeh
