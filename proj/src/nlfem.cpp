#include "romaeh/nlfem.hpp"

#include <Eigen/SparseLU>

#include <cmath>

#include "romaeh/errors.hpp"

namespace romaeh {

FeMesh fe_from_rve(const RveMesh& mesh) {
  FeMesh fe;
  fe.nodes = mesh.nodes;
  fe.nodes_per_element = 4;
  fe.elements.reserve(mesh.elements.size());
  for (const auto& conn : mesh.elements) fe.elements.push_back({conn[0], conn[1], conn[2], conn[3]});
  return fe;
}

void fe_shape(int npe, double xi, double eta, double* N, double* dxi, double* deta) {
  if (npe == 4) {
    const double xm = 1 - xi, xp = 1 + xi, em = 1 - eta, ep = 1 + eta;
    if (N) {
      N[0] = 0.25 * xm * em;
      N[1] = 0.25 * xp * em;
      N[2] = 0.25 * xp * ep;
      N[3] = 0.25 * xm * ep;
    }
    dxi[0] = -0.25 * em; dxi[1] = 0.25 * em; dxi[2] = 0.25 * ep; dxi[3] = -0.25 * ep;
    deta[0] = -0.25 * xm; deta[1] = -0.25 * xp; deta[2] = 0.25 * xp; deta[3] = 0.25 * xm;
    return;
  }
  // 8-node serendipity: corners 0..3 CCW from (-1,-1), then midsides
  // 4 (bottom), 5 (right), 6 (top), 7 (left).
  const double x = xi, e = eta;
  if (N) {
    N[0] = 0.25 * (1 - x) * (1 - e) * (-x - e - 1);
    N[1] = 0.25 * (1 + x) * (1 - e) * (x - e - 1);
    N[2] = 0.25 * (1 + x) * (1 + e) * (x + e - 1);
    N[3] = 0.25 * (1 - x) * (1 + e) * (-x + e - 1);
    N[4] = 0.5 * (1 - x * x) * (1 - e);
    N[5] = 0.5 * (1 + x) * (1 - e * e);
    N[6] = 0.5 * (1 - x * x) * (1 + e);
    N[7] = 0.5 * (1 - x) * (1 - e * e);
  }
  dxi[0] = 0.25 * (1 - e) * (2 * x + e);
  dxi[1] = 0.25 * (1 - e) * (2 * x - e);
  dxi[2] = 0.25 * (1 + e) * (2 * x + e);
  dxi[3] = 0.25 * (1 + e) * (2 * x - e);
  dxi[4] = -x * (1 - e);
  dxi[5] = 0.5 * (1 - e * e);
  dxi[6] = -x * (1 + e);
  dxi[7] = -0.5 * (1 - e * e);
  deta[0] = 0.25 * (1 - x) * (2 * e + x);
  deta[1] = 0.25 * (1 + x) * (2 * e - x);
  deta[2] = 0.25 * (1 + x) * (2 * e + x);
  deta[3] = 0.25 * (1 - x) * (2 * e - x);
  deta[4] = -0.5 * (1 - x * x);
  deta[5] = -(1 + x) * e;
  deta[6] = 0.5 * (1 - x * x);
  deta[7] = -(1 - x) * e;
}

void fe_gauss(int npe, int p, double& xi, double& eta, double& w) {
  if (npe == 4) {
    const double g = 1.0 / std::sqrt(3.0);
    xi = (p == 1 || p == 2) ? g : -g;
    eta = (p >= 2) ? g : -g;
    w = 1.0;
    return;
  }
  static const double a[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double ww[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  xi = a[p % 3];
  eta = a[p / 3];
  w = ww[p % 3] * ww[p / 3];
}

Constraints::Constraints(int ndof, int ndriver) : ndof_(ndof), ndriver_(ndriver) {
  master_of_dof_.resize(ndof);
  for (int d = 0; d < ndof; ++d) master_of_dof_[d] = d;
  gcoef_.assign(ndof, Eigen::RowVectorXd::Zero(ndriver));
}

void Constraints::tie(int slave_dof, int master_dof, const Eigen::RowVectorXd& gcoef) {
  master_of_dof_[slave_dof] = master_dof;
  gcoef_[slave_dof] = gcoef;
}

void Constraints::fix(int dof, const Eigen::RowVectorXd& gcoef) {
  master_of_dof_[dof] = -2;
  gcoef_[dof] = gcoef;
}

void Constraints::finalize() {
  std::vector<int> reduced(ndof_, -1);
  int next = 0;
  for (int d = 0; d < ndof_; ++d)
    if (master_of_dof_[d] == d) reduced[d] = next++;

  std::vector<Eigen::Triplet<double>> tt, tg;
  for (int d = 0; d < ndof_; ++d) {
    const int m = master_of_dof_[d];
    if (m >= 0) {
      if (reduced[m] < 0) throw ConfigError("constraints: tie references a non-free master dof");
      tt.emplace_back(d, reduced[m], 1.0);
    }
    for (int k = 0; k < ndriver_; ++k)
      if (gcoef_[d][k] != 0.0) tg.emplace_back(d, k, gcoef_[d][k]);
  }
  T_.resize(ndof_, next);
  T_.setFromTriplets(tt.begin(), tt.end());
  G_.resize(ndof_, ndriver_);
  G_.setFromTriplets(tg.begin(), tg.end());
  finalized_ = true;
}

Constraints Constraints::periodic_cell(const RveMesh& mesh, int anchor_hint) {
  const int nn = static_cast<int>(mesh.nodes.size());
  Constraints cons(2 * nn, 3);
  const PeriodicRoots roots = resolve_periodic_roots(mesh);

  int anchor = anchor_hint;
  if (anchor < 0) {
    double best = 1e300;
    for (int n = 0; n < nn; ++n) {
      if (roots.root_of_node[n] != n) continue;
      const double d = mesh.nodes[n].squaredNorm();
      if (d < best) {
        best = d;
        anchor = n;
      }
    }
  }

  for (int n = 0; n < nn; ++n) {
    const int root = roots.root_of_node[n];
    if (root == n) continue;
    const Eigen::Vector2d y0 = roots.offset_of_node[n];
    Eigen::RowVectorXd gx(3), gy(3);
    gx << y0.x(), 0.0, 0.5 * y0.y();
    gy << 0.0, y0.y(), 0.5 * y0.x();
    cons.tie(2 * n, 2 * root, gx);
    cons.tie(2 * n + 1, 2 * root + 1, gy);
  }
  cons.fix(2 * anchor);
  cons.fix(2 * anchor + 1);
  cons.finalize();
  return cons;
}

NonlinearFe::NonlinearFe(FeMesh mesh, Constraints constraints, MaterialModel& material,
                         NlOptions opt, ExecMode mode)
    : mesh_(std::move(mesh)), cons_(std::move(constraints)), material_(material), opt_(opt),
      mode_(mode) {
  ndof_ = 2 * static_cast<int>(mesh_.nodes.size());
  const int npe = mesh_.nodes_per_element;
  const int ngp = mesh_.gauss_per_element();
  const int ne = static_cast<int>(mesh_.elements.size());
  if (material_.point_count() != ne * ngp)
    throw ConfigError("material model does not match the mesh quadrature point count");

  B_.resize(static_cast<size_t>(ne) * ngp);
  w_.resize(static_cast<size_t>(ne) * ngp);
  std::vector<double> dxi(npe), deta(npe);
  for (int e = 0; e < ne; ++e) {
    for (int p = 0; p < ngp; ++p) {
      double xi, eta, wq;
      fe_gauss(npe, p, xi, eta, wq);
      fe_shape(npe, xi, eta, nullptr, dxi.data(), deta.data());
      Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
      for (int a = 0; a < npe; ++a) {
        const Eigen::Vector2d& x = mesh_.nodes[mesh_.elements[e][a]];
        J(0, 0) += dxi[a] * x.x();
        J(0, 1) += dxi[a] * x.y();
        J(1, 0) += deta[a] * x.x();
        J(1, 1) += deta[a] * x.y();
      }
      const double detJ = J.determinant();
      if (detJ <= 0.0) throw ConfigError("inverted element in nonlinear mesh");
      const Eigen::Matrix2d Jinv = J.inverse();
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * npe);
      for (int a = 0; a < npe; ++a) {
        const double dNdx = Jinv(0, 0) * dxi[a] + Jinv(0, 1) * deta[a];
        const double dNdy = Jinv(1, 0) * dxi[a] + Jinv(1, 1) * deta[a];
        B(0, 2 * a) = dNdx;
        B(1, 2 * a + 1) = dNdy;
        B(2, 2 * a) = dNdy;
        B(2, 2 * a + 1) = dNdx;
      }
      B_[static_cast<size_t>(e) * ngp + p] = std::move(B);
      w_[static_cast<size_t>(e) * ngp + p] = detJ * wq;
      volume_ += detJ * wq;
    }
  }

  u_ = Eigen::VectorXd::Zero(ndof_);
  driver_ = Eigen::VectorXd::Zero(cons_.ndriver());
  f_int_ = Eigen::VectorXd::Zero(ndof_);
}

bool NonlinearFe::assemble(const Eigen::VectorXd& u, bool need_matrix) {
  const int npe = mesh_.nodes_per_element;
  const int ngp = mesh_.gauss_per_element();
  const int ne = static_cast<int>(mesh_.elements.size());

  std::vector<Eigen::VectorXd> fe(ne);
  std::vector<Eigen::MatrixXd> Ke(need_matrix ? ne : 0);
  bool ok = true;

  auto element_kernel = [&](int e) {
    Eigen::VectorXd ue(2 * npe);
    for (int a = 0; a < npe; ++a) {
      const int n = mesh_.elements[e][a];
      ue[2 * a] = u[2 * n];
      ue[2 * a + 1] = u[2 * n + 1];
    }
    Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * npe);
    Eigen::MatrixXd K;
    if (need_matrix) K = Eigen::MatrixXd::Zero(2 * npe, 2 * npe);
    for (int p = 0; p < ngp; ++p) {
      const int pt = e * ngp + p;
      const Voigt3 eps = B_[pt] * ue;
      Voigt3 sig;
      Matrix3 D;
      if (!material_.evaluate(pt, eps, sig, D)) {
#pragma omp atomic write
        ok = false;
        return;
      }
      f += B_[pt].transpose() * sig * w_[pt];
      if (need_matrix) K += B_[pt].transpose() * D * B_[pt] * w_[pt];
    }
    fe[e] = std::move(f);
    if (need_matrix) Ke[e] = std::move(K);
  };

  if (mode_ == ExecMode::Parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int e = 0; e < ne; ++e) element_kernel(e);
  } else {
    for (int e = 0; e < ne; ++e) element_kernel(e);
  }
  if (!ok) return false;

  // Serial scatter in element order keeps the result independent of
  // the thread count.
  f_int_.setZero();
  for (int e = 0; e < ne; ++e)
    for (int a = 0; a < npe; ++a) {
      const int n = mesh_.elements[e][a];
      f_int_[2 * n] += fe[e][2 * a];
      f_int_[2 * n + 1] += fe[e][2 * a + 1];
    }

  if (need_matrix) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(ne) * 4 * npe * npe);
    for (int e = 0; e < ne; ++e) {
      const auto& conn = mesh_.elements[e];
      for (int a = 0; a < npe; ++a)
        for (int i = 0; i < 2; ++i)
          for (int b = 0; b < npe; ++b)
            for (int j = 0; j < 2; ++j)
              trip.emplace_back(2 * conn[a] + i, 2 * conn[b] + j, Ke[e](2 * a + i, 2 * b + j));
    }
    K_.resize(ndof_, ndof_);
    K_.setFromTriplets(trip.begin(), trip.end());
  }
  return true;
}

bool NonlinearFe::newton(const Eigen::VectorXd& target) {
  const auto& T = cons_.T();
  const auto& G = cons_.G();

  // Affine predictor: move the constrained dofs with the driver.
  Eigen::VectorXd u = u_ + G * (target - driver_);

  for (int it = 0; it < opt_.max_iterations; ++it) {
    if (!assemble(u, true)) return false;
    const Eigen::VectorXd r = T.transpose() * f_int_;
    f_ref_ = std::max(f_ref_, f_int_.norm());
    last_iterations_ = it + 1;
    if (r.norm() <= opt_.rel_tol * std::max(f_ref_, opt_.force_floor)) {
      u_ = u;
      driver_ = target;
      material_.commit_all();
      return true;
    }

    Eigen::SparseMatrix<double> Kr = T.transpose() * K_ * T;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Kr);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd du = lu.solve(-r);
    if (!du.allFinite()) return false;
    u += T * du;
  }
  return false;
}

bool NonlinearFe::advance_recursive(const Eigen::VectorXd& target, int depth) {
  if (newton(target)) return true;
  if (depth >= opt_.max_bisections) return false;
  const Eigen::VectorXd mid = 0.5 * (driver_ + target);
  return advance_recursive(mid, depth + 1) && advance_recursive(target, depth + 1);
}

bool NonlinearFe::advance_to(const Eigen::VectorXd& driver_target) {
  if ((driver_target - driver_).norm() == 0.0) return true;
  return advance_recursive(driver_target, 0);
}

Eigen::VectorXd NonlinearFe::reaction() const { return cons_.G().transpose() * f_int_; }

Voigt3 NonlinearFe::volume_average_stress() const {
  Voigt3 s = Voigt3::Zero();
  const int np = material_.point_count();
  for (int p = 0; p < np; ++p) s += material_.committed_stress(p) * w_[p];
  return s / volume_;
}

Voigt3 NonlinearFe::volume_average_strain() const {
  const int npe = mesh_.nodes_per_element;
  const int ngp = mesh_.gauss_per_element();
  Voigt3 out = Voigt3::Zero();
  for (size_t e = 0; e < mesh_.elements.size(); ++e) {
    Eigen::VectorXd ue(2 * npe);
    for (int a = 0; a < npe; ++a) {
      const int n = mesh_.elements[e][a];
      ue[2 * a] = u_[2 * n];
      ue[2 * a + 1] = u_[2 * n + 1];
    }
    for (int p = 0; p < ngp; ++p) {
      const size_t pt = e * ngp + p;
      out += (B_[pt] * ue) * w_[pt];
    }
  }
  return out / volume_;
}

double NonlinearFe::stored_energy() const {
  double psi = 0.0;
  const int np = material_.point_count();
  for (int p = 0; p < np; ++p) psi += material_.field(p, PointField::Psi) * w_[p];
  return psi;
}

double NonlinearFe::element_field(int e, PointField f, bool take_max) const {
  const int ngp = mesh_.gauss_per_element();
  double acc = take_max ? -1e300 : 0.0;
  double wsum = 0.0;
  for (int p = 0; p < ngp; ++p) {
    const int pt = e * ngp + p;
    const double v = material_.field(pt, f);
    if (take_max)
      acc = std::max(acc, v);
    else {
      acc += v * w_[pt];
      wsum += w_[pt];
    }
  }
  return take_max ? acc : acc / wsum;
}

Voigt3 NonlinearFe::element_stress(int e) const {
  const int ngp = mesh_.gauss_per_element();
  Voigt3 acc = Voigt3::Zero();
  double wsum = 0.0;
  for (int p = 0; p < ngp; ++p) {
    const int pt = e * ngp + p;
    acc += material_.committed_stress(pt) * w_[pt];
    wsum += w_[pt];
  }
  return acc / wsum;
}

Voigt3 NonlinearFe::point_strain(int e, int gp) const {
  const int npe = mesh_.nodes_per_element;
  Eigen::VectorXd ue(2 * npe);
  for (int a = 0; a < npe; ++a) {
    const int n = mesh_.elements[e][a];
    ue[2 * a] = u_[2 * n];
    ue[2 * a + 1] = u_[2 * n + 1];
  }
  return B_[static_cast<size_t>(e) * mesh_.gauss_per_element() + gp] * ue;
}

Voigt3 NonlinearFe::strain_at(int e, double xi, double eta) const {
  const int npe = mesh_.nodes_per_element;
  std::vector<double> dxi(npe), deta(npe);
  fe_shape(npe, xi, eta, nullptr, dxi.data(), deta.data());
  Eigen::Matrix2d J = Eigen::Matrix2d::Zero();
  for (int a = 0; a < npe; ++a) {
    const Eigen::Vector2d& x = mesh_.nodes[mesh_.elements[e][a]];
    J(0, 0) += dxi[a] * x.x();
    J(0, 1) += dxi[a] * x.y();
    J(1, 0) += deta[a] * x.x();
    J(1, 1) += deta[a] * x.y();
  }
  const Eigen::Matrix2d Jinv = J.inverse();
  Voigt3 eps = Voigt3::Zero();
  for (int a = 0; a < npe; ++a) {
    const int n = mesh_.elements[e][a];
    const double dNdx = Jinv(0, 0) * dxi[a] + Jinv(0, 1) * deta[a];
    const double dNdy = Jinv(1, 0) * dxi[a] + Jinv(1, 1) * deta[a];
    eps[0] += dNdx * u_[2 * n];
    eps[1] += dNdy * u_[2 * n + 1];
    eps[2] += dNdy * u_[2 * n] + dNdx * u_[2 * n + 1];
  }
  return eps;
}

}  // namespace romaeh
