#include "romaeh/rom.hpp"

#include <cmath>

#include "romaeh/errors.hpp"

namespace romaeh {

Matrix3 eigenstrain_increment_tangent(const Matrix3& Lphase, const Matrix3& tangent) {
  return Matrix3::Identity() - Lphase.inverse() * tangent;
}

std::vector<Voigt3> partition_strain_solve(const Voigt3& deps_bar, const CoefficientSet& cs,
                                           const std::vector<Matrix3>& T) {
  const int M = cs.M;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * M, 3 * M);
  Eigen::VectorXd rhs(3 * M);
  for (int b = 0; b < M; ++b) {
    rhs.segment<3>(3 * b) = cs.E[b] * deps_bar;
    for (int g = 0; g < M; ++g) {
      Matrix3 block = -cs.S[g][b] * T[g];
      if (b == g) block += Matrix3::Identity();
      A.block<3, 3>(3 * b, 3 * g) = block;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    // Name the most degraded diagonal block for the report.
    int worst = 0;
    double worst_det = 1e300;
    for (int b = 0; b < M; ++b) {
      const double det = std::abs(A.block<3, 3>(3 * b, 3 * b).determinant());
      if (det < worst_det) {
        worst_det = det;
        worst = b;
      }
    }
    throw SolverError("partition_strain_solve: singular block system (partition " +
                      std::to_string(worst + 1) + ")");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  std::vector<Voigt3> out(M);
  for (int b = 0; b < M; ++b) out[b] = x.segment<3>(3 * b);
  return out;
}

RomMaterial::RomMaterial(CoefficientSet cs, std::vector<PhaseMaterial> mat_of_partition,
                         RomOptions opt)
    : cs_(std::move(cs)), mat_(std::move(mat_of_partition)), opt_(opt) {
  if (static_cast<int>(mat_.size()) != cs_.M)
    throw ConfigError("RomMaterial: one material per partition required");
  Linv_.resize(cs_.M);
  for (int b = 0; b < cs_.M; ++b) Linv_[b] = cs_.Lphase[b].inverse();
}

Voigt3 RomMaterial::macro_stress_partitionwise(const PointState& state) const {
  Voigt3 s = Voigt3::Zero();
  for (int b = 0; b < cs_.M; ++b)
    s += cs_.c[b] * (cs_.Lphase[b] * (state.eps[b] - state.mu[b]));
  return s;
}

// Newton on the coupled residual with eigenstrain increments taken
// from the actual constitutive integration at the current iterate.
RomMaterial::StepOutcome RomMaterial::try_increment(const Voigt3& deps_bar,
                                                    PointState& state) const {
  const int M = cs_.M;
  StepOutcome out;

  std::vector<Voigt3> deps(M);
  for (int b = 0; b < M; ++b) deps[b] = cs_.E[b] * deps_bar;

  std::vector<PointResult> results(M);
  std::vector<Voigt3> dmu(M, Voigt3::Zero());
  std::vector<Matrix3> T(M, Matrix3::Zero());
  const double ref = std::max(deps_bar.norm(), 1e-16);

  for (int it = 0; it < opt_.max_iterations; ++it) {
    bool inelastic = false;
    for (int b = 0; b < M; ++b) {
      const Voigt3 eps_new = state.eps[b] + deps[b];
      results[b] = integrate_point(eps_new, state.phase[b], mat_[b]);
      const Voigt3 mu_new = eps_new - Linv_[b] * results[b].sigma;
      dmu[b] = mu_new - state.mu[b];
      T[b] = eigenstrain_increment_tangent(cs_.Lphase[b], results[b].tangent);
      if (results[b].plastic || results[b].state.omega > 0.0 || state.phase[b].omega > 0.0 ||
          state.phase[b].kappa_p > 0.0)
        inelastic = true;
    }

    Eigen::VectorXd psi(3 * M);
    for (int b = 0; b < M; ++b) {
      Voigt3 r = deps[b] - cs_.E[b] * deps_bar;
      for (int a = 0; a < M; ++a) r -= cs_.S[a][b] * dmu[a];
      psi.segment<3>(3 * b) = r;
    }
    out.iterations = it + 1;
    out.residual = psi.lpNorm<Eigen::Infinity>();
    out.inelastic = inelastic;

    if (out.residual <= opt_.tol * ref) {
      for (int b = 0; b < M; ++b) {
        state.phase[b] = results[b].state;
        state.eps[b] += deps[b];
        state.mu[b] += dmu[b];
        state.last_dmu[b] = dmu[b];
      }
      state.eps_bar += deps_bar;
      out.ok = true;
      return out;
    }

    // Newton correction with the block Jacobian [delta I - S_gb T_g].
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3 * M, 3 * M);
    for (int b = 0; b < M; ++b)
      for (int g = 0; g < M; ++g) {
        Matrix3 block = -cs_.S[g][b] * T[g];
        if (b == g) block += Matrix3::Identity();
        A.block<3, 3>(3 * b, 3 * g) = block;
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return out;
    const Eigen::VectorXd d = lu.solve(-psi);
    for (int b = 0; b < M; ++b) deps[b] += d.segment<3>(3 * b);
  }
  return out;
}

// Literal one-sweep variant: the coupling is resolved with the
// previous step's eigenstrain increments and tangents, without
// iterating the residual to convergence.
RomMaterial::StepOutcome RomMaterial::single_pass_increment(const Voigt3& deps_bar,
                                                            PointState& state) const {
  const int M = cs_.M;
  StepOutcome out;

  std::vector<Voigt3> deps_est(M);
  for (int b = 0; b < M; ++b) {
    deps_est[b] = cs_.E[b] * deps_bar;
    for (int a = 0; a < M; ++a) deps_est[b] += cs_.S[a][b] * state.last_dmu[a];
  }

  std::vector<Matrix3> T(M);
  for (int b = 0; b < M; ++b) {
    const PointResult r = integrate_point(state.eps[b] + deps_est[b], state.phase[b], mat_[b]);
    T[b] = eigenstrain_increment_tangent(cs_.Lphase[b], r.tangent);
  }

  const auto deps = partition_strain_solve(deps_bar, cs_, T);
  bool inelastic = false;
  for (int b = 0; b < M; ++b) {
    const PointResult r = integrate_point(state.eps[b] + deps[b], state.phase[b], mat_[b]);
    if (r.plastic || r.state.omega > 0.0) inelastic = true;
    state.phase[b] = r.state;
    state.eps[b] += deps[b];
    const Voigt3 dmu = T[b] * deps[b];
    state.mu[b] += dmu;
    state.last_dmu[b] = dmu;
  }
  state.eps_bar += deps_bar;
  out.ok = true;
  out.iterations = 1;
  out.inelastic = inelastic;
  return out;
}

bool RomMaterial::advance(const Voigt3& deps_bar, PointState& state, SolveReport& report,
                          int depth) const {
  PointState trial = state;
  const StepOutcome outcome =
      opt_.single_pass ? single_pass_increment(deps_bar, trial) : try_increment(deps_bar, trial);
  report.iterations += outcome.iterations;
  report.residual = outcome.residual;
  if (outcome.ok) {
    state = trial;
    return true;
  }
  if (depth >= opt_.max_bisections) return false;
  const Voigt3 half = 0.5 * deps_bar;
  ++report.substeps;
  return advance(half, state, report, depth + 1) && advance(half, state, report, depth + 1);
}

RomMaterial::UpdateResult RomMaterial::material_update(const Voigt3& deps_bar,
                                                       PointState& state) const {
  UpdateResult result;

  if (deps_bar.norm() == 0.0) {
    result.sigma_bar = macro_stress(state);
    result.tangent = cs_.Lbar;
    result.report.converged = true;
    return result;
  }

  const PointState before = state;
  if (!advance(deps_bar, state, result.report, 0)) {
    state = before;
    throw SolverError("rom material_update failed to converge at substep floor");
  }
  result.report.converged = true;
  result.sigma_bar = macro_stress(state);

  // Elastic shortcut: an untouched history means the response is the
  // homogenized elasticity and the tangent is exactly Lbar.
  bool inelastic = false;
  for (int b = 0; b < cs_.M; ++b) {
    if (state.phase[b].omega > 0.0 || state.phase[b].kappa_p > 0.0 ||
        state.mu[b].cwiseAbs().maxCoeff() > 0.0)
      inelastic = true;
  }
  if (!inelastic) {
    result.tangent = cs_.Lbar;
    return result;
  }

  const double h = std::max(opt_.tangent_perturbation, 1e-9 * deps_bar.norm());
  for (int j = 0; j < 3; ++j) {
    Voigt3 dp = deps_bar;
    dp[j] += h;
    PointState perturbed = before;
    SolveReport scratch;
    if (!advance(dp, perturbed, scratch, 0))
      throw SolverError("rom tangent perturbation failed to converge");
    result.tangent.col(j) = (macro_stress(perturbed) - result.sigma_bar) / h;
  }
  return result;
}

}  // namespace romaeh
