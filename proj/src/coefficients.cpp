#include "romaeh/coefficients.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "romaeh/errors.hpp"
#include "romaeh/parallel.hpp"

namespace romaeh {

Voigt3 CoefficientSet::macro_stress(const Voigt3& eps_bar, const std::vector<Voigt3>& mu) const {
  Voigt3 s = Lbar * eps_bar;
  for (int a = 0; a < M; ++a) s += Mbar[a] * mu[a];
  return s;
}

std::vector<Matrix3> compute_elastic_coefficients(const RveMesh& mesh,
                                                  const PeriodicSystem& system) {
  const int M = mesh.num_partitions();
  std::vector<Matrix3> E(M, Matrix3::Zero());
  for (int j = 0; j < 3; ++j) {
    Voigt3 unit = Voigt3::Zero();
    unit[j] = 1.0;
    const Eigen::VectorXd u = system.solve(unit);
    const auto avg = partition_average_strain(mesh, u);
    for (int b = 0; b < M; ++b) E[b].col(j) = avg[b];
  }
  return E;
}

std::vector<std::vector<Matrix3>> compute_eigenstrain_coefficients(
    const RveMesh& mesh, const PeriodicSystem& system, const std::vector<Matrix3>& C_of_element,
    ExecMode mode) {
  const int M = mesh.num_partitions();
  std::vector<std::vector<Matrix3>> S(M, std::vector<Matrix3>(M, Matrix3::Zero()));

  // 3M independent cases against the shared factorization.
  const int cases = 3 * M;
  std::vector<std::vector<Voigt3>> avg_of_case(cases);

  auto run_case = [&](int k) {
    const int a = k / 3;
    const int j = k % 3;
    Voigt3 mu = Voigt3::Zero();
    mu[j] = 1.0;
    const Eigen::VectorXd f = eigenstrain_load(mesh, a + 1, mu, C_of_element);
    const Eigen::VectorXd u = system.solve(Voigt3::Zero(), f);
    avg_of_case[k] = partition_average_strain(mesh, u);
  };

  if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
    for (int k = 0; k < cases; ++k) run_case(k);
  } else {
    for (int k = 0; k < cases; ++k) run_case(k);
  }

  // Deterministic merge in (source, receiver, column) order.
  for (int k = 0; k < cases; ++k) {
    const int a = k / 3;
    const int j = k % 3;
    for (int b = 0; b < M; ++b) S[a][b].col(j) = avg_of_case[k][b];
  }
  return S;
}

void compute_homogenized_moduli(CoefficientSet& cs) {
  cs.Lbar.setZero();
  cs.Mbar.assign(cs.M, Matrix3::Zero());
  for (int b = 0; b < cs.M; ++b) cs.Lbar += cs.c[b] * cs.Lphase[b] * cs.E[b];
  for (int a = 0; a < cs.M; ++a) {
    for (int b = 0; b < cs.M; ++b) {
      Matrix3 term = cs.S[a][b];
      if (a == b) term -= Matrix3::Identity();
      cs.Mbar[a] += cs.c[b] * cs.Lphase[b] * term;
    }
  }
}

CoefficientSet compute_coefficients(const RveMesh& mesh, const PhaseMaterial& fiber,
                                    const PhaseMaterial& matrix, const std::string& scheme_name,
                                    ExecMode mode) {
  CoefficientSet cs;
  cs.scheme = scheme_name;
  cs.M = mesh.num_partitions();
  if (cs.M == 0) throw ConfigError("compute_coefficients: mesh has no partitions");
  cs.c = partition_volume_fractions(mesh);
  cs.phase = partition_phases(mesh);
  cs.Lphase.resize(cs.M);
  for (int b = 0; b < cs.M; ++b)
    cs.Lphase[b] =
        cs.phase[b] == Phase::Fiber ? fiber.elastic_matrix() : matrix.elastic_matrix();

  const auto C = element_stiffness_matrices(mesh, fiber.elastic_matrix(), matrix.elastic_matrix());
  PeriodicSystem system(mesh, C, mode);
  cs.E = compute_elastic_coefficients(mesh, system);
  cs.S = compute_eigenstrain_coefficients(mesh, system, C, mode);
  compute_homogenized_moduli(cs);
  return cs;
}

double IdentityReport::max_residual() const {
  return std::max({strain_average, dvorak, mbar_sum});
}

IdentityReport check_identities(const CoefficientSet& cs) {
  IdentityReport r;
  Matrix3 sumE = Matrix3::Zero();
  for (int b = 0; b < cs.M; ++b) sumE += cs.c[b] * cs.E[b];
  r.strain_average = (sumE - Matrix3::Identity()).cwiseAbs().maxCoeff();

  for (int b = 0; b < cs.M; ++b) {
    Matrix3 sumS = Matrix3::Zero();
    for (int a = 0; a < cs.M; ++a) sumS += cs.S[a][b];
    const double res = (sumS - (Matrix3::Identity() - cs.E[b])).cwiseAbs().maxCoeff();
    r.dvorak = std::max(r.dvorak, res);
  }

  Matrix3 sumM = Matrix3::Zero();
  for (int a = 0; a < cs.M; ++a) sumM += cs.Mbar[a];
  r.mbar_sum = (sumM + cs.Lbar).cwiseAbs().maxCoeff();
  return r;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

void write_block(std::ostream& out, const Matrix3& A) {
  for (int i = 0; i < 3; ++i) {
    out << fmt(A(i, 0)) << " " << fmt(A(i, 1)) << " " << fmt(A(i, 2)) << "\n";
  }
}

Matrix3 read_block(std::istream& in, const std::string& origin) {
  Matrix3 A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (!(in >> A(i, j))) throw ConfigError(origin + ": truncated coefficient block");
  return A;
}

}  // namespace

void write_coefficients(const CoefficientSet& cs, std::ostream& out) {
  out << "# unit cell coefficient tensors\n";
  out << "scheme " << cs.scheme << "\n";
  out << "M " << cs.M << "\n";
  for (int b = 0; b < cs.M; ++b)
    out << "c " << b + 1 << " " << fmt(cs.c[b]) << " " << phase_name(cs.phase[b]) << "\n";
  for (int b = 0; b < cs.M; ++b) {
    out << "E " << b + 1 << "\n";
    write_block(out, cs.E[b]);
  }
  for (int a = 0; a < cs.M; ++a) {
    for (int b = 0; b < cs.M; ++b) {
      out << "S " << a + 1 << " " << b + 1 << "\n";
      write_block(out, cs.S[a][b]);
    }
  }
  out << "Lbar\n";
  write_block(out, cs.Lbar);
  for (int a = 0; a < cs.M; ++a) {
    out << "Mbar " << a + 1 << "\n";
    write_block(out, cs.Mbar[a]);
  }
  for (int b = 0; b < cs.M; ++b) {
    out << "L " << b + 1 << "\n";
    write_block(out, cs.Lphase[b]);
  }
}

void write_coefficients(const CoefficientSet& cs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open coefficient file for writing: " + path);
  write_coefficients(cs, out);
}

CoefficientSet read_coefficients(std::istream& in, const std::string& origin) {
  CoefficientSet cs;
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (tok == "scheme") {
      in >> cs.scheme;
    } else if (tok == "M") {
      in >> cs.M;
      if (cs.M < 1) throw ConfigError(origin + ": bad partition count");
      cs.c.assign(cs.M, 0.0);
      cs.phase.assign(cs.M, Phase::Matrix);
      cs.E.assign(cs.M, Matrix3::Zero());
      cs.S.assign(cs.M, std::vector<Matrix3>(cs.M, Matrix3::Zero()));
      cs.Mbar.assign(cs.M, Matrix3::Zero());
      cs.Lphase.assign(cs.M, Matrix3::Zero());
    } else if (tok == "c") {
      int b;
      std::string ph;
      in >> b >> cs.c.at(b - 1) >> ph;
      cs.phase.at(b - 1) = phase_from_name(ph);
    } else if (tok == "E") {
      int b;
      in >> b;
      cs.E.at(b - 1) = read_block(in, origin);
    } else if (tok == "S") {
      int a, b;
      in >> a >> b;
      cs.S.at(a - 1).at(b - 1) = read_block(in, origin);
    } else if (tok == "Lbar") {
      cs.Lbar = read_block(in, origin);
    } else if (tok == "Mbar") {
      int a;
      in >> a;
      cs.Mbar.at(a - 1) = read_block(in, origin);
    } else if (tok == "L") {
      int b;
      in >> b;
      cs.Lphase.at(b - 1) = read_block(in, origin);
    } else {
      throw ConfigError(origin + ": unknown coefficient record '" + tok + "'");
    }
  }
  if (cs.M == 0) throw ConfigError(origin + ": coefficient file has no partition count");
  return cs;
}

CoefficientSet read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open coefficient file: " + path);
  return read_coefficients(in, path);
}

}  // namespace romaeh
