#include "romaeh/diagnostics.hpp"

#include <cmath>
#include <sstream>

#include "romaeh/errors.hpp"
#include "romaeh/fem.hpp"

namespace romaeh {

PartitionDiagnostics partition_diagnostics(const RveMesh& mesh, const PartitionScheme& scheme_a,
                                           const PartitionScheme& scheme_b,
                                           const PhaseMaterial& fiber, const PhaseMaterial& matrix,
                                           double tolerance) {
  RveMesh mesh_a = mesh;
  RveMesh mesh_b = mesh;
  assign_partitions(mesh_a, scheme_a);
  assign_partitions(mesh_b, scheme_b);

  // The elastic fields do not depend on the partitioning, so the two
  // load cases are solved once and averaged under each labeling.
  const auto C = element_stiffness_matrices(mesh, fiber.elastic_matrix(), matrix.elastic_matrix());
  PeriodicSystem system(mesh_a, C);
  const Eigen::VectorXd u_tension = system.solve(Voigt3(1.0, 0.0, 0.0));
  const Eigen::VectorXd u_shear = system.solve(Voigt3(0.0, 0.0, 1.0));

  PartitionDiagnostics d;
  d.tension_a = partition_average_stress(mesh_a, u_tension, C);
  d.shear_a = partition_average_stress(mesh_a, u_shear, C);
  d.tension_b = partition_average_stress(mesh_b, u_tension, C);
  d.shear_b = partition_average_stress(mesh_b, u_shear, C);

  // Parent mapping: every element of a B-partition must carry one and
  // the same A-label, otherwise the schemes are not nested.
  const int mb = mesh_b.num_partitions();
  d.parent_of_b.assign(mb, 0);
  d.nested = true;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const int b = mesh_b.partition_of_element[e];
    const int a = mesh_a.partition_of_element[e];
    if (d.parent_of_b[b - 1] == 0)
      d.parent_of_b[b - 1] = a;
    else if (d.parent_of_b[b - 1] != a)
      d.nested = false;
  }

  if (!d.nested) {
    d.comparison_available = false;
    return d;
  }

  d.comparison_available = true;
  double scale = 0.0;
  for (const auto& s : d.tension_a) scale = std::max(scale, s.cwiseAbs().maxCoeff());
  for (const auto& s : d.shear_a) scale = std::max(scale, s.cwiseAbs().maxCoeff());

  for (int b = 0; b < mb; ++b) {
    const int a = d.parent_of_b[b] - 1;
    const double dev_t = (d.tension_b[b] - d.tension_a[a]).cwiseAbs().maxCoeff();
    const double dev_s = (d.shear_b[b] - d.shear_a[a]).cwiseAbs().maxCoeff();
    d.max_deviation = std::max({d.max_deviation, dev_t / scale, dev_s / scale});
  }
  d.informative = d.max_deviation > tolerance;
  return d;
}

std::string PartitionDiagnostics::summary() const {
  std::ostringstream os;
  if (!comparison_available) {
    os << "schemes are not nested; per-scheme averages reported, comparison unavailable";
    return os.str();
  }
  os << "refined scheme is " << (informative ? "informative" : "non-informative")
     << " (max relative deviation from parent averages " << max_deviation << ")";
  return os.str();
}

}  // namespace romaeh
