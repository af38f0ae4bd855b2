#ifndef ROMAEH_DIAGNOSTICS_HPP
#define ROMAEH_DIAGNOSTICS_HPP

#include <string>
#include <vector>

#include "romaeh/material.hpp"
#include "romaeh/mesh.hpp"

namespace romaeh {

// Comparison of two candidate partition schemes under the unit tension
// and unit shear elastic load cases.  Scheme B earns its extra
// partitions only if at least one of its per-partition stress averages
// departs from its parent partition's average in scheme A; mirror-
// symmetric splits don't, and are flagged non-informative.
struct PartitionDiagnostics {
  std::vector<Voigt3> tension_a, shear_a;  // per partition of scheme A
  std::vector<Voigt3> tension_b, shear_b;  // per partition of scheme B
  std::vector<int> parent_of_b;            // A-partition containing each B-partition, 1-based
  bool nested = false;                     // parent mapping exists
  bool comparison_available = false;
  bool informative = false;
  double max_deviation = 0.0;  // largest relative departure from the parent average

  std::string summary() const;
};

PartitionDiagnostics partition_diagnostics(const RveMesh& mesh, const PartitionScheme& scheme_a,
                                           const PartitionScheme& scheme_b,
                                           const PhaseMaterial& fiber, const PhaseMaterial& matrix,
                                           double tolerance = 1e-3);

}  // namespace romaeh

#endif
