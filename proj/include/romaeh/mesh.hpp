#ifndef ROMAEH_MESH_HPP
#define ROMAEH_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "romaeh/voigt.hpp"

namespace romaeh {

enum class Phase { Fiber, Matrix };

std::string phase_name(Phase p);
Phase phase_from_name(const std::string& name);

// One master/slave tie between opposite boundary nodes.  The offset is
// x_slave - x_master and always equals a cell period vector, so the
// constraint u_slave = u_master + eps_macro * offset enforces
// periodicity of the fluctuation field.
struct PeriodicPair {
  int master = -1;
  int slave = -1;
  double dx = 0.0;
  double dy = 0.0;
};

// Structured two-phase unit cell: 4-node quadrilaterals, per-element
// phase and partition labels, periodic node pairing.  Immutable once
// built; safe to share across threads.  Lengths in mm.
struct RveMesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 4>> elements;
  std::vector<Phase> phase_of_element;
  std::vector<int> partition_of_element;  // 1..M, 0 while unassigned
  std::vector<PeriodicPair> periodic_pairs;
  double cell_size = 0.0;

  int num_partitions() const;
  double element_area(int e) const;
  Eigen::Vector2d element_centroid(int e) const;
  double total_area() const;
  double fiber_area_fraction() const;

  // Throws ConfigError on inverted elements, phase-straddling
  // partitions, or broken periodic pairing.
  void validate() const;
};

struct PartitionScheme {
  // "F1-M1", "F1-M4", "F1-M8", or "custom" with one polygon per
  // partition (elements are assigned by centroid-in-polygon, first hit
  // wins; every element must be covered).
  std::string name;
  std::vector<std::vector<Eigen::Vector2d>> polygons;

  static PartitionScheme named(const std::string& name);
  static PartitionScheme custom(std::vector<std::vector<Eigen::Vector2d>> polys);
};

// Structured n-by-n cell with a circular fiber centered in it.  Phase
// is assigned per element by a centroid-in-circle test, so the fiber
// boundary is a staircase at most one element ring wide.  A zero fiber
// diameter yields a homogeneous all-matrix cell.  Partitions are left
// unassigned.
RveMesh build_unit_cell(double cell_size, double fiber_diameter, int elements_per_side);

// Populates partition_of_element.  Built-in schemes reserve partition 1
// for the fiber; the matrix is cut into quadrants (F1-M4) or into the
// eight 45-degree sectors around the fiber (F1-M8: four edge sectors
// and four corner sectors of different size).
void assign_partitions(RveMesh& mesh, const PartitionScheme& scheme);

// Volume fraction per partition, index beta-1.  Fractions sum to one
// to machine precision; an empty partition is an error.
std::vector<double> partition_volume_fractions(const RveMesh& mesh);

// Phase shared by all elements of each partition, index beta-1.
std::vector<Phase> partition_phases(const RveMesh& mesh);

bool point_in_polygon(const Eigen::Vector2d& p, const std::vector<Eigen::Vector2d>& poly);

// Periodic ties resolved to their ultimate master: corner slaves chain
// through edge slaves, so constraints are followed until a free node
// is reached, accumulating the period offsets.  Detects cycles and
// conflicting chains.
struct PeriodicRoots {
  std::vector<int> root_of_node;              // root == node for free nodes
  std::vector<Eigen::Vector2d> offset_of_node;  // x_node - x_root modulo periods
};
PeriodicRoots resolve_periodic_roots(const RveMesh& mesh);

// Axis-aligned bounding quadrilateral of one partition, corners in
// counter-clockwise order starting at the lower-left.
std::array<Eigen::Vector2d, 4> partition_bounding_quad(const RveMesh& mesh, int beta);

}  // namespace romaeh

#endif
