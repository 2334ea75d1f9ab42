#pragma once

#include <optional>

#include "hbref/hier_mesh.hpp"
#include "hbref/spline_basis.hpp"

namespace hbref {

/// Result of the admissibility checks.  Each witness is present iff its flag
/// is false.
struct AdmissibilityReport {
  // THB functions nonzero on an element span at most m levels.
  bool admissible = true;
  std::optional<Element> admissible_witness;  // offending active element
  int witness_min_level = 0;                  // level range of the functions on it
  int witness_max_level = 0;
  int level_span = 1;                    // max over elements of (max - min + 1)
  std::size_t max_functions_on_element = 0;

  // strict part: Omega^l inside omega^{l-m+1} for l = m, ..., N-1.
  bool strictly_admissible = true;
  std::optional<Element> strict_witness;  // offending Omega^l cell
};

/// Level span of the THB functions on each element, at most m.  m = 1 is accepted and means a uniform mesh.
AdmissibilityReport is_admissible(const HierarchicalMesh& mesh, int m);
AdmissibilityReport is_admissible(const HierarchicalMesh& mesh, const ThbBasis& basis, int m);

/// True iff the support extension S(cell, level of cell) lies in Omega^{level of cell}.
bool in_omega(const HierarchicalMesh& mesh, const Element& cell);

/// Level-l cells of omega^l.
ElementSet omega_region(const HierarchicalMesh& mesh, int level);

/// Strict admissibility by cell-set algebra only.
AdmissibilityReport is_strictly_admissible(const HierarchicalMesh& mesh, int m);

/// Both parts at once.
AdmissibilityReport check_admissibility(const HierarchicalMesh& mesh, int m);

/// Smallest m in [lo, hi] for which the mesh is strictly admissible, if any.
std::optional<int> strict_class(const HierarchicalMesh& mesh, int lo, int hi);

}  // namespace hbref
