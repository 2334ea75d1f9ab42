#pragma once

#include "hbref/hier_mesh.hpp"

namespace hbref {

/// Coarsest common refinement: Omega_*^l = Omega_1^l u Omega_2^l on every level.
HierarchicalMesh overlay(const HierarchicalMesh& a, const HierarchicalMesh& b);

struct OverlayReport {
  bool strictly_admissible = false;
  bool omega_contains_union = false;  // omega_*^l >= omega_1^l u omega_2^l
  bool refines_both = false;
  bool cardinality_bound = false;     // #Q_* <= #Q_1 + #Q_2 - #Q_0
  std::size_t overlay_count = 0;
  std::size_t bound = 0;

  bool all() const {
    return strictly_admissible && omega_contains_union && refines_both && cardinality_bound;
  }
};

/// Checks the overlay properties for two strictly admissible meshes of class m.
/// #Q_0 is the level-0 cell count.
OverlayReport check_overlay_properties(const HierarchicalMesh& a, const HierarchicalMesh& b, int m);

}  // namespace hbref
