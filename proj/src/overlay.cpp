#include "hbref/overlay.hpp"

#include <algorithm>

#include "hbref/admissibility.hpp"

namespace hbref {

HierarchicalMesh overlay(const HierarchicalMesh& a, const HierarchicalMesh& b) {
  require_same_config(a, b);
  const int levels = std::max(a.num_levels(), b.num_levels());
  std::vector<ElementSet> domains(static_cast<std::size_t>(levels));
  for (int l = 0; l < levels; ++l) {
    domains[l] = a.domain(l);
    domains[l].insert(b.domain(l).begin(), b.domain(l).end());
  }
  return HierarchicalMesh::from_domains(a.config(), std::move(domains));
}

OverlayReport check_overlay_properties(const HierarchicalMesh& a, const HierarchicalMesh& b, int m) {
  const HierarchicalMesh star = overlay(a, b);
  OverlayReport r;
  r.strictly_admissible = is_strictly_admissible(star, m).strictly_admissible;
  r.refines_both = refinement_of(star, a) && refinement_of(star, b);

  r.omega_contains_union = true;
  for (int l = 0; l < star.num_levels() && r.omega_contains_union; ++l) {
    const ElementSet omega_star = omega_region(star, l);
    for (const HierarchicalMesh* in : {&a, &b}) {
      for (const Element& c : omega_region(*in, l)) {
        if (!omega_star.contains(c)) {
          r.omega_contains_union = false;
          break;
        }
      }
    }
  }

  r.overlay_count = star.element_count();
  const auto base = static_cast<std::size_t>(a.config().base_cell_count());
  r.bound = a.element_count() + b.element_count() - base;
  r.cardinality_bound = r.overlay_count <= r.bound;
  return r;
}

}  // namespace hbref
