#include "hbref/admissibility.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace hbref {

AdmissibilityReport is_admissible(const HierarchicalMesh& mesh, int m) {
  return is_admissible(mesh, thb_basis(mesh), m);
}

AdmissibilityReport is_admissible(const HierarchicalMesh& mesh, const ThbBasis& basis, int m) {
  if (m < 1) throw Error("admissibility class must be >= 1");
  AdmissibilityReport report;
  for (const Element& q : mesh.active_elements()) {
    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    std::size_t count = 0;
    if (const auto it = basis.on_element.find(q); it != basis.on_element.end()) {
      count = it->second.size();
      for (std::uint32_t i : it->second) {
        const int l = basis.functions[i].origin.level;
        lo = std::min(lo, l);
        hi = std::max(hi, l);
      }
    }
    if (count == 0) {
      // cannot happen for a valid basis (partition of unity)
      throw Error("no basis function is nonzero on " + to_string(mesh.dim(), q));
    }
    report.max_functions_on_element = std::max(report.max_functions_on_element, count);
    report.level_span = std::max(report.level_span, hi - lo + 1);
    if (report.admissible && hi - lo > m - 1) {
      report.admissible = false;
      report.admissible_witness = q;
      report.witness_min_level = lo;
      report.witness_max_level = hi;
    }
  }
  if (m == 1) {
    // uniform meshes only
    int levels_present = 0;
    for (int l = 0; l < mesh.num_levels(); ++l) levels_present += mesh.active(l).empty() ? 0 : 1;
    if (levels_present > 1 && report.admissible) {
      report.admissible = false;
      report.admissible_witness = mesh.active_elements().front();
      report.witness_min_level = report.admissible_witness->level;
      report.witness_max_level = mesh.num_levels() - 1;
    }
  }
  return report;
}

bool in_omega(const HierarchicalMesh& mesh, const Element& cell) {
  const ElementSet& omega = mesh.domain(cell.level);
  if (!omega.contains(cell)) return false;
  bool inside = true;
  for_each_cell(mesh.dim(), support_extension_box(mesh.config(), cell, cell.level),
                [&](const Element& c) {
                  if (inside && !omega.contains(c)) inside = false;
                });
  return inside;
}

ElementSet omega_region(const HierarchicalMesh& mesh, int level) {
  ElementSet out;
  for (const Element& c : mesh.domain(level)) {
    if (in_omega(mesh, c)) out.insert(c);
  }
  return out;
}

AdmissibilityReport is_strictly_admissible(const HierarchicalMesh& mesh, int m) {
  if (m < 2) throw Error("strict admissibility requires m >= 2");
  AdmissibilityReport report;
  std::unordered_map<Element, bool, ElementHash> cache;
  for (int l = m; l < mesh.num_levels(); ++l) {
    const int coarse = l - m + 1;
    for (const Element& c : sorted(mesh.domain(l))) {
      const Element a = ancestor(c, coarse);
      auto [it, fresh] = cache.try_emplace(a, false);
      if (fresh) it->second = in_omega(mesh, a);
      if (!it->second) {
        report.strictly_admissible = false;
        report.strict_witness = c;
        return report;
      }
    }
  }
  return report;
}

AdmissibilityReport check_admissibility(const HierarchicalMesh& mesh, int m) {
  AdmissibilityReport report = is_admissible(mesh, m);
  if (m >= 2) {
    const AdmissibilityReport strict = is_strictly_admissible(mesh, m);
    report.strictly_admissible = strict.strictly_admissible;
    report.strict_witness = strict.strict_witness;
  } else {
    report.strictly_admissible = mesh.num_levels() == 1;
    if (!report.strictly_admissible) report.strict_witness = sorted(mesh.domain(1)).front();
  }
  return report;
}

std::optional<int> strict_class(const HierarchicalMesh& mesh, int lo, int hi) {
  for (int m = std::max(lo, 2); m <= hi; ++m) {
    if (is_strictly_admissible(mesh, m).strictly_admissible) return m;
  }
  return std::nullopt;
}

}  // namespace hbref
