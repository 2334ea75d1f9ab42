#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hbref/grid.hpp"

namespace hbref {

/// Hierarchical mesh over the nested domains Omega^0 >= Omega^1 >= ... >= Omega^{N-1}.
///
/// Omega^l is stored as the set of level-l cells it consists of; since each
/// Omega^{l+1} is a union of closures of level-l cells, these sets always come
/// in full sibling groups.  The active elements G^l (cells of Omega^l not
/// covered by Omega^{l+1}) are maintained incrementally by subdivide().
class HierarchicalMesh {
 public:
  /// Initial mesh Q_0 = G^0.
  explicit HierarchicalMesh(const MeshConfig& cfg);

  /// Builds a mesh from an explicit domain hierarchy, validating nesting,
  /// sibling closure and grid bounds.  Trailing empty levels are dropped.
  static HierarchicalMesh from_domains(const MeshConfig& cfg, std::vector<ElementSet> domains);

  const MeshConfig& config() const { return cfg_; }
  int dim() const { return cfg_.dim; }

  /// N = 1 + finest level with a nonempty domain.
  int num_levels() const { return static_cast<int>(domains_.size()); }

  /// Level-l cells of Omega^l (empty for l >= N).
  const ElementSet& domain(int level) const;
  /// Active elements of level l (empty for l >= N).
  const ElementSet& active(int level) const;

  bool is_active(const Element& e) const;
  /// True iff `cell` is one of the level-l cells of Omega^l, l = level of cell.
  bool in_domain(const Element& cell) const;
  /// True iff the closure of `cell` lies in Omega^level.
  bool covered_by_domain(const Element& cell, int level) const;

  /// All active elements in canonical order.
  std::vector<Element> active_elements() const;
  /// #Q, the number of active elements over all levels.
  std::size_t element_count() const { return count_; }

  /// Replaces the active element e by its 2^d children and returns them.
  std::vector<Element> subdivide(const Element& e);

  /// Active elements whose cell intersects the open cell `cell`: either the
  /// single active ancestor-or-self, or all active descendants.
  std::vector<Element> active_overlapping(const Element& cell) const;
  template <class F>
  void for_each_active_overlapping(const Element& cell, F&& f) const;

  /// Active element containing the parametric point x (x in closure of D;
  /// points on cell faces go to the upper cell, except on the upper boundary of D).
  Element locate(std::span<const double> x) const;

  /// Active sets recomputed from scratch from the domain hierarchy, literally:
  /// cells of Omega^l with no finer-level domain cell inside them.
  std::vector<ElementSet> recompute_active() const;

  /// Throws Error if any hierarchy invariant or the maintained active sets are
  /// inconsistent.
  void validate() const;

  friend bool operator==(const HierarchicalMesh& a, const HierarchicalMesh& b);

 private:
  HierarchicalMesh() = default;
  void descend_active(const Element& cell, std::vector<Element>& out) const;

  MeshConfig cfg_;
  std::vector<ElementSet> domains_;
  std::vector<ElementSet> active_;
  std::size_t count_ = 0;
};

HierarchicalMesh initial_mesh(const MeshConfig& cfg);

/// Value-style subdivision: copy of `mesh` with e replaced by its children.
HierarchicalMesh subdivided(const HierarchicalMesh& mesh, const Element& e);

/// a >= b in the refinement order: Omega_a^l contains Omega_b^l on every level.
/// Throws Error on mismatched configurations.
bool refinement_of(const HierarchicalMesh& a, const HierarchicalMesh& b);

/// Throws Error unless both meshes live on the same grid family.
void require_same_config(const HierarchicalMesh& a, const HierarchicalMesh& b);

template <class F>
void HierarchicalMesh::for_each_active_overlapping(const Element& cell, F&& f) const {
  // finest level k <= level(cell) at which the ancestor of cell is in Omega^k
  const int top = std::min(cell.level, num_levels() - 1);
  for (int k = top; k >= 0; --k) {
    const Element a = ancestor(cell, k);
    if (!domains_[k].contains(a)) continue;
    if (k < cell.level || active_[k].contains(a)) {
      f(a);
      return;
    }
    std::vector<Element> out;
    descend_active(a, out);
    for (const Element& e : out) f(e);
    return;
  }
}

}  // namespace hbref
