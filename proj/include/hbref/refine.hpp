#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hbref/hier_mesh.hpp"

namespace hbref {

struct MarkedEvent {
  Element element;
  int step = 0;
};

/// A REFINE_RECURSIVE invocation.  Calls issued directly by refine() have no caller.
struct RecursiveCallEvent {
  std::optional<Element> caller;
  Element callee;
  int step = 0;
};

/// One element created by a subdivision.  `chain` is the recursion stack at the
/// time of the subdivision, from the marked element Q_J down to the subdivided
/// element Q_0 (= parent).
struct CreatedEvent {
  Element element;
  Element parent;
  std::vector<Element> chain;
  int step = 0;

  const Element& marked() const { return chain.front(); }
};

struct ProvenanceLog {
  std::vector<MarkedEvent> marked;
  std::vector<RecursiveCallEvent> calls;
  std::vector<CreatedEvent> created;
  /// step index stamped on new events
  int step = 0;
};

struct RefineOptions {
  /// check the strict-admissibility precondition and postcondition
  bool validate = false;
};

/// N(Q,e,m): active level-(l-m+1) elements containing a cell of S(e, l-m+2);
/// empty when l-m+1 < 0.  Canonical order.  Throws Error if e is inactive.
std::vector<Element> neighborhood(const HierarchicalMesh& mesh, const Element& e, int m);

/// REFINE_RECURSIVE: refines the neighborhood recursively, then subdivides e.
void refine_recursive(HierarchicalMesh& mesh, const Element& e, int m,
                      ProvenanceLog* log = nullptr);

/// REFINE with the marks visited in exactly the given order; marks that were
/// subdivided earlier in the same call are skipped.
void refine_ordered(HierarchicalMesh& mesh, std::span<const Element> marks, int m,
                    ProvenanceLog* log = nullptr, const RefineOptions& options = {});

/// REFINE with the marks visited in canonical order.  Every mark must be active.
HierarchicalMesh refine(const HierarchicalMesh& mesh, std::span<const Element> marks, int m,
                        ProvenanceLog* log = nullptr, const RefineOptions& options = {});

enum class PolicyKind { random_fraction, corner_chase, single_deepest, single_random };

/// How marks are chosen in an experiment step.
struct MarkingPolicy {
  PolicyKind kind = PolicyKind::single_random;
  double fraction = 0.1;       // random_fraction: theta in (0,1]
  std::size_t max_marks = 0;   // random_fraction: cap, 0 = none
};

std::string to_string(PolicyKind kind);
PolicyKind parse_policy(const std::string& name);

std::vector<Element> select_marks(const HierarchicalMesh& mesh, const MarkingPolicy& policy,
                                  std::mt19937_64& rng);

struct StepRecord {
  std::vector<Element> marks;  // M_j, canonical order
  std::size_t elements_before = 0;
  std::size_t elements_after = 0;
};

/// A complete refinement history Q_0 -> ... -> Q_J with provenance.
struct RefinementHistory {
  MeshConfig cfg;
  int m = 2;
  HierarchicalMesh initial;
  HierarchicalMesh final_mesh;
  std::vector<StepRecord> steps;
  ProvenanceLog log;

  /// Q_0 is the level-0 grid G^0 (the setting of the complexity bound).
  bool starts_from_base_grid() const { return initial.num_levels() == 1; }

  std::size_t total_marked() const;
  /// #Q_J - #Q_0
  std::int64_t new_element_count() const;
  /// Q_J \ Q_0
  std::vector<Element> new_elements() const;
};

using StepObserver = std::function<void(const HierarchicalMesh&, int step)>;

/// Runs J = mark_sequence.size() steps Q_j = REFINE(Q_{j-1}, M_{j-1}, m).
RefinementHistory refine_history(const HierarchicalMesh& initial, int m,
                                 const std::vector<std::vector<Element>>& mark_sequence,
                                 const RefineOptions& options = {},
                                 const StepObserver& observer = {});

/// Runs `steps` steps with marks drawn from `policy`, seeded by `seed`.
RefinementHistory refine_history(const HierarchicalMesh& initial, int m,
                                 const MarkingPolicy& policy, int steps, std::uint64_t seed,
                                 const RefineOptions& options = {},
                                 const StepObserver& observer = {});

}  // namespace hbref
