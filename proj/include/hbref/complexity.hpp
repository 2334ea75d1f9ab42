#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "hbref/refine.hpp"

namespace hbref {

/// Constants of the linear complexity bound, for p = max_i p_i:
///   C_s = 2^{m-2}(2p+1),  C_d = sqrt(d) C_s,
///   C~  = 1/2 + 2 C_s / (1 - 2^{1-m}),  C = sqrt(d) C~,
///   Lambda = 4 (4 C~ + 1)^d.
struct ComplexityConstants {
  double c_s = 0;
  double c_d = 0;
  double c_tilde = 0;
  double c = 0;
  double lambda_cap = 0;

  /// (4 C~ + 1)^d, the bound on #B(Q_M, j)
  double ball_cap(int dim) const;
};

ComplexityConstants constants(int dim, int max_degree, int m);
ComplexityConstants constants(const MeshConfig& cfg, int m);

/// lambda(Q, Q_M) = 2^{l(Q) - l(Q_M)} if l(Q) <= l(Q_M) + 1 and
/// Dist(Q, Q_M) < 2^{1 - l(Q)} C, else 0.  l(Q_M) is the level at marking time,
/// which is simply the level of the marked element.
double lambda(int dim, const Element& q, const Element& marked, const ComplexityConstants& k);

/// #B(Q_M, j) = #{Q in G^j : Dist(Q, Q_M) < 2^{1-j} C}, clamped to the grid.
std::uint64_t ball_count(const MeshConfig& cfg, const Element& marked, int level, double c);

struct LowerBoundReport {
  bool ok = true;
  std::size_t checked = 0;
  double min_sum = 0;  // over Q in Q_J \ Q_0 of sum_M lambda(Q, Q_M)
  std::optional<Element> violator;
};

/// sum over all marks (with multiplicity) of lambda(Q, Q_M) >= 1 for every Q in Q_J \ Q_0.
LowerBoundReport verify_lower_bound(const RefinementHistory& h);

struct UpperBoundReport {
  bool ok = true;        // sums <= Lambda
  bool ball_ok = true;   // #B(Q_M, j) <= (4C~+1)^d
  std::size_t checked = 0;
  double max_sum = 0;
  std::uint64_t max_ball = 0;
  std::optional<MarkedEvent> violator;
};

/// sum over Q in Q_J \ Q_0 of lambda(Q, Q_M) <= Lambda for every mark, plus the
/// ball counting bound for every mark and level 1 .. l(Q_M)+1.
UpperBoundReport verify_upper_bound(const RefinementHistory& h);

/// Checks read straight off the provenance log.
struct ProvenanceReport {
  bool chain_levels_ok = true;   // l(Q_j) = l(Q_0) + j(m-1), parent = Q_0
  bool level_bound_ok = true;    // l* <= l(e) + 1 for every call e on the chain
  bool distance_ok = true;       // Dist(Q, Q_M) <= 2^{-l(Q)} C
  bool link_distance_ok = true;  // Dist(Q_j, Q_{j-1}) <= 2^{-l(Q_{j-1})} C
  bool unique_creation = true;   // every element created at most once
  bool depth_ok = true;          // J <= ceil(l(Q_J) / (m-1))
  std::size_t created = 0;
  std::size_t level_violations = 0;
  std::size_t distance_violations = 0;
  double max_distance_ratio = 0;  // max Dist(Q,Q_M) / (2^{-l(Q)} C)
  /// max Dist(Q_j, Q_{j-1}) / (2^{-l(Q_j)-1} C_d) over chain links (the
  /// per-link neighbourhood distance estimate); informational only
  double max_link_ratio = 0;
  std::size_t max_chain_length = 0;

  bool ok() const {
    return chain_levels_ok && level_bound_ok && distance_ok && link_distance_ok &&
           unique_creation && depth_ok;
  }
};

/// `rel_tol` relaxes the distance comparisons by a relative margin.
ProvenanceReport verify_provenance(const RefinementHistory& h, double rel_tol = 1e-9);

/// (#Q_J - #Q_0) / sum_j #M_j; throws Error when nothing was marked.
double complexity_ratio(const RefinementHistory& h);

struct ExperimentRow {
  std::uint64_t seed = 0;
  std::string policy;
  int steps = 0;
  std::size_t sum_marked = 0;
  std::int64_t new_elements = 0;
  double ratio = 0;
  double lambda_cap = 0;
  double max_lb_deficit = 0;  // max over Q of 1 - sum lambda; <= 0 when the lower bound holds
  double max_ub_sum = 0;
  double wall_time_ms = 0;
  std::vector<std::size_t> element_counts;  // #Q_0, #Q_1, ..., #Q_J
};

/// One row per seed, in seed order.  `initial` defaults to G^0.
std::vector<ExperimentRow> run_experiment(const MeshConfig& cfg, int m, const MarkingPolicy& policy,
                                          int steps, const std::vector<std::uint64_t>& seeds,
                                          const HierarchicalMesh* initial = nullptr);

/// Header row plus one line per row, columns
/// seed,policy,J,sum_marked,new_elements,ratio,lambda_cap,max_lb_deficit,max_ub_sum,wall_time_ms
void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows);

}  // namespace hbref
