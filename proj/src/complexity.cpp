#include "hbref/complexity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace hbref {

double ComplexityConstants::ball_cap(int dim) const { return std::pow(4.0 * c_tilde + 1.0, dim); }

ComplexityConstants constants(int dim, int max_degree, int m) {
  if (m < 2) throw Error("complexity constants require m >= 2");
  if (dim < 1 || max_degree < 1) throw Error("invalid dimension or degree");
  ComplexityConstants k;
  const double root_d = std::sqrt(static_cast<double>(dim));
  k.c_s = std::ldexp(2.0 * max_degree + 1.0, m - 2);
  k.c_d = root_d * k.c_s;
  k.c_tilde = 0.5 + 2.0 * k.c_s / (1.0 - std::ldexp(1.0, 1 - m));
  k.c = root_d * k.c_tilde;
  k.lambda_cap = 4.0 * std::pow(4.0 * k.c_tilde + 1.0, dim);
  return k;
}

ComplexityConstants constants(const MeshConfig& cfg, int m) {
  return constants(cfg.dim, cfg.max_degree(), m);
}

double lambda(int dim, const Element& q, const Element& marked, const ComplexityConstants& k) {
  if (q.level > marked.level + 1) return 0.0;
  if (!(midpoint_distance(dim, q, marked) < std::ldexp(k.c, 1 - q.level))) return 0.0;
  return std::ldexp(1.0, q.level - marked.level);
}

std::uint64_t ball_count(const MeshConfig& cfg, const Element& marked, int level, double c) {
  const int d = cfg.dim;
  const double h = std::ldexp(1.0, -level);
  const double radius = std::ldexp(c, 1 - level);
  std::array<double, kMaxDim> center{};
  for (int i = 0; i < d; ++i) center[i] = std::ldexp(static_cast<double>(marked.index[i]) + 0.5, -marked.level);

  // cells k with |(k + 1/2) h - x| < s, clamped to the grid
  auto range = [&](int i, double s, Index& lo, Index& hi) {
    const double a = (center[i] - s) / h - 0.5;
    const double b = (center[i] + s) / h - 0.5;
    lo = std::max<Index>(0, static_cast<Index>(std::floor(a)) + 1);
    hi = std::min<Index>(cfg.cells(level, i) - 1, static_cast<Index>(std::ceil(b)) - 1);
  };

  auto count = [&](auto&& self, int i, double r2) -> std::uint64_t {
    Index lo;
    Index hi;
    range(i, std::sqrt(r2), lo, hi);
    if (hi < lo) return 0;
    if (i == d - 1) return static_cast<std::uint64_t>(hi - lo + 1);
    std::uint64_t n = 0;
    for (Index k = lo; k <= hi; ++k) {
      const double off = (static_cast<double>(k) + 0.5) * h - center[i];
      const double rest = r2 - off * off;
      if (rest > 0) n += self(self, i + 1, rest);
    }
    return n;
  };
  return count(count, 0, radius * radius);
}

LowerBoundReport verify_lower_bound(const RefinementHistory& h) {
  const auto k = constants(h.cfg, h.m);
  LowerBoundReport r;
  r.min_sum = std::numeric_limits<double>::infinity();
  for (const Element& q : h.new_elements()) {
    double sum = 0.0;
    for (const StepRecord& step : h.steps) {
      for (const Element& mk : step.marks) sum += lambda(h.cfg.dim, q, mk, k);
    }
    ++r.checked;
    if (sum < r.min_sum) r.min_sum = sum;
    if (sum < 1.0 && r.ok) {
      r.ok = false;
      r.violator = q;
    }
  }
  return r;
}

UpperBoundReport verify_upper_bound(const RefinementHistory& h) {
  const auto k = constants(h.cfg, h.m);
  const double ball_cap = k.ball_cap(h.cfg.dim);
  const auto fresh = h.new_elements();
  UpperBoundReport r;
  for (std::size_t j = 0; j < h.steps.size(); ++j) {
    for (const Element& mk : h.steps[j].marks) {
      double sum = 0.0;
      for (const Element& q : fresh) sum += lambda(h.cfg.dim, q, mk, k);
      ++r.checked;
      r.max_sum = std::max(r.max_sum, sum);
      if (sum > k.lambda_cap && r.ok) {
        r.ok = false;
        r.violator = MarkedEvent{mk, static_cast<int>(j)};
      }
      for (int level = 1; level <= mk.level + 1; ++level) {
        const std::uint64_t n = ball_count(h.cfg, mk, level, k.c);
        r.max_ball = std::max(r.max_ball, n);
        if (static_cast<double>(n) > ball_cap) r.ball_ok = false;
      }
    }
  }
  return r;
}

ProvenanceReport verify_provenance(const RefinementHistory& h, double rel_tol) {
  const int dim = h.cfg.dim;
  const int m = h.m;
  const auto k = constants(h.cfg, m);
  ProvenanceReport r;
  std::unordered_set<Element, ElementHash> seen;
  for (const CreatedEvent& ev : h.log.created) {
    ++r.created;
    if (!seen.insert(ev.element).second) r.unique_creation = false;
    const auto& chain = ev.chain;
    r.max_chain_length = std::max(r.max_chain_length, chain.size());
    if (chain.empty() || chain.back() != ev.parent || ev.element.level != ev.parent.level + 1 ||
        ancestor(ev.element, ev.parent.level) != ev.parent) {
      r.chain_levels_ok = false;
      continue;
    }
    const int base = chain.back().level;
    const int top = static_cast<int>(chain.size()) - 1;  // J
    for (int i = 0; i <= top; ++i) {
      const int j = top - i;  // chain[i] = Q_j
      if (chain[i].level != base + j * (m - 1)) r.chain_levels_ok = false;
      if (ev.element.level > chain[i].level + 1) {
        r.level_bound_ok = false;
        ++r.level_violations;
      }
    }
    const int marked_level = chain.front().level;
    if (top > (marked_level + m - 2) / (m - 1)) r.depth_ok = false;

    const double bound = std::ldexp(k.c, -ev.element.level);
    const double dist = midpoint_distance(dim, ev.element, ev.marked());
    r.max_distance_ratio = std::max(r.max_distance_ratio, dist / bound);
    if (dist > bound * (1.0 + rel_tol)) {
      r.distance_ok = false;
      ++r.distance_violations;
    }
    for (int i = 0; i < top; ++i) {
      const Element& upper = chain[i];     // Q_j
      const Element& lower = chain[i + 1];  // Q_{j-1}
      const double link = midpoint_distance(dim, upper, lower);
      if (link > std::ldexp(k.c, -lower.level) * (1.0 + rel_tol)) r.link_distance_ok = false;
      r.max_link_ratio = std::max(r.max_link_ratio, link / std::ldexp(k.c_d, -upper.level - 1));
    }
  }
  return r;
}

double complexity_ratio(const RefinementHistory& h) {
  const std::size_t marked = h.total_marked();
  if (marked == 0) throw Error("complexity ratio undefined: no elements were marked");
  return static_cast<double>(h.new_element_count()) / static_cast<double>(marked);
}

std::vector<ExperimentRow> run_experiment(const MeshConfig& cfg, int m, const MarkingPolicy& policy,
                                          int steps, const std::vector<std::uint64_t>& seeds,
                                          const HierarchicalMesh* initial) {
  const auto k = constants(cfg, m);
  std::vector<std::uint64_t> order = seeds;
  std::sort(order.begin(), order.end());
  std::vector<ExperimentRow> rows;
  for (std::uint64_t seed : order) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentRow row;
    row.seed = seed;
    row.policy = to_string(policy.kind);
    row.steps = steps;
    row.lambda_cap = k.lambda_cap;
    const HierarchicalMesh q0 = initial ? *initial : HierarchicalMesh(cfg);
    const RefinementHistory h = refine_history(q0, m, policy, steps, seed);
    row.sum_marked = h.total_marked();
    row.new_elements = h.new_element_count();
    row.ratio = row.sum_marked ? complexity_ratio(h) : 0.0;
    const auto lb = verify_lower_bound(h);
    row.max_lb_deficit = lb.checked ? 1.0 - lb.min_sum : 0.0;
    row.max_ub_sum = verify_upper_bound(h).max_sum;
    row.element_counts.push_back(h.initial.element_count());
    for (const auto& s : h.steps) row.element_counts.push_back(s.elements_after);
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  os << "seed,policy,J,sum_marked,new_elements,ratio,lambda_cap,max_lb_deficit,max_ub_sum,"
        "wall_time_ms\n";
  const auto old_precision = os.precision(10);
  for (const auto& r : rows) {
    os << r.seed << ',' << r.policy << ',' << r.steps << ',' << r.sum_marked << ','
       << r.new_elements << ',' << r.ratio << ',' << r.lambda_cap << ',' << r.max_lb_deficit << ','
       << r.max_ub_sum << ',' << r.wall_time_ms << '\n';
  }
  os.precision(old_precision);
}

}  // namespace hbref
