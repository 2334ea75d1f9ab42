#include "hbref/refine.hpp"

#include <algorithm>
#include <cmath>

#include "hbref/admissibility.hpp"

namespace hbref {

namespace {

void recurse(HierarchicalMesh& mesh, const Element& e, int m, ProvenanceLog* log,
             std::vector<Element>& stack) {
  if (log) {
    log->calls.push_back({stack.empty() ? std::nullopt : std::optional<Element>(stack.back()), e,
                          log->step});
  }
  stack.push_back(e);
  for (const Element& n : neighborhood(mesh, e, m)) {
    // neighbours share one level, coarser than e, so earlier recursion never
    // subdivides them; the guard mirrors the "Q in Q" filter all the same
    if (mesh.is_active(n)) recurse(mesh, n, m, log, stack);
  }
  const auto kids = mesh.subdivide(e);
  if (log) {
    for (const Element& c : kids) log->created.push_back({c, e, stack, log->step});
  }
  stack.pop_back();
}

void require_strict(const HierarchicalMesh& mesh, int m, const char* what) {
  const auto report = is_strictly_admissible(mesh, m);
  if (!report.strictly_admissible) {
    throw Error(std::string(what) + " mesh is not strictly admissible of class " +
                std::to_string(m) + " (cell " + to_string(mesh.dim(), *report.strict_witness) +
                ")");
  }
}

}  // namespace

std::vector<Element> neighborhood(const HierarchicalMesh& mesh, const Element& e, int m) {
  if (m < 2) throw Error("neighborhood requires m >= 2");
  if (!mesh.is_active(e)) throw Error("neighborhood of inactive element " + to_string(mesh.dim(), e));
  const int coarse = e.level - m + 1;
  if (coarse < 0) return {};
  std::vector<Element> out;
  for_each_cell(mesh.dim(), support_extension_box(mesh.config(), e, coarse + 1),
                [&](const Element& c) {
                  const Element parent = ancestor(c, coarse);
                  if (mesh.is_active(parent)) out.push_back(parent);
                });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void refine_recursive(HierarchicalMesh& mesh, const Element& e, int m, ProvenanceLog* log) {
  if (m < 2) throw Error("refinement requires m >= 2");
  if (!mesh.is_active(e)) throw Error("cannot refine inactive element " + to_string(mesh.dim(), e));
  std::vector<Element> stack;
  recurse(mesh, e, m, log, stack);
}

void refine_ordered(HierarchicalMesh& mesh, std::span<const Element> marks, int m,
                    ProvenanceLog* log, const RefineOptions& options) {
  if (m < 2) throw Error("refinement requires m >= 2");
  for (const Element& q : marks) {
    if (!mesh.is_active(q)) throw Error("marked element " + to_string(mesh.dim(), q) + " is not active");
  }
  if (options.validate) require_strict(mesh, m, "input");
  if (log) {
    for (const Element& q : marks) log->marked.push_back({q, log->step});
  }
  std::vector<Element> stack;
  for (const Element& q : marks) {
    if (mesh.is_active(q)) recurse(mesh, q, m, log, stack);
  }
  if (options.validate) require_strict(mesh, m, "output");
}

HierarchicalMesh refine(const HierarchicalMesh& mesh, std::span<const Element> marks, int m,
                        ProvenanceLog* log, const RefineOptions& options) {
  std::vector<Element> ordered(marks.begin(), marks.end());
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());
  HierarchicalMesh out = mesh;
  refine_ordered(out, ordered, m, log, options);
  return out;
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::random_fraction: return "random-fraction";
    case PolicyKind::corner_chase: return "corner-chase";
    case PolicyKind::single_deepest: return "single-deepest";
    case PolicyKind::single_random: return "single-random";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& name) {
  for (PolicyKind k : {PolicyKind::random_fraction, PolicyKind::corner_chase,
                       PolicyKind::single_deepest, PolicyKind::single_random}) {
    if (to_string(k) == name) return k;
  }
  throw Error("unknown marking policy '" + name + "'");
}

std::vector<Element> select_marks(const HierarchicalMesh& mesh, const MarkingPolicy& policy,
                                  std::mt19937_64& rng) {
  auto pick = [&rng](const std::vector<Element>& from) {
    std::uniform_int_distribution<std::size_t> dist(0, from.size() - 1);
    return from[dist(rng)];
  };
  switch (policy.kind) {
    case PolicyKind::corner_chase: {
      const std::vector<double> origin(static_cast<std::size_t>(mesh.dim()), 0.0);
      return {mesh.locate(origin)};
    }
    case PolicyKind::single_deepest:
      return {pick(sorted(mesh.active(mesh.num_levels() - 1)))};
    case PolicyKind::single_random:
      return {pick(mesh.active_elements())};
    case PolicyKind::random_fraction: {
      if (!(policy.fraction > 0.0 && policy.fraction <= 1.0)) {
        throw Error("marking fraction must lie in (0,1]");
      }
      auto all = mesh.active_elements();
      auto k = static_cast<std::size_t>(std::ceil(policy.fraction * static_cast<double>(all.size())));
      k = std::clamp<std::size_t>(k, 1, all.size());
      if (policy.max_marks > 0) k = std::min(k, policy.max_marks);
      std::vector<Element> out;
      std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
      return out;
    }
  }
  return {};
}

std::size_t RefinementHistory::total_marked() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.marks.size();
  return n;
}

std::int64_t RefinementHistory::new_element_count() const {
  return static_cast<std::int64_t>(final_mesh.element_count()) -
         static_cast<std::int64_t>(initial.element_count());
}

std::vector<Element> RefinementHistory::new_elements() const {
  std::vector<Element> out;
  for (const Element& e : final_mesh.active_elements()) {
    if (!initial.is_active(e)) out.push_back(e);
  }
  return out;
}

namespace {

template <class NextMarks>
RefinementHistory run_history(const HierarchicalMesh& initial, int m, int steps,
                              NextMarks&& next_marks, const RefineOptions& options,
                              const StepObserver& observer) {
  RefinementHistory h{initial.config(), m, initial, initial, {}, {}};
  if (observer) observer(h.final_mesh, 0);
  for (int j = 0; j < steps; ++j) {
    std::vector<Element> marks = next_marks(h.final_mesh, j);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    StepRecord rec{marks, h.final_mesh.element_count(), 0};
    h.log.step = j;
    refine_ordered(h.final_mesh, marks, m, &h.log, options);
    rec.elements_after = h.final_mesh.element_count();
    h.steps.push_back(std::move(rec));
    if (observer) observer(h.final_mesh, j + 1);
  }
  return h;
}

}  // namespace

RefinementHistory refine_history(const HierarchicalMesh& initial, int m,
                                 const std::vector<std::vector<Element>>& mark_sequence,
                                 const RefineOptions& options, const StepObserver& observer) {
  return run_history(
      initial, m, static_cast<int>(mark_sequence.size()),
      [&](const HierarchicalMesh&, int j) { return mark_sequence[j]; }, options, observer);
}

RefinementHistory refine_history(const HierarchicalMesh& initial, int m,
                                 const MarkingPolicy& policy, int steps, std::uint64_t seed,
                                 const RefineOptions& options, const StepObserver& observer) {
  std::mt19937_64 rng(seed);
  return run_history(
      initial, m, steps,
      [&](const HierarchicalMesh& mesh, int) { return select_marks(mesh, policy, rng); }, options,
      observer);
}

}  // namespace hbref
