// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hbref/admissibility.hpp"
#include "hbref/complexity.hpp"
#include "hbref/mesh_io.hpp"
#include "hbref/overlay.hpp"
#include "hbref/refine.hpp"
#include "hbref/spline_basis.hpp"
#include "support.hpp"

using namespace hbref;
using hbref::testing::RandomSetup;

namespace {

constexpr int kHistories = 200;
constexpr int kPartitionMeshes = 50;
constexpr int kPartitionPoints = 1000;
constexpr double kPartitionTol = 1e-10;
constexpr double kDistanceRelTol = 1e-9;
constexpr int kOverlayPairs = 100;
constexpr int kFuzzOperations = 10000;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o, double seconds) {
  std::printf("criterion %2d: %s  %s (%s) [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", title.c_str(),
              o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

void run(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  report(id, title, o,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::size_t class_cap(const MeshConfig& cfg, int m) {
  std::size_t cap = static_cast<std::size_t>(m);
  for (int i = 0; i < cfg.dim; ++i) cap *= static_cast<std::size_t>(cfg.degrees[i] + 1);
  return cap;
}

/// Per-mesh results gathered while the histories run.
struct MeshStats {
  std::size_t meshes = 0;
  std::size_t strict_failures = 0;
  std::size_t class_failures = 0;
  std::size_t count_failures = 0;
  std::size_t roundtrip_failures = 0;
  std::size_t max_functions = 0;
  double worst_count_fill = 0;  // max functions per element / cap
  std::string first_problem;
};

struct Corpus {
  std::vector<RandomSetup> setups;
  std::vector<RefinementHistory> histories;
  MeshStats stats;
};

void note(MeshStats& s, const std::string& what) {
  if (s.first_problem.empty()) s.first_problem = what;
}

void inspect(MeshStats& s, const RandomSetup& setup, const HierarchicalMesh& mesh, int step) {
  ++s.meshes;
  const std::string where = "history seed " + std::to_string(setup.seed) + " step " + std::to_string(step);
  const auto strict = is_strictly_admissible(mesh, setup.m);
  if (!strict.strictly_admissible) {
    ++s.strict_failures;
    note(s, where + ": not strictly admissible at " + to_string(mesh.dim(), *strict.strict_witness));
  }
  const auto adm = is_admissible(mesh, setup.m);
  if (!adm.admissible) {
    ++s.class_failures;
    note(s, where + ": class violated at " + to_string(mesh.dim(), *adm.admissible_witness));
  }
  const std::size_t cap = class_cap(mesh.config(), setup.m);
  s.max_functions = std::max(s.max_functions, adm.max_functions_on_element);
  s.worst_count_fill =
      std::max(s.worst_count_fill, static_cast<double>(adm.max_functions_on_element) / cap);
  if (adm.max_functions_on_element >= cap) ++s.count_failures;

  const std::string text = emit_mesh(mesh);
  const HierarchicalMesh back = parse_mesh(text);
  if (!(back == mesh) || emit_mesh(back) != text ||
      is_strictly_admissible(back, setup.m).strictly_admissible != strict.strictly_admissible ||
      is_admissible(back, setup.m).admissible != adm.admissible) {
    ++s.roundtrip_failures;
    note(s, where + ": round trip changed the mesh or its classification");
  }
}

Corpus build_corpus() {
  Corpus c;
  std::mt19937_64 rng(kSeed);
  for (int i = 0; i < kHistories; ++i) {
    RandomSetup s = hbref::testing::random_setup(rng);
    c.histories.push_back(hbref::testing::run(
        s, [&](const HierarchicalMesh& mesh, int step) { inspect(c.stats, s, mesh, step); }));
    c.setups.push_back(s);
  }
  return c;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Active elements of the coarsest common refinement, from pairwise meets.
std::vector<Element> meet_oracle(const HierarchicalMesh& a, const HierarchicalMesh& b) {
  std::vector<Element> out;
  for (const Element& x : a.active_elements()) {
    for (const Element& y : b.active_elements()) {
      if (overlaps(x, y)) out.push_back(x.level >= y.level ? x : y);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

int main() {
  std::printf("acceptance suite, seed %llu\n", static_cast<unsigned long long>(kSeed));
  const auto t0 = std::chrono::steady_clock::now();
  const Corpus corpus = build_corpus();
  const double corpus_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const MeshStats& st = corpus.stats;

  run(1, "strict admissibility preserved by refinement", [&] {
    Outcome o;
    o.pass = st.strict_failures == 0 && corpus_seconds < 120.0;
    o.detail = std::to_string(kHistories) + " histories, " + std::to_string(st.meshes) +
               " meshes, " + std::to_string(st.strict_failures) + " failures, corpus built in " +
               fmt(corpus_seconds) + "s (limit 120s)";
    if (st.strict_failures) o.detail += "; " + st.first_problem;
    return o;
  });

  run(2, "admissible of class m with fewer than m*prod(p_i+1) functions per element", [&] {
    Outcome o;
    o.pass = st.class_failures == 0 && st.count_failures == 0;
    o.detail = std::to_string(st.class_failures) + " class violations, " +
               std::to_string(st.count_failures) + " count violations, max functions " +
               std::to_string(st.max_functions) + ", max fill of the cap " + fmt(st.worst_count_fill);
    return o;
  });

  std::vector<ProvenanceReport> prov;
  for (const auto& h : corpus.histories) prov.push_back(verify_provenance(h, kDistanceRelTol));

  run(3, "created levels stay within one level of every recursive call", [&] {
    Outcome o;
    std::size_t violations = 0;
    std::size_t created = 0;
    bool chains = true;
    for (const auto& r : prov) {
      violations += r.level_violations;
      created += r.created;
      chains = chains && r.chain_levels_ok && r.unique_creation && r.depth_ok;
    }
    o.pass = violations == 0 && chains;
    o.detail = std::to_string(created) + " created elements, " + std::to_string(violations) +
               " violations, chain structure " + (chains ? "ok" : "broken");
    return o;
  });

  run(4, "distance from created element to its mark at most 2^-l C", [&] {
    Outcome o;
    std::size_t violations = 0;
    double worst = 0.0;
    double worst_link = 0.0;
    bool links = true;
    for (const auto& r : prov) {
      violations += r.distance_violations;
      worst = std::max(worst, r.max_distance_ratio);
      worst_link = std::max(worst_link, r.max_link_ratio);
      links = links && r.link_distance_ok;
    }
    o.pass = violations == 0 && links;
    o.detail = std::to_string(violations) + " violations, max Dist/bound " + fmt(worst) +
               ", link bound " + (links ? "ok" : "violated") + ", max per-link ratio to 2^-l-1 C_d " +
               fmt(worst_link) + " (informational), rel tol 1e-9";
    return o;
  });

  run(5, "lambda lower bound >= 1, upper bound <= Lambda, ball count <= (4C~+1)^d", [&] {
    Outcome o;
    std::size_t lb_fail = 0;
    std::size_t ub_fail = 0;
    std::size_t ball_fail = 0;
    double min_lb = INFINITY;
    double max_ub_fill = 0.0;
    double max_ball_fill = 0.0;
    std::string ball_example;
    for (std::size_t i = 0; i < corpus.histories.size(); ++i) {
      const auto& h = corpus.histories[i];
      const auto k = constants(h.cfg, h.m);
      const auto lb = verify_lower_bound(h);
      const auto ub = verify_upper_bound(h);
      if (!lb.ok) ++lb_fail;
      if (!ub.ok) ++ub_fail;
      if (lb.checked) min_lb = std::min(min_lb, lb.min_sum);
      max_ub_fill = std::max(max_ub_fill, ub.max_sum / k.lambda_cap);
      const double fill = static_cast<double>(ub.max_ball) / k.ball_cap(h.cfg.dim);
      max_ball_fill = std::max(max_ball_fill, fill);
      if (!ub.ball_ok) {
        if (ball_fail == 0) {
          ball_example = "d=" + std::to_string(h.cfg.dim) + " m=" + std::to_string(h.m) +
                         ": #B=" + std::to_string(ub.max_ball) + " > " + fmt(k.ball_cap(h.cfg.dim));
        }
        ++ball_fail;
      }
    }
    o.pass = lb_fail == 0 && ub_fail == 0 && ball_fail == 0;
    o.detail = "lower " + std::to_string(lb_fail) + " failures (min sum " + fmt(min_lb) +
               "), upper " + std::to_string(ub_fail) + " failures (max sum/Lambda " +
               fmt(max_ub_fill) + "), ball " + std::to_string(ball_fail) +
               " histories over the cap (max #B/cap " + fmt(max_ball_fill) + ")";
    if (ball_fail) o.detail += "; e.g. " + ball_example;
    return o;
  });

  run(6, "new elements per mark at most Lambda(d,p,m)", [&] {
    Outcome o;
    const auto a = constants(2, 2, 2);
    const auto b = constants(1, 1, 2);
    const bool spots = std::fabs(a.c_s - 5.0) < 1e-12 && std::fabs(a.c_tilde - 20.5) < 1e-12 &&
                       std::fabs(a.lambda_cap - 27556.0) < 1e-9 &&
                       std::fabs(b.lambda_cap - 204.0) < 1e-9;
    std::size_t runs = 0;
    std::size_t over = 0;
    double worst = 0.0;
    for (const auto& h : corpus.histories) {
      if (h.total_marked() == 0) continue;
      ++runs;
      const double ratio = complexity_ratio(h);
      const double cap = constants(h.cfg, h.m).lambda_cap;
      worst = std::max(worst, ratio / cap);
      if (ratio > cap) ++over;
    }
    o.pass = spots && over == 0 && runs > 0;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(over) +
               " over the cap, max ratio/Lambda " + fmt(worst) + ", constants " +
               (spots ? "5 / 20.5 / 27556 / 204 ok" : "MISMATCH");
    return o;
  });

  run(7, "THB partition of unity to 1e-10", [&] {
    Outcome o;
    std::mt19937_64 rng(kSeed + 7);
    int meshes = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < corpus.histories.size() && meshes < kPartitionMeshes; ++i) {
      const auto& h = corpus.histories[i];
      if (h.cfg.dim > 2) continue;
      ++meshes;
      const HierarchicalMesh& mesh = h.final_mesh;
      const ThbBasis basis = thb_basis(mesh);
      std::vector<double> x(static_cast<std::size_t>(h.cfg.dim));
      for (int k = 0; k < kPartitionPoints; ++k) {
        for (int d = 0; d < h.cfg.dim; ++d) {
          const double hi = static_cast<double>(h.cfg.extents[d]);
          double v = 0.0;
          while (v <= 0.0 || v >= hi) v = std::uniform_real_distribution<double>(0.0, hi)(rng);
          x[d] = v;
        }
        worst = std::max(worst, std::fabs(basis_sum(mesh, basis, x) - 1.0));
      }
    }
    o.pass = meshes == kPartitionMeshes && worst <= kPartitionTol;
    o.detail = std::to_string(meshes) + " meshes x " + std::to_string(kPartitionPoints) +
               " points, max residual " + fmt(worst);
    return o;
  });

  run(8, "overlay is the coarsest strictly admissible common refinement", [&] {
    Outcome o;
    std::mt19937_64 rng(kSeed + 8);
    std::size_t bad = 0;
    std::size_t oracle_checked = 0;
    std::size_t oracle_bad = 0;
    std::string first;
    for (int pair = 0; pair < kOverlayPairs; ++pair) {
      RandomSetup s = hbref::testing::random_setup(rng);
      if (pair % 2 == 0) s.steps = std::min(s.steps, 3);  // small instances for the oracle
      RandomSetup t = s;
      t.seed = rng();
      const HierarchicalMesh a = hbref::testing::run(s).final_mesh;
      const HierarchicalMesh b = hbref::testing::run(t).final_mesh;
      const OverlayReport r = check_overlay_properties(a, b, s.m);
      if (!r.all()) {
        ++bad;
        if (first.empty()) first = "pair " + std::to_string(pair);
      }
      if (s.cfg.dim <= 2 && a.num_levels() <= 4 && b.num_levels() <= 4) {
        ++oracle_checked;
        if (overlay(a, b).active_elements() != meet_oracle(a, b)) ++oracle_bad;
      }
    }
    o.pass = bad == 0 && oracle_bad == 0 && oracle_checked > 0;
    o.detail = std::to_string(kOverlayPairs) + " pairs, " + std::to_string(bad) +
               " property failures, coarsest check on " + std::to_string(oracle_checked) +
               " small pairs with " + std::to_string(oracle_bad) + " mismatches";
    if (!first.empty()) o.detail += "; first failure " + first;
    return o;
  });

  run(9, "incremental active sets equal recomputation", [&] {
    Outcome o;
    std::mt19937_64 rng(kSeed + 9);
    std::size_t mismatches = 0;
    int ops = 0;
    while (ops < kFuzzOperations) {
      const RandomSetup s = hbref::testing::random_setup(rng);
      HierarchicalMesh mesh(s.cfg);
      for (int local = 0; local < 100 && ops < kFuzzOperations; ++local, ++ops) {
        const auto act = mesh.active_elements();
        const Element e = act[std::uniform_int_distribution<std::size_t>(0, act.size() - 1)(rng)];
        if (rng() % 2) mesh.subdivide(e);
        else refine_recursive(mesh, e, s.m);
        std::vector<ElementSet> kept;
        for (int l = 0; l < mesh.num_levels(); ++l) kept.push_back(mesh.active(l));
        if (kept != mesh.recompute_active()) ++mismatches;
        if (mesh.element_count() > 4000) break;
      }
    }
    o.pass = mismatches == 0;
    o.detail = std::to_string(ops) + " operations, " + std::to_string(mismatches) + " mismatches";
    return o;
  });

  run(10, "serialization round trip and classification invariance", [&] {
    Outcome o;
    o.pass = st.roundtrip_failures == 0;
    o.detail = std::to_string(st.meshes) + " meshes, " + std::to_string(st.roundtrip_failures) +
               " failures";
    if (st.roundtrip_failures) o.detail += "; " + st.first_problem;
    return o;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
