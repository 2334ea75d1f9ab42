#pragma once

#include <random>
#include <vector>

#include "hbref/admissibility.hpp"
#include "hbref/hier_mesh.hpp"
#include "hbref/refine.hpp"

namespace hbref::testing {

inline Element el(int level, std::initializer_list<Index> index) {
  return make_element(level, index);
}

inline MeshConfig cfg_of(std::vector<int> degrees, std::vector<Index> extents, int m = 2) {
  return MeshConfig::make(static_cast<int>(degrees.size()), degrees, extents, m);
}

/// Randomized experiment setup: dimension, per-direction degrees, class,
/// extents, marking policy and number of steps.
struct RandomSetup {
  MeshConfig cfg;
  int m = 2;
  MarkingPolicy policy;
  int steps = 0;
  std::uint64_t seed = 0;
};

/// d in {1,2,3}, p_i in {1,2,3}, m in {2,3}, J <= 10, extents <= 8 per direction.
/// Marks per step stay small so that histories remain desk-sized.
inline RandomSetup random_setup(std::mt19937_64& rng, int max_dim = 3) {
  RandomSetup s;
  const int dim = std::uniform_int_distribution<int>(1, max_dim)(rng);
  std::vector<int> degrees;
  std::vector<Index> extents;
  const Index max_extent = 8;
  for (int i = 0; i < dim; ++i) {
    degrees.push_back(std::uniform_int_distribution<int>(1, 3)(rng));
    extents.push_back(std::uniform_int_distribution<Index>(1, max_extent)(rng));
  }
  s.m = std::uniform_int_distribution<int>(2, 3)(rng);
  s.cfg = MeshConfig::make(dim, degrees, extents, s.m);
  s.steps = std::uniform_int_distribution<int>(1, 10)(rng);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      s.policy.kind = PolicyKind::random_fraction;
      s.policy.fraction = 0.05;
      s.policy.max_marks = dim == 3 ? 2 : 4;
      break;
    case 1: s.policy.kind = PolicyKind::corner_chase; break;
    case 2: s.policy.kind = PolicyKind::single_deepest; break;
    default: s.policy.kind = PolicyKind::single_random; break;
  }
  s.seed = rng();
  return s;
}

inline RefinementHistory run(const RandomSetup& s, const StepObserver& observer = {}) {
  return refine_history(HierarchicalMesh(s.cfg), s.m, s.policy, s.steps, s.seed, {}, observer);
}

}  // namespace hbref::testing
