#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hbref/complexity.hpp"
#include "support.hpp"

using namespace hbref;
using hbref::testing::cfg_of;
using hbref::testing::el;

namespace {

std::uint64_t ball_oracle(const MeshConfig& cfg, const Element& marked, int level, double c) {
  const double radius = std::ldexp(c, 1 - level);
  std::uint64_t n = 0;
  CellBox all;
  all.level = level;
  for (int i = 0; i < cfg.dim; ++i) all.hi[i] = cfg.cells(level, i) - 1;
  for_each_cell(cfg.dim, all, [&](const Element& q) {
    n += midpoint_distance(cfg.dim, q, marked) < radius ? 1 : 0;
  });
  return n;
}

}  // namespace

TEST_CASE("constants") {
  const auto a = constants(2, 2, 2);
  CHECK(a.c_s == doctest::Approx(5.0));
  CHECK(a.c_tilde == doctest::Approx(20.5));
  CHECK(a.lambda_cap == doctest::Approx(27556.0));
  CHECK(a.c_d == doctest::Approx(std::sqrt(2.0) * 5.0));
  CHECK(a.c == doctest::Approx(std::sqrt(2.0) * 20.5));
  CHECK(a.ball_cap(2) == doctest::Approx(83.0 * 83.0));

  const auto b = constants(1, 1, 2);
  CHECK(b.c_s == doctest::Approx(3.0));
  CHECK(b.c_tilde == doctest::Approx(12.5));
  CHECK(b.lambda_cap == doctest::Approx(204.0));

  CHECK(constants(1, 2, 3).c_s == doctest::Approx(10.0));
  CHECK(constants(cfg_of({1, 2}, {1, 1}), 2).c_s == doctest::Approx(5.0));
  CHECK_THROWS_AS(constants(1, 1, 1), Error);

  for (int d = 1; d <= 3; ++d) {
    for (int p = 1; p <= 3; ++p) {
      CHECK(constants(d, p + 1, 2).lambda_cap > constants(d, p, 2).lambda_cap);
      CHECK(constants(d, p, 3).lambda_cap > constants(d, p, 2).lambda_cap);
      if (d < 3) CHECK(constants(d + 1, p, 2).lambda_cap > constants(d, p, 2).lambda_cap);
    }
  }
}

TEST_CASE("lambda") {
  const auto k = constants(2, 2, 2);  // C = 20.5 sqrt 2 ~ 28.99
  const Element mark = el(0, {0, 0});
  CHECK(lambda(2, el(1, {0, 0}), mark, k) == 2.0);
  CHECK(lambda(2, el(2, {0, 0}), mark, k) == 0.0);   // too fine
  CHECK(lambda(2, el(0, {50, 0}), mark, k) == 1.0);  // 50 < 2 C
  CHECK(lambda(2, el(0, {60, 0}), mark, k) == 0.0);  // 60 > 2 C
  CHECK(lambda(2, el(1, {57, 1}), mark, k) == 2.0);  // 28.25 < C
  CHECK(lambda(2, el(1, {59, 1}), mark, k) == 0.0);  // 29.25 > C
  CHECK(lambda(2, el(0, {0, 0}), el(3, {0, 0}), k) == doctest::Approx(0.125));
}

TEST_CASE("ball count") {
  const auto cfg = cfg_of({1}, {128});
  const auto k = constants(cfg, 2);
  for (int level = 1; level <= 4; ++level) {
    for (Index i : {0, 7, 64, 127}) {
      const Element mark = ancestor(el(3, {i * 8 + 3}), level - 1);
      const auto n = ball_count(cfg, mark, level, k.c);
      CHECK(n == ball_oracle(cfg, mark, level, k.c));
      CHECK(static_cast<double>(n) <= k.ball_cap(1));
    }
  }
  // In d >= 2 a Euclidean ball of radius 2C cells only fits a cube with
  // 4 sqrt(d) C~ + 1 cells per side, so (4C~ + 1)^d undercounts once the ball
  // is not clipped by the domain.
  const auto plane = cfg_of({1, 1}, {128, 128});
  const auto kp = constants(plane, 2);
  const Element centre = el(4, {1024, 1024});
  const auto n2 = ball_count(plane, centre, 5, kp.c);
  CHECK(n2 == ball_oracle(plane, centre, 5, kp.c));
  CHECK(n2 == 3908);
  CHECK(static_cast<double>(n2) > kp.ball_cap(2));
  CHECK(static_cast<double>(n2) <= std::pow(4.0 * std::sqrt(2.0) * kp.c_tilde + 1.0, 2));

  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + static_cast<int>(rng() % 3);
    std::vector<int> p(dim, 1 + static_cast<int>(rng() % 2));
    std::vector<Index> m(dim, 1 + static_cast<Index>(rng() % 6));
    const auto c = MeshConfig::make(dim, p, m);
    const double radius = 0.2 + static_cast<double>(rng() % 100) / 20.0;
    const int level = static_cast<int>(rng() % 3);
    Element mark;
    mark.level = static_cast<int>(rng() % 3);
    for (int i = 0; i < dim; ++i) mark.index[i] = static_cast<Index>(rng() % c.cells(mark.level, i));
    CHECK(ball_count(c, mark, level, radius) == ball_oracle(c, mark, level, radius));
  }
}

TEST_CASE("lower and upper bounds on small histories") {
  const auto cfg = cfg_of({1, 1}, {4, 4});
  const HierarchicalMesh initial(cfg);

  const auto single = refine_history(initial, 2, {{el(0, {1, 2})}});
  const LowerBoundReport lb = verify_lower_bound(single);
  CHECK(lb.ok);
  CHECK(lb.checked == 4);
  CHECK(lb.min_sum == 2.0);
  CHECK(complexity_ratio(single) == doctest::Approx(3.0));

  const auto uniform = refine_history(initial, 2, {initial.active_elements()});
  CHECK(verify_lower_bound(uniform).ok);
  const UpperBoundReport ub = verify_upper_bound(uniform);
  CHECK(ub.ok);
  CHECK(ub.ball_ok);
  CHECK(ub.checked == 16);

  const auto nothing = refine_history(initial, 2, std::vector<std::vector<Element>>{{}});
  CHECK_THROWS_AS(complexity_ratio(nothing), Error);
  CHECK(verify_lower_bound(nothing).ok);
}

TEST_CASE("corner chase stays far below the bound") {
  MarkingPolicy corner;
  corner.kind = PolicyKind::corner_chase;
  const auto cfg = cfg_of({2, 2}, {8, 8});
  const auto h = refine_history(HierarchicalMesh(cfg), 2, corner, 12, 0);
  const double ratio = complexity_ratio(h);
  CHECK(ratio <= constants(cfg, 2).lambda_cap);
  CHECK(ratio > 1.0);
  CHECK(verify_lower_bound(h).ok);
  CHECK(verify_upper_bound(h).ok);
  CHECK(verify_provenance(h).ok());
}

TEST_CASE("random histories satisfy every inequality") {
  std::mt19937_64 rng(52);
  double worst_link = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = hbref::testing::random_setup(rng);
    const auto h = hbref::testing::run(s);
    const auto lb = verify_lower_bound(h);
    const auto ub = verify_upper_bound(h);
    const auto pr = verify_provenance(h);
    CHECK(lb.ok);
    CHECK(ub.ok);
    if (s.cfg.dim == 1) {
      CHECK(ub.ball_ok);
    } else {
      // see "ball count" for why only the cube estimate holds here
      const double cube = std::pow(4.0 * std::sqrt(s.cfg.dim) * constants(s.cfg, s.m).c_tilde + 1.0,
                                   s.cfg.dim);
      CHECK(static_cast<double>(ub.max_ball) <= cube);
    }
    CHECK(pr.ok());
    CHECK(pr.max_distance_ratio <= 1.0);
    worst_link = std::max(worst_link, pr.max_link_ratio);
    if (h.total_marked() > 0) CHECK(complexity_ratio(h) <= constants(s.cfg, s.m).lambda_cap);
  }
  MESSAGE("largest per-link neighbourhood distance ratio: " << worst_link);
}

TEST_CASE("experiment rows and CSV") {
  MarkingPolicy pol;
  pol.kind = PolicyKind::single_random;
  const auto rows = run_experiment(cfg_of({1}, {4}), 2, pol, 5, {1, 2, 3});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.steps == 5);
    CHECK(r.sum_marked == 5);
    CHECK(r.element_counts.size() == 6);
    CHECK(r.element_counts.front() == 4);
    CHECK(r.max_lb_deficit <= 0.0);
    CHECK(r.max_ub_sum <= r.lambda_cap);
    CHECK(r.ratio == doctest::Approx(static_cast<double>(r.new_elements) / 5.0));
  }
  std::ostringstream os;
  write_csv(os, rows);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header ==
        "seed,policy,J,sum_marked,new_elements,ratio,lambda_cap,max_lb_deficit,max_ub_sum,"
        "wall_time_ms");
  int lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == 3);
}
