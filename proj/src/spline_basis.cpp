#include "hbref/spline_basis.hpp"

#include <algorithm>
#include <cmath>

namespace hbref {

namespace {

using TermMap = std::unordered_map<BsplineId, double, BsplineHash>;

Expansion to_expansion(const TermMap& map) {
  Expansion out;
  out.reserve(map.size());
  for (const auto& [id, c] : map) {
    if (c > 0.0) out.push_back({id, c});
  }
  std::sort(out.begin(), out.end(), [](const Term& a, const Term& b) { return a.id < b.id; });
  return out;
}

/// Every clipped support cell of b lies in Omega^{level of b}.
bool support_inside_domain(const HierarchicalMesh& mesh, const BsplineId& b) {
  const ElementSet& omega = mesh.domain(b.level);
  if (omega.empty()) return false;
  bool inside = true;
  for_each_cell(mesh.dim(), support_box(mesh.config(), b), [&](const Element& c) {
    if (inside && !omega.contains(c)) inside = false;
  });
  return inside;
}

/// The support of b meets the interior of Omega^{level of b + 1}.
bool support_meets_next_domain(const HierarchicalMesh& mesh, const BsplineId& b) {
  const int next = b.level + 1;
  if (next >= mesh.num_levels()) return false;
  bool meets = false;
  for_each_cell(mesh.dim(), support_box(mesh.config(), b), [&](const Element& c) {
    if (!meets && mesh.covered_by_domain(c, next)) meets = true;
  });
  return meets;
}

bool box_meets_cell(int dim, const CellBox& box, const Element& e) {
  for (int i = 0; i < dim; ++i) {
    Index lo;
    Index hi;
    if (e.level >= box.level) {
      lo = hi = e.index[i] >> (e.level - box.level);
    } else {
      const int shift = box.level - e.level;
      lo = e.index[i] << shift;
      hi = ((e.index[i] + 1) << shift) - 1;
    }
    if (hi < box.lo[i] || lo > box.hi[i]) return false;
  }
  return true;
}

void require_in_domain(const MeshConfig& cfg, std::span<const double> x) {
  if (static_cast<int>(x.size()) != cfg.dim) throw Error("point has wrong dimension");
  for (int i = 0; i < cfg.dim; ++i) {
    if (!(x[i] >= 0.0 && x[i] <= static_cast<double>(cfg.extents[i]))) {
      throw Error("evaluation point outside the domain");
    }
  }
}

double evaluate_unchecked(const MeshConfig& cfg, const BsplineId& b, std::span<const double> x) {
  double v = 1.0;
  for (int i = 0; i < cfg.dim && v != 0.0; ++i) {
    const double t = std::ldexp(x[i], b.level) - static_cast<double>(b.knot[i]);
    if (x[i] == static_cast<double>(cfg.extents[i])) {
      // upper face of D: use the limit from inside
      const int p = cfg.degrees[i];
      v *= (t <= 0.0 || t > p + 1) ? 0.0 : cardinal_bspline(p, std::nextafter(t, 0.0));
    } else {
      v *= cardinal_bspline(cfg.degrees[i], t);
    }
  }
  return v;
}

}  // namespace

bool in_index_set(const MeshConfig& cfg, const BsplineId& b) {
  if (b.level < 0) return false;
  for (int i = 0; i < cfg.dim; ++i) {
    if (b.knot[i] < -cfg.degrees[i] || b.knot[i] >= cfg.cells(b.level, i)) return false;
  }
  return true;
}

CellBox support_box(const MeshConfig& cfg, const BsplineId& b) {
  CellBox box;
  box.level = b.level;
  for (int i = 0; i < cfg.dim; ++i) {
    box.lo[i] = std::max<Index>(0, b.knot[i]);
    box.hi[i] = std::min<Index>(cfg.cells(b.level, i) - 1, b.knot[i] + cfg.degrees[i]);
  }
  return box;
}

std::vector<BsplineId> level_basis(const MeshConfig& cfg, int level) {
  CellBox knots;
  knots.level = level;
  for (int i = 0; i < cfg.dim; ++i) {
    knots.lo[i] = -cfg.degrees[i];
    knots.hi[i] = cfg.cells(level, i) - 1;
  }
  std::vector<BsplineId> out;
  out.reserve(knots.count(cfg.dim));
  for_each_cell(cfg.dim, knots, [&](const Element& k) { out.push_back({k.level, k.index}); });
  return out;
}

double mask_coefficient(int degree, int t) {
  if (t < 0 || t > degree + 1) return 0.0;
  double binom = 1.0;
  for (int i = 1; i <= t; ++i) binom = binom * (degree + 2 - i) / i;
  return std::ldexp(binom, -degree);
}

Expansion two_scale(const MeshConfig& cfg, const BsplineId& b) {
  CellBox shifts;
  for (int i = 0; i < cfg.dim; ++i) shifts.hi[i] = cfg.degrees[i] + 1;
  Expansion out;
  out.reserve(shifts.count(cfg.dim));
  for_each_cell(cfg.dim, shifts, [&](const Element& t) {
    Term term;
    term.id.level = b.level + 1;
    term.coeff = 1.0;
    for (int i = 0; i < cfg.dim; ++i) {
      term.id.knot[i] = 2 * b.knot[i] + t.index[i];
      term.coeff *= mask_coefficient(cfg.degrees[i], static_cast<int>(t.index[i]));
    }
    out.push_back(term);
  });
  return out;
}

double cardinal_bspline(int degree, double t) {
  if (!(t >= 0.0 && t < degree + 1.0)) return 0.0;
  // vals[j] = N_r(t - j), raised from r = 0 to r = degree
  std::vector<double> vals(static_cast<std::size_t>(degree) + 1);
  for (int j = 0; j <= degree; ++j) {
    const double s = t - j;
    vals[j] = (s >= 0.0 && s < 1.0) ? 1.0 : 0.0;
  }
  for (int r = 1; r <= degree; ++r) {
    for (int j = 0; j + r <= degree; ++j) {
      const double s = t - j;
      vals[j] = (s * vals[j] + (r + 1 - s) * vals[j + 1]) / r;
    }
  }
  return vals[0];
}

double evaluate(const MeshConfig& cfg, const BsplineId& b, std::span<const double> x) {
  require_in_domain(cfg, x);
  return evaluate_unchecked(cfg, b, x);
}

bool is_hb_selected(const HierarchicalMesh& mesh, const BsplineId& b) {
  if (b.level >= mesh.num_levels() || !in_index_set(mesh.config(), b)) return false;
  if (!support_inside_domain(mesh, b)) return false;
  // inside Omega^l, so "not inside Omega^{l+1}" means some support cell is active
  bool touches_active = false;
  for_each_cell(mesh.dim(), support_box(mesh.config(), b), [&](const Element& c) {
    if (!touches_active && !mesh.covered_by_domain(c, b.level + 1)) touches_active = true;
  });
  return touches_active;
}

std::vector<BsplineId> hb_basis(const HierarchicalMesh& mesh) {
  const MeshConfig& cfg = mesh.config();
  std::vector<BsplineId> out;
  for (int l = 0; l < mesh.num_levels(); ++l) {
    std::unordered_set<BsplineId, BsplineHash> candidates;
    for (const Element& e : mesh.active(l)) {
      CellBox knots;
      knots.level = l;
      for (int i = 0; i < cfg.dim; ++i) {
        knots.lo[i] = e.index[i] - cfg.degrees[i];
        knots.hi[i] = e.index[i];
      }
      for_each_cell(cfg.dim, knots, [&](const Element& k) { candidates.insert({l, k.index}); });
    }
    const std::size_t first = out.size();
    for (const BsplineId& b : candidates) {
      if (is_hb_selected(mesh, b)) out.push_back(b);
    }
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
  }
  return out;
}

Expansion truncate_once(const HierarchicalMesh& mesh, const Expansion& f, int next_level) {
  const MeshConfig& cfg = mesh.config();
  TermMap acc;
  for (const Term& term : f) {
    if (term.id.level != next_level - 1) {
      throw Error("truncate_once expects an expansion on level " + std::to_string(next_level - 1));
    }
    for (const Term& child : two_scale(cfg, term.id)) {
      if (!in_index_set(cfg, child.id)) continue;
      if (support_inside_domain(mesh, child.id)) continue;
      acc[child.id] += term.coeff * child.coeff;
    }
  }
  return to_expansion(acc);
}

ThbFunction truncated(const HierarchicalMesh& mesh, const BsplineId& origin) {
  const MeshConfig& cfg = mesh.config();
  TermMap open{{origin, 1.0}};
  TermMap closed;
  for (int next = origin.level + 1; next < mesh.num_levels() && !open.empty(); ++next) {
    TermMap refined;
    for (const auto& [id, c] : open) {
      if (!support_meets_next_domain(mesh, id)) {
        closed.emplace(id, c);
        continue;
      }
      for (const Term& child : two_scale(cfg, id)) {
        if (!in_index_set(cfg, child.id)) continue;
        if (support_inside_domain(mesh, child.id)) continue;
        refined[child.id] += c * child.coeff;
      }
    }
    open = std::move(refined);
  }
  closed.insert(open.begin(), open.end());
  return {origin, to_expansion(closed)};
}

Expansion finest_expansion(const MeshConfig& cfg, const Expansion& f, int level) {
  TermMap acc;
  TermMap pending;
  for (const Term& t : f) {
    if (t.id.level > level) throw Error("term finer than the requested level");
    (t.id.level == level ? acc : pending)[t.id] += t.coeff;
  }
  while (!pending.empty()) {
    TermMap next;
    for (const auto& [id, c] : pending) {
      for (const Term& child : two_scale(cfg, id)) {
        if (!in_index_set(cfg, child.id)) continue;
        (child.id.level == level ? acc : next)[child.id] += c * child.coeff;
      }
    }
    pending = std::move(next);
  }
  return to_expansion(acc);
}

double evaluate(const MeshConfig& cfg, const Expansion& f, std::span<const double> x) {
  require_in_domain(cfg, x);
  double s = 0.0;
  for (const Term& t : f) s += t.coeff * evaluate_unchecked(cfg, t.id, x);
  return s;
}

double evaluate(const MeshConfig& cfg, const ThbFunction& f, std::span<const double> x) {
  return evaluate(cfg, f.terms, x);
}

bool nonzero_on(const MeshConfig& cfg, const ThbFunction& f, const Element& e) {
  return std::any_of(f.terms.begin(), f.terms.end(), [&](const Term& t) {
    return box_meets_cell(cfg.dim, support_box(cfg, t.id), e);
  });
}

SupportBounds support_bounds(const MeshConfig& cfg, const ThbFunction& f) {
  SupportBounds b;
  for (int i = 0; i < cfg.dim; ++i) {
    b.lo[i] = static_cast<double>(cfg.extents[i]);
    b.hi[i] = 0.0;
  }
  for (const Term& t : f.terms) {
    const CellBox box = support_box(cfg, t.id);
    for (int i = 0; i < cfg.dim; ++i) {
      b.lo[i] = std::min(b.lo[i], std::ldexp(static_cast<double>(box.lo[i]), -box.level));
      b.hi[i] = std::max(b.hi[i], std::ldexp(static_cast<double>(box.hi[i] + 1), -box.level));
    }
  }
  return b;
}

ThbBasis thb_basis(const HierarchicalMesh& mesh) {
  const MeshConfig& cfg = mesh.config();
  ThbBasis basis;
  const auto origins = hb_basis(mesh);
  basis.functions.reserve(origins.size());
  std::vector<Element> cells;
  std::vector<Element> touched;
  for (const BsplineId& origin : origins) {
    const auto index = static_cast<std::uint32_t>(basis.functions.size());
    basis.functions.push_back(truncated(mesh, origin));
    cells.clear();
    for (const Term& t : basis.functions.back().terms) {
      for_each_cell(cfg.dim, support_box(cfg, t.id), [&](const Element& c) { cells.push_back(c); });
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    touched.clear();
    for (const Element& c : cells) {
      mesh.for_each_active_overlapping(c, [&](const Element& e) { touched.push_back(e); });
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (const Element& e : touched) basis.on_element[e].push_back(index);
  }
  return basis;
}

double basis_sum(const HierarchicalMesh& mesh, const ThbBasis& basis, std::span<const double> x) {
  const Element e = mesh.locate(x);
  const auto it = basis.on_element.find(e);
  if (it == basis.on_element.end()) return 0.0;
  double s = 0.0;
  for (std::uint32_t i : it->second) s += evaluate(mesh.config(), basis.functions[i], x);
  return s;
}

}  // namespace hbref
