#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hbref/hier_mesh.hpp"

namespace hbref {

/// Uniform tensor-product B-spline of a given level; its support is
/// prod_i (k_i 2^-l, (k_i + p_i + 1) 2^-l).  Knot indices may be negative for
/// functions straddling the lower boundary of D.
struct BsplineId {
  int level = 0;
  IndexArray knot{};

  friend bool operator==(const BsplineId&, const BsplineId&) = default;
  friend auto operator<=>(const BsplineId&, const BsplineId&) = default;
};

struct BsplineHash {
  std::size_t operator()(const BsplineId& b) const noexcept {
    return ElementHash{}(Element{b.level, b.knot});
  }
};

struct Term {
  BsplineId id;
  double coeff = 0.0;
};

/// Sparse nonnegative expansion in B-splines.
using Expansion = std::vector<Term>;

/// Member of the level basis: the support meets the interior of D.
bool in_index_set(const MeshConfig& cfg, const BsplineId& b);

/// Support cells of b clipped to D (the support "intersected with Omega^0").
CellBox support_box(const MeshConfig& cfg, const BsplineId& b);

/// The level-l basis, canonical order; prod_i (M_i 2^l + p_i) functions.
std::vector<BsplineId> level_basis(const MeshConfig& cfg, int level);

/// 2^-p binom(p+1, t), the univariate two-scale mask entry.
double mask_coefficient(int degree, int t);

/// Level-(l+1) representation of b; full tensor mask, including children
/// outside the index set (those vanish on D).
Expansion two_scale(const MeshConfig& cfg, const BsplineId& b);

/// Cardinal B-spline of degree p with knots 0,1,...,p+1 (Cox-de Boor).
double cardinal_bspline(int degree, double t);

/// Value of b at the parametric point x.
double evaluate(const MeshConfig& cfg, const BsplineId& b, std::span<const double> x);

/// HB selection: supp b inside Omega^l but not inside Omega^{l+1}.
bool is_hb_selected(const HierarchicalMesh& mesh, const BsplineId& b);

/// HB-spline basis of the mesh, canonical order.
std::vector<BsplineId> hb_basis(const HierarchicalMesh& mesh);

/// One truncation step.  `f` must be expressed entirely in level `next_level - 1`;
/// the result is its level-`next_level` representation with every term whose
/// support lies in Omega^{next_level} removed.
Expansion truncate_once(const HierarchicalMesh& mesh, const Expansion& f, int next_level);

/// Truncated hierarchical B-spline.
///
/// `terms` is a compact mixed-level form of trunc^{N-1}(...trunc^{l+1}(origin)):
/// a term is only re-expressed on the next level while its support still meets
/// the next domain, because terms away from Omega^{k+1} are never truncated
/// again.  finest_expansion() recovers the plain level-(N-1) coefficients.
struct ThbFunction {
  BsplineId origin;
  Expansion terms;  // sorted by id, strictly positive coefficients
};

ThbFunction truncated(const HierarchicalMesh& mesh, const BsplineId& origin);

/// Re-expresses every term of f on `level` (>= every term level).
Expansion finest_expansion(const MeshConfig& cfg, const Expansion& f, int level);

/// Value of f at x; throws Error for x outside D.
double evaluate(const MeshConfig& cfg, const ThbFunction& f, std::span<const double> x);
double evaluate(const MeshConfig& cfg, const Expansion& f, std::span<const double> x);

/// True iff f does not vanish identically on the open cell e.  Exact because
/// all coefficients are positive and so are the B-splines on their supports.
bool nonzero_on(const MeshConfig& cfg, const ThbFunction& f, const Element& e);

/// Union of the support cells of f, as the per-direction bounding interval.
struct SupportBounds {
  std::array<double, kMaxDim> lo{};
  std::array<double, kMaxDim> hi{};
};
SupportBounds support_bounds(const MeshConfig& cfg, const ThbFunction& f);

/// THB basis of a mesh together with the active-element incidence.
struct ThbBasis {
  std::vector<ThbFunction> functions;
  /// indices into `functions` of the functions nonzero on each active element
  std::unordered_map<Element, std::vector<std::uint32_t>, ElementHash> on_element;
};

ThbBasis thb_basis(const HierarchicalMesh& mesh);

/// sum_tau tau(x) over the functions nonzero on the element containing x.
double basis_sum(const HierarchicalMesh& mesh, const ThbBasis& basis, std::span<const double> x);

}  // namespace hbref
