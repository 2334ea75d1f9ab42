#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace hbref {

/// Largest supported parametric dimension. Children counts grow as 2^d and
/// support windows as (2p+1)^d, so anything beyond 4 is impractical anyway.
inline constexpr int kMaxDim = 4;

using Index = std::int64_t;
using IndexArray = std::array<Index, kMaxDim>;

/// Domain error raised on violated preconditions (bad configs, inactive
/// elements, malformed documents, ...).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension, per-direction degree, admissibility class and the size of the
/// initial box D = [0,M_1] x ... x [0,M_d] in unit cells.
struct MeshConfig {
  int dim = 1;
  std::array<int, kMaxDim> degrees{};
  IndexArray extents{};
  int class_m = 2;

  /// Validating constructor; throws Error on bad input.
  static MeshConfig make(int dim, const std::vector<int>& degrees,
                         const std::vector<Index>& extents, int class_m = 2);

  void validate() const;

  /// p := max_i p_i
  int max_degree() const;

  /// Number of level-k cells along direction i.
  Index cells(int level, int dir) const { return extents[dir] << level; }

  /// Number of level-0 cells.
  Index base_cell_count() const;

  friend bool operator==(const MeshConfig&, const MeshConfig&) = default;
};

/// Open dyadic cell  prod_i (j_i 2^-l, (j_i+1) 2^-l).  Unused trailing index
/// slots are kept at zero so that defaulted comparisons give the canonical
/// level-major, lexicographic traversal order.
struct Element {
  int level = 0;
  IndexArray index{};

  double side() const;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

Element make_element(int level, std::initializer_list<Index> index);

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::size_t h = std::hash<int>{}(e.level);
    for (Index v : e.index) {
      h ^= std::hash<Index>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using ElementSet = std::unordered_set<Element, ElementHash>;

/// Elements of `set` in canonical order.
std::vector<Element> sorted(const ElementSet& set);

/// Inclusive index box on one level.
struct CellBox {
  int level = 0;
  IndexArray lo{};
  IndexArray hi{};

  bool empty(int dim) const;
  std::size_t count(int dim) const;
};

/// Calls `f(Element)` for every cell of `box`, last direction fastest.
template <class F>
void for_each_cell(int dim, const CellBox& box, F&& f) {
  if (box.empty(dim)) return;
  Element e;
  e.level = box.level;
  for (int i = 0; i < dim; ++i) e.index[i] = box.lo[i];
  while (true) {
    f(static_cast<const Element&>(e));
    int i = dim - 1;
    for (; i >= 0; --i) {
      if (++e.index[i] <= box.hi[i]) break;
      e.index[i] = box.lo[i];
    }
    if (i < 0) return;
  }
}

bool in_grid(const MeshConfig& cfg, const Element& e);

/// The 2^d cells of level l+1 tiling e.
std::vector<Element> children(const MeshConfig& cfg, const Element& e);

/// The level-k cell containing e (k <= level of e).
Element ancestor(const Element& e, int k);

/// Index box of the support extension S(e,k): every level-k cell touched by a
/// level-k B-spline whose support meets e, clamped to the grid.
CellBox support_extension_box(const MeshConfig& cfg, const Element& e, int k);

std::vector<Element> support_extension(const MeshConfig& cfg, const Element& e, int k);

/// Euclidean distance of the cell midpoints.
double midpoint_distance(int dim, const Element& a, const Element& b);

/// True iff the open cells intersect (i.e. one contains the other).
bool overlaps(const Element& a, const Element& b);

std::string to_string(int dim, const Element& e);

}  // namespace hbref
