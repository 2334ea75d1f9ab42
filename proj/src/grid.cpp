#include "hbref/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hbref {

MeshConfig MeshConfig::make(int dim, const std::vector<int>& degrees,
                            const std::vector<Index>& extents, int class_m) {
  if (dim < 1 || dim > kMaxDim) {
    throw Error("dimension must be in [1," + std::to_string(kMaxDim) + "], got " +
                std::to_string(dim));
  }
  if (static_cast<int>(degrees.size()) != dim || static_cast<int>(extents.size()) != dim) {
    throw Error("expected " + std::to_string(dim) + " degrees and extents");
  }
  MeshConfig cfg;
  cfg.dim = dim;
  cfg.class_m = class_m;
  for (int i = 0; i < dim; ++i) {
    cfg.degrees[i] = degrees[i];
    cfg.extents[i] = extents[i];
  }
  cfg.validate();
  return cfg;
}

void MeshConfig::validate() const {
  if (dim < 1 || dim > kMaxDim) throw Error("dimension out of range");
  if (class_m < 2) throw Error("admissibility class must be >= 2");
  for (int i = 0; i < dim; ++i) {
    if (degrees[i] < 1) throw Error("degrees must be >= 1");
    if (extents[i] < 1) throw Error("extents must be >= 1");
  }
  for (int i = dim; i < kMaxDim; ++i) {
    if (degrees[i] != 0 || extents[i] != 0) throw Error("unused dimension slots must be zero");
  }
}

int MeshConfig::max_degree() const {
  return *std::max_element(degrees.begin(), degrees.begin() + dim);
}

Index MeshConfig::base_cell_count() const {
  Index n = 1;
  for (int i = 0; i < dim; ++i) n *= extents[i];
  return n;
}

double Element::side() const { return std::ldexp(1.0, -level); }

Element make_element(int level, std::initializer_list<Index> index) {
  if (index.size() > static_cast<std::size_t>(kMaxDim)) throw Error("too many indices");
  Element e;
  e.level = level;
  std::copy(index.begin(), index.end(), e.index.begin());
  return e;
}

std::vector<Element> sorted(const ElementSet& set) {
  std::vector<Element> out(set.begin(), set.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool CellBox::empty(int dim) const {
  for (int i = 0; i < dim; ++i) {
    if (hi[i] < lo[i]) return true;
  }
  return false;
}

std::size_t CellBox::count(int dim) const {
  if (empty(dim)) return 0;
  std::size_t n = 1;
  for (int i = 0; i < dim; ++i) n *= static_cast<std::size_t>(hi[i] - lo[i] + 1);
  return n;
}

bool in_grid(const MeshConfig& cfg, const Element& e) {
  if (e.level < 0) return false;
  for (int i = 0; i < cfg.dim; ++i) {
    if (e.index[i] < 0 || e.index[i] >= cfg.cells(e.level, i)) return false;
  }
  for (int i = cfg.dim; i < kMaxDim; ++i) {
    if (e.index[i] != 0) return false;
  }
  return true;
}

std::vector<Element> children(const MeshConfig& cfg, const Element& e) {
  CellBox box;
  box.level = e.level + 1;
  for (int i = 0; i < cfg.dim; ++i) {
    box.lo[i] = 2 * e.index[i];
    box.hi[i] = 2 * e.index[i] + 1;
  }
  std::vector<Element> out;
  out.reserve(std::size_t{1} << cfg.dim);
  for_each_cell(cfg.dim, box, [&](const Element& c) { out.push_back(c); });
  return out;
}

Element ancestor(const Element& e, int k) {
  if (k < 0 || k > e.level) {
    throw Error("ancestor level " + std::to_string(k) + " outside [0," +
                std::to_string(e.level) + "]");
  }
  Element a = e;
  a.level = k;
  const int shift = e.level - k;
  // indices are nonnegative, so the arithmetic shift is floor division
  for (Index& v : a.index) v >>= shift;
  return a;
}

CellBox support_extension_box(const MeshConfig& cfg, const Element& e, int k) {
  const Element a = ancestor(e, k);
  CellBox box;
  box.level = k;
  for (int i = 0; i < cfg.dim; ++i) {
    box.lo[i] = std::max<Index>(0, a.index[i] - cfg.degrees[i]);
    box.hi[i] = std::min<Index>(cfg.cells(k, i) - 1, a.index[i] + cfg.degrees[i]);
  }
  return box;
}

std::vector<Element> support_extension(const MeshConfig& cfg, const Element& e, int k) {
  std::vector<Element> out;
  for_each_cell(cfg.dim, support_extension_box(cfg, e, k),
                [&](const Element& c) { out.push_back(c); });
  return out;
}

double midpoint_distance(int dim, const Element& a, const Element& b) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double ma = std::ldexp(static_cast<double>(a.index[i]) + 0.5, -a.level);
    const double mb = std::ldexp(static_cast<double>(b.index[i]) + 0.5, -b.level);
    s += (ma - mb) * (ma - mb);
  }
  return std::sqrt(s);
}

bool overlaps(const Element& a, const Element& b) {
  if (a.level <= b.level) return ancestor(b, a.level) == a;
  return ancestor(a, b.level) == b;
}

std::string to_string(int dim, const Element& e) {
  std::ostringstream os;
  os << "(" << e.level << ",(";
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << e.index[i];
  os << "))";
  return os.str();
}

}  // namespace hbref
