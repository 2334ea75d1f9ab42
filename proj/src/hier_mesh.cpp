#include "hbref/hier_mesh.hpp"

#include <algorithm>
#include <cmath>

namespace hbref {

namespace {

const ElementSet& empty_set() {
  static const ElementSet kEmpty;
  return kEmpty;
}

CellBox full_grid(const MeshConfig& cfg, int level) {
  CellBox box;
  box.level = level;
  for (int i = 0; i < cfg.dim; ++i) box.hi[i] = cfg.cells(level, i) - 1;
  return box;
}

}  // namespace

HierarchicalMesh::HierarchicalMesh(const MeshConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  domains_.resize(1);
  for_each_cell(cfg_.dim, full_grid(cfg_, 0), [&](const Element& e) { domains_[0].insert(e); });
  active_ = domains_;
  count_ = domains_[0].size();
}

HierarchicalMesh HierarchicalMesh::from_domains(const MeshConfig& cfg,
                                                std::vector<ElementSet> domains) {
  cfg.validate();
  while (!domains.empty() && domains.back().empty()) domains.pop_back();
  if (domains.empty()) throw Error("domain hierarchy has no level 0");

  const std::size_t base = static_cast<std::size_t>(cfg.base_cell_count());
  if (domains[0].size() != base) throw Error("Omega^0 must cover the whole initial grid");
  for (std::size_t l = 0; l < domains.size(); ++l) {
    for (const Element& c : domains[l]) {
      if (c.level != static_cast<int>(l) || !in_grid(cfg, c)) {
        throw Error("cell " + to_string(cfg.dim, c) + " is not a level-" + std::to_string(l) +
                    " grid cell");
      }
      if (l == 0) continue;
      const Element parent = ancestor(c, static_cast<int>(l) - 1);
      if (!domains[l - 1].contains(parent)) {
        throw Error("nesting violated: cell " + to_string(cfg.dim, c) + " of Omega^" +
                    std::to_string(l) + " lies outside Omega^" + std::to_string(l - 1));
      }
      for (const Element& sibling : children(cfg, parent)) {
        if (!domains[l].contains(sibling)) {
          throw Error("Omega^" + std::to_string(l) + " is not a union of level-" +
                      std::to_string(l - 1) + " cells: cell " + to_string(cfg.dim, c) +
                      " lacks sibling " + to_string(cfg.dim, sibling));
        }
      }
    }
  }
  for (int l = 1; l < static_cast<int>(domains.size()); ++l) {
    if (domains[l].empty()) {
      throw Error("Omega^" + std::to_string(l) + " is empty below a nonempty finer level");
    }
  }

  HierarchicalMesh mesh;
  mesh.cfg_ = cfg;
  mesh.domains_ = std::move(domains);
  mesh.active_ = mesh.recompute_active();
  for (const auto& a : mesh.active_) mesh.count_ += a.size();
  return mesh;
}

const ElementSet& HierarchicalMesh::domain(int level) const {
  if (level < 0 || level >= num_levels()) return empty_set();
  return domains_[level];
}

const ElementSet& HierarchicalMesh::active(int level) const {
  if (level < 0 || level >= num_levels()) return empty_set();
  return active_[level];
}

bool HierarchicalMesh::is_active(const Element& e) const {
  return e.level >= 0 && e.level < num_levels() && active_[e.level].contains(e);
}

bool HierarchicalMesh::in_domain(const Element& cell) const {
  return cell.level >= 0 && cell.level < num_levels() && domains_[cell.level].contains(cell);
}

bool HierarchicalMesh::covered_by_domain(const Element& cell, int level) const {
  if (level < 0 || level >= num_levels()) return false;
  if (cell.level >= level) return domains_[level].contains(ancestor(cell, level));
  if (cell.level == level - 1) {
    // sibling closure: one child decides for all of them
    Element first = cell;
    first.level = level;
    for (int i = 0; i < cfg_.dim; ++i) first.index[i] *= 2;
    return domains_[level].contains(first);
  }
  for (const Element& c : children(cfg_, cell)) {
    if (!covered_by_domain(c, level)) return false;
  }
  return true;
}

std::vector<Element> HierarchicalMesh::active_elements() const {
  std::vector<Element> out;
  out.reserve(count_);
  for (const auto& level : active_) {
    auto s = sorted(level);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<Element> HierarchicalMesh::subdivide(const Element& e) {
  if (!is_active(e)) throw Error("cannot subdivide inactive element " + to_string(cfg_.dim, e));
  const int fine = e.level + 1;
  if (fine == num_levels()) {
    domains_.emplace_back();
    active_.emplace_back();
  }
  auto kids = children(cfg_, e);
  active_[e.level].erase(e);
  for (const Element& c : kids) {
    domains_[fine].insert(c);
    active_[fine].insert(c);
  }
  count_ += kids.size() - 1;
  return kids;
}

void HierarchicalMesh::descend_active(const Element& cell, std::vector<Element>& out) const {
  if (!in_domain(cell)) return;
  if (active_[cell.level].contains(cell)) {
    out.push_back(cell);
    return;
  }
  for (const Element& c : children(cfg_, cell)) descend_active(c, out);
}

std::vector<Element> HierarchicalMesh::active_overlapping(const Element& cell) const {
  std::vector<Element> out;
  for_each_active_overlapping(cell, [&](const Element& e) { out.push_back(e); });
  return out;
}

Element HierarchicalMesh::locate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != cfg_.dim) throw Error("point has wrong dimension");
  Element e;
  for (int i = 0; i < cfg_.dim; ++i) {
    if (!(x[i] >= 0.0 && x[i] <= static_cast<double>(cfg_.extents[i]))) {
      throw Error("point outside the domain");
    }
    e.index[i] = std::min<Index>(static_cast<Index>(std::floor(x[i])), cfg_.extents[i] - 1);
  }
  while (!active_[e.level].contains(e)) {
    const int l = e.level + 1;
    e.level = l;
    for (int i = 0; i < cfg_.dim; ++i) {
      e.index[i] = std::min<Index>(static_cast<Index>(std::floor(std::ldexp(x[i], l))),
                                   cfg_.cells(l, i) - 1);
    }
  }
  return e;
}

std::vector<ElementSet> HierarchicalMesh::recompute_active() const {
  std::vector<ElementSet> covered(domains_.size());
  for (std::size_t fine = 1; fine < domains_.size(); ++fine) {
    for (const Element& c : domains_[fine]) {
      for (std::size_t l = 0; l < fine; ++l) covered[l].insert(ancestor(c, static_cast<int>(l)));
    }
  }
  std::vector<ElementSet> active(domains_.size());
  for (std::size_t l = 0; l < domains_.size(); ++l) {
    for (const Element& c : domains_[l]) {
      if (!covered[l].contains(c)) active[l].insert(c);
    }
  }
  return active;
}

void HierarchicalMesh::validate() const {
  auto rebuilt = from_domains(cfg_, domains_);
  if (rebuilt.active_ != active_ || rebuilt.count_ != count_) {
    throw Error("maintained active sets differ from recomputation");
  }
  // tiling: active volumes add up to the volume of D
  long double volume = 0;
  for (const auto& level : active_) {
    for (const Element& e : level) volume += std::pow(static_cast<long double>(e.side()), cfg_.dim);
  }
  const auto expected = static_cast<long double>(cfg_.base_cell_count());
  if (std::fabs(volume - expected) > 1e-9L * expected) throw Error("active elements do not tile D");
}

bool operator==(const HierarchicalMesh& a, const HierarchicalMesh& b) {
  return a.cfg_ == b.cfg_ && a.domains_ == b.domains_;
}

HierarchicalMesh initial_mesh(const MeshConfig& cfg) { return HierarchicalMesh(cfg); }

HierarchicalMesh subdivided(const HierarchicalMesh& mesh, const Element& e) {
  HierarchicalMesh out = mesh;
  out.subdivide(e);
  return out;
}

void require_same_config(const HierarchicalMesh& a, const HierarchicalMesh& b) {
  const MeshConfig& ca = a.config();
  const MeshConfig& cb = b.config();
  if (ca.dim != cb.dim || ca.degrees != cb.degrees || ca.extents != cb.extents) {
    throw Error("meshes are defined on different grids");
  }
}

bool refinement_of(const HierarchicalMesh& a, const HierarchicalMesh& b) {
  require_same_config(a, b);
  if (a.num_levels() < b.num_levels()) return false;
  for (int l = 0; l < b.num_levels(); ++l) {
    const ElementSet& da = a.domain(l);
    for (const Element& c : b.domain(l)) {
      if (!da.contains(c)) return false;
    }
  }
  return true;
}

}  // namespace hbref
