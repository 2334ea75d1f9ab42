#pragma once

#include <string>
#include <vector>

#include "hbref/hier_mesh.hpp"
#include "hbref/refine.hpp"

namespace hbref {

inline constexpr int kFormatVersion = 1;

/// Canonical JSON text of the domain hierarchy:
///   {"format_version":1,"dim":d,"degrees":[...],"extents":[...],"class_m":m,
///    "levels":[[cells of Omega^0],[cells of Omega^1],...]}
/// with every cell an index tuple and cells sorted lexicographically.
std::string emit_mesh(const HierarchicalMesh& mesh);

/// Parses and validates a mesh document; throws Error with a field-path
/// diagnostic on malformed input or violated hierarchy invariants.
HierarchicalMesh parse_mesh(const std::string& text);

/// Marks document: [{"level":l,"index":[...]}, ...]
std::string emit_marks(int dim, const std::vector<Element>& marks);
std::vector<Element> parse_marks(const std::string& text, int dim);

std::string emit_log(int dim, const ProvenanceLog& log);

/// SVG of the active elements.  d = 2 draws the nested grid; d = 1 draws one
/// bar per element with height growing with its level.  d >= 3 throws Error.
std::string render_svg(const HierarchicalMesh& mesh, bool legend = false);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace hbref
