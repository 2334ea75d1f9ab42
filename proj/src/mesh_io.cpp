#include "hbref/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace hbref {

using json = nlohmann::json;

namespace {

void emit_index(std::ostream& os, int dim, const IndexArray& index) {
  os << '[';
  for (int i = 0; i < dim; ++i) os << (i ? "," : "") << index[i];
  os << ']';
}

json element_json(int dim, const Element& e) {
  json idx = json::array();
  for (int i = 0; i < dim; ++i) idx.push_back(e.index[i]);
  return {{"level", e.level}, {"index", idx}};
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(path + "." + key + ": missing field");
  return *it;
}

Index as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw Error(path + ": expected an integer");
  return v.get<Index>();
}

std::vector<Index> as_int_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw Error(path + ": expected an array");
  std::vector<Index> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

IndexArray as_index(const json& v, int dim, const std::string& path) {
  const auto list = as_int_list(v, path);
  if (static_cast<int>(list.size()) != dim) {
    throw Error(path + ": expected " + std::to_string(dim) + " indices");
  }
  IndexArray out{};
  std::copy(list.begin(), list.end(), out.begin());
  return out;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string emit_mesh(const HierarchicalMesh& mesh) {
  const MeshConfig& cfg = mesh.config();
  std::ostringstream os;
  os << "{\n  \"format_version\": " << kFormatVersion << ",\n  \"dim\": " << cfg.dim
     << ",\n  \"degrees\": ";
  IndexArray degrees{};
  for (int i = 0; i < cfg.dim; ++i) degrees[i] = cfg.degrees[i];
  emit_index(os, cfg.dim, degrees);
  os << ",\n  \"extents\": ";
  emit_index(os, cfg.dim, cfg.extents);
  os << ",\n  \"class_m\": " << cfg.class_m << ",\n  \"levels\": [";
  for (int l = 0; l < mesh.num_levels(); ++l) {
    os << (l ? ",\n    [" : "\n    [");
    bool first = true;
    for (const Element& c : sorted(mesh.domain(l))) {
      if (!first) os << ',';
      first = false;
      emit_index(os, cfg.dim, c.index);
    }
    os << ']';
  }
  os << "\n  ]\n}\n";
  return os.str();
}

HierarchicalMesh parse_mesh(const std::string& text) {
  const json doc = parse_json(text);
  const std::string root = "mesh";
  const Index version = as_int(field(doc, "format_version", root), root + ".format_version");
  if (version != kFormatVersion) {
    throw Error(root + ".format_version: unsupported version " + std::to_string(version));
  }
  const auto dim = static_cast<int>(as_int(field(doc, "dim", root), root + ".dim"));
  const auto degrees = as_int_list(field(doc, "degrees", root), root + ".degrees");
  const auto extents = as_int_list(field(doc, "extents", root), root + ".extents");
  const auto class_m = static_cast<int>(as_int(field(doc, "class_m", root), root + ".class_m"));
  MeshConfig cfg;
  try {
    cfg = MeshConfig::make(dim, std::vector<int>(degrees.begin(), degrees.end()), extents, class_m);
  } catch (const Error& e) {
    throw Error(root + ": " + e.what());
  }

  const json& levels = field(doc, "levels", root);
  if (!levels.is_array()) throw Error(root + ".levels: expected an array");
  std::vector<ElementSet> domains(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const std::string path = root + ".levels[" + std::to_string(l) + "]";
    if (!levels[l].is_array()) throw Error(path + ": expected an array of cells");
    for (std::size_t k = 0; k < levels[l].size(); ++k) {
      Element c;
      c.level = static_cast<int>(l);
      c.index = as_index(levels[l][k], dim, path + "[" + std::to_string(k) + "]");
      if (!domains[l].insert(c).second) {
        throw Error(path + "[" + std::to_string(k) + "]: duplicate cell " + to_string(dim, c));
      }
    }
  }
  try {
    return HierarchicalMesh::from_domains(cfg, std::move(domains));
  } catch (const Error& e) {
    throw Error(root + ".levels: " + e.what());
  }
}

std::string emit_marks(int dim, const std::vector<Element>& marks) {
  json out = json::array();
  for (const Element& e : marks) out.push_back(element_json(dim, e));
  return out.dump() + "\n";
}

std::vector<Element> parse_marks(const std::string& text, int dim) {
  const json doc = parse_json(text);
  if (!doc.is_array()) throw Error("marks: expected an array of {level, index} records");
  std::vector<Element> out;
  for (std::size_t k = 0; k < doc.size(); ++k) {
    const std::string path = "marks[" + std::to_string(k) + "]";
    Element e;
    e.level = static_cast<int>(as_int(field(doc[k], "level", path), path + ".level"));
    e.index = as_index(field(doc[k], "index", path), dim, path + ".index");
    out.push_back(e);
  }
  return out;
}

std::string emit_log(int dim, const ProvenanceLog& log) {
  json marked = json::array();
  for (const auto& ev : log.marked) {
    json j = element_json(dim, ev.element);
    j["step"] = ev.step;
    marked.push_back(j);
  }
  json calls = json::array();
  for (const auto& ev : log.calls) {
    calls.push_back({{"step", ev.step},
                     {"caller", ev.caller ? element_json(dim, *ev.caller) : json(nullptr)},
                     {"callee", element_json(dim, ev.callee)}});
  }
  json created = json::array();
  for (const auto& ev : log.created) {
    json chain = json::array();
    for (const Element& c : ev.chain) chain.push_back(element_json(dim, c));
    created.push_back({{"step", ev.step},
                       {"element", element_json(dim, ev.element)},
                       {"parent", element_json(dim, ev.parent)},
                       {"chain", chain}});
  }
  return json{{"marked", marked}, {"calls", calls}, {"created", created}}.dump(1) + "\n";
}

std::string render_svg(const HierarchicalMesh& mesh, bool legend) {
  const MeshConfig& cfg = mesh.config();
  if (cfg.dim > 2) throw Error("rendering supports d = 1 and d = 2 only");
  static constexpr const char* kPalette[] = {"#f7fbff", "#deebf7", "#c6dbef", "#9ecae1",
                                             "#6baed6", "#4292c6", "#2171b5", "#08519c",
                                             "#08306b"};
  constexpr int kColors = sizeof(kPalette) / sizeof(kPalette[0]);
  const double size = 512.0;
  const Index span = std::max(cfg.extents[0], cfg.dim == 2 ? cfg.extents[1] : Index{1});
  const double scale = size / static_cast<double>(span);
  const double width = scale * static_cast<double>(cfg.extents[0]);
  const int levels = mesh.num_levels();
  const double height = cfg.dim == 2 ? scale * static_cast<double>(cfg.extents[1])
                                     : 24.0 * (levels + 1);
  const double legend_width = legend ? 110.0 : 0.0;

  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + legend_width + 8
     << "\" height=\"" << std::max(height, legend ? 20.0 * levels + 8 : 0.0) + 8
     << "\" viewBox=\"-4 -4 " << width + legend_width + 8 << ' '
     << std::max(height, legend ? 20.0 * levels + 8 : 0.0) + 8 << "\">\n";
  for (const Element& e : mesh.active_elements()) {
    const double h = e.side() * scale;
    const double stroke = std::max(0.1, 1.5 * std::pow(0.75, e.level));
    const double x = static_cast<double>(e.index[0]) * h;
    double y;
    double rect_h;
    if (cfg.dim == 2) {
      // y axis points up in parameter space
      y = height - static_cast<double>(e.index[1] + 1) * h;
      rect_h = h;
    } else {
      rect_h = 24.0 * (e.level + 1);
      y = height - rect_h;
    }
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << h << "\" height=\"" << rect_h
       << "\" fill=\"" << kPalette[std::min(e.level, kColors - 1)]
       << "\" stroke=\"black\" stroke-width=\"" << stroke << "\"/>\n";
  }
  if (legend) {
    for (int l = 0; l < levels; ++l) {
      const double y = 20.0 * l;
      os << "<g class=\"legend\"><rect x=\"" << width + 12 << "\" y=\"" << y
         << "\" width=\"14\" height=\"14\" fill=\"" << kPalette[std::min(l, kColors - 1)]
         << "\" stroke=\"black\" stroke-width=\"0.5\"/><text x=\"" << width + 32 << "\" y=\""
         << y + 11 << "\" font-size=\"11\">level " << l << "</text></g>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace hbref
