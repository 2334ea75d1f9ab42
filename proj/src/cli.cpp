#include "hbref/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hbref/admissibility.hpp"
#include "hbref/complexity.hpp"
#include "hbref/mesh_io.hpp"
#include "hbref/overlay.hpp"
#include "hbref/refine.hpp"
#include "hbref/spline_basis.hpp"

namespace hbref {

namespace {

std::string bool_text(bool v) { return v ? "true" : "false"; }

std::string knots_text(int dim, const IndexArray& k) {
  std::ostringstream os;
  for (int i = 0; i < dim; ++i) os << (i ? ":" : "") << k[i];
  return os.str();
}

/// Residual |sum tau(x) - 1| at the sample points of a k-per-unit grid,
/// offset so that no sample sits on a dyadic cell face.
struct ResidualSampler {
  const HierarchicalMesh& mesh;
  const ThbBasis& basis;
  int per_unit;

  template <class F>
  void for_each_point(F&& f) const {
    const MeshConfig& cfg = mesh.config();
    const double offset = 0.5 * (std::sqrt(5.0) - 1.0);
    CellBox box;
    for (int i = 0; i < cfg.dim; ++i) box.hi[i] = cfg.extents[i] * per_unit - 1;
    std::vector<double> x(static_cast<std::size_t>(cfg.dim));
    for_each_cell(cfg.dim, box, [&](const Element& s) {
      for (int i = 0; i < cfg.dim; ++i) x[i] = (static_cast<double>(s.index[i]) + offset) / per_unit;
      f(std::span<const double>(x));
    });
  }
};

int run_init(int dim, const std::vector<int>& degrees,
             const std::vector<Index>& extents, int m, const std::string& out_path,
             std::ostream& out) {
  const MeshConfig cfg = MeshConfig::make(dim, degrees, extents, m);
  const std::string text = emit_mesh(HierarchicalMesh(cfg));
  if (out_path.empty()) out << text;
  else write_file(out_path, text);
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Admissible refinement of hierarchical B-spline meshes"};
  app.name("hbref");
  app.require_subcommand(1);

  // init
  auto* init = app.add_subcommand("init", "Write the initial mesh G^0");
  int init_dim = 2;
  int init_class = 2;
  std::vector<int> init_degrees;
  std::vector<Index> init_extents;
  std::string init_out;
  init->add_option("--dim", init_dim, "parametric dimension")->required();
  init->add_option("--degrees", init_degrees, "degree per direction")->required();
  init->add_option("--extents", init_extents, "initial cells per direction")->required();
  init->add_option("--class", init_class, "admissibility class m");
  init->add_option("-o,--out", init_out, "output mesh file (default: stdout)");

  // refine
  auto* refine_cmd = app.add_subcommand("refine", "Refine marked elements, keeping strict admissibility");
  std::string refine_mesh;
  std::string refine_marks;
  std::string refine_out;
  std::string refine_log;
  int refine_class = 0;
  bool refine_validate = false;
  refine_cmd->add_option("mesh", refine_mesh, "mesh document")->required();
  refine_cmd->add_option("marks", refine_marks, "marks document")->required();
  refine_cmd->add_option("-o,--out", refine_out, "refined mesh file")->required();
  refine_cmd->add_option("--class", refine_class, "admissibility class m (default: mesh class_m)");
  refine_cmd->add_option("--log", refine_log, "write the provenance log to this file");
  refine_cmd->add_flag("--validate", refine_validate, "run the admissibility oracles");

  // check
  auto* check = app.add_subcommand("check", "Classify the admissibility of a mesh");
  std::string check_mesh;
  int check_class = 0;
  std::vector<int> check_range{2, 8};
  check->add_option("mesh", check_mesh, "mesh document")->required();
  check->add_option("--class", check_class, "class m to test (default: mesh class_m)");
  check->add_option("--range", check_range, "range lo hi searched for the strict class")
      ->expected(2);

  // overlay
  auto* overlay_cmd = app.add_subcommand("overlay", "Coarsest common refinement of two meshes");
  std::string overlay_a;
  std::string overlay_b;
  std::string overlay_out;
  int overlay_check = 0;
  overlay_cmd->add_option("first", overlay_a, "first mesh")->required();
  overlay_cmd->add_option("second", overlay_b, "second mesh")->required();
  overlay_cmd->add_option("-o,--out", overlay_out, "overlay mesh file")->required();
  overlay_cmd->add_option("--check", overlay_check, "verify the overlay properties for class m");

  // basis
  auto* basis_cmd = app.add_subcommand("basis", "List the THB basis of a mesh");
  std::string basis_mesh;
  int basis_samples = 8;
  basis_cmd->add_option("mesh", basis_mesh, "mesh document")->required();
  basis_cmd->add_option("--samples", basis_samples, "sample points per unit length and direction")
      ->check(CLI::PositiveNumber);

  // complexity
  auto* cx = app.add_subcommand("complexity", "Run the refinement complexity experiment");
  int cx_dim = 2;
  std::vector<int> cx_degrees;
  std::vector<Index> cx_extents;
  int cx_class = 2;
  std::string cx_policy = "single-random";
  int cx_steps = 10;
  int cx_seeds = 1;
  std::uint64_t cx_seed = 0;
  double cx_fraction = 0.1;
  std::size_t cx_max_marks = 0;
  std::string cx_out;
  std::string cx_counts;
  std::string cx_initial;
  cx->add_option("--dim", cx_dim, "parametric dimension")->required();
  cx->add_option("--degrees", cx_degrees, "degree per direction")->required();
  cx->add_option("--extents", cx_extents, "initial cells per direction (default 8 each)");
  cx->add_option("--class", cx_class, "admissibility class m");
  cx->add_option("--policy", cx_policy,
                 "random-fraction | corner-chase | single-deepest | single-random");
  cx->add_option("--steps", cx_steps, "number of refinement steps J")->check(CLI::NonNegativeNumber);
  cx->add_option("--seeds", cx_seeds, "number of seeds")->check(CLI::PositiveNumber);
  cx->add_option("--seed", cx_seed, "first seed");
  cx->add_option("--fraction", cx_fraction, "marked fraction for random-fraction");
  cx->add_option("--max-marks", cx_max_marks, "cap on marks per step (0 = none)");
  cx->add_option("--out", cx_out, "results CSV (default: stdout)");
  cx->add_option("--counts-out", cx_counts, "per-step element counts CSV");
  cx->add_option("--initial", cx_initial, "custom initial mesh");

  // render
  auto* render = app.add_subcommand("render", "Render a 1D or 2D mesh as SVG");
  std::string render_mesh;
  std::string render_out;
  bool render_legend = false;
  render->add_option("mesh", render_mesh, "mesh document")->required();
  render->add_option("-o,--out", render_out, "SVG file (default: stdout)");
  render->add_flag("--legend", render_legend, "add a color-by-level legend");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*init) {
      return run_init(init_dim, init_degrees, init_extents, init_class, init_out, out);
    }

    if (*refine_cmd) {
      HierarchicalMesh mesh = parse_mesh(read_file(refine_mesh));
      const int m = refine_class ? refine_class : mesh.config().class_m;
      const auto marks = parse_marks(read_file(refine_marks), mesh.dim());
      ProvenanceLog log;
      RefineOptions options;
      options.validate = refine_validate;
      const HierarchicalMesh refined = refine(mesh, marks, m, &log, options);
      if (refine_validate) {
        refined.validate();
        const auto report = is_admissible(refined, m);
        if (!report.admissible) {
          err << "error: refined mesh is not admissible of class " << m << "\n";
          return 1;
        }
      }
      write_file(refine_out, emit_mesh(refined));
      if (!refine_log.empty()) write_file(refine_log, emit_log(mesh.dim(), log));
      out << "elements: " << mesh.element_count() << " -> " << refined.element_count() << "\n";
      return 0;
    }

    if (*check) {
      const HierarchicalMesh mesh = parse_mesh(read_file(check_mesh));
      const int m = check_class ? check_class : mesh.config().class_m;
      const auto report = check_admissibility(mesh, m);
      const auto strict = strict_class(mesh, check_range[0], check_range[1]);
      const int dim = mesh.dim();
      std::size_t cap = static_cast<std::size_t>(m);
      for (int i = 0; i < dim; ++i) cap *= static_cast<std::size_t>(mesh.config().degrees[i] + 1);
      out << "class: " << m << "\n";
      out << "strictly admissible: " << bool_text(report.strictly_admissible) << "\n";
      if (report.strict_witness) {
        out << "  witness cell: " << to_string(dim, *report.strict_witness) << "\n";
      }
      out << "admissible: " << bool_text(report.admissible) << "\n";
      if (report.admissible_witness) {
        out << "  witness element: " << to_string(dim, *report.admissible_witness)
            << " carries functions of levels " << report.witness_min_level << ".."
            << report.witness_max_level << "\n";
      }
      out << "strict class in [" << check_range[0] << "," << check_range[1]
          << "]: " << (strict ? std::to_string(*strict) : std::string("none")) << "\n";
      out << "admissibility class: " << report.level_span << "\n";
      out << "max functions per element: " << report.max_functions_on_element << " (bound < " << cap
          << ")\n";
      return report.strictly_admissible && report.admissible ? 0 : 1;
    }

    if (*overlay_cmd) {
      const HierarchicalMesh a = parse_mesh(read_file(overlay_a));
      const HierarchicalMesh b = parse_mesh(read_file(overlay_b));
      const HierarchicalMesh star = overlay(a, b);
      write_file(overlay_out, emit_mesh(star));
      out << "elements: " << a.element_count() << " (x) " << b.element_count() << " -> "
          << star.element_count() << "\n";
      if (overlay_check) {
        const auto r = check_overlay_properties(a, b, overlay_check);
        out << "strictly admissible: " << bool_text(r.strictly_admissible) << "\n";
        out << "omega contains union: " << bool_text(r.omega_contains_union) << "\n";
        out << "refines both: " << bool_text(r.refines_both) << "\n";
        out << "cardinality bound: " << bool_text(r.cardinality_bound) << " (" << r.overlay_count
            << " <= " << r.bound << ")\n";
        return r.all() ? 0 : 1;
      }
      return 0;
    }

    if (*basis_cmd) {
      const HierarchicalMesh mesh = parse_mesh(read_file(basis_mesh));
      const MeshConfig& cfg = mesh.config();
      const ThbBasis basis = thb_basis(mesh);
      std::vector<double> residual(basis.functions.size(), 0.0);
      double worst = 0.0;
      ResidualSampler sampler{mesh, basis, basis_samples};
      sampler.for_each_point([&](std::span<const double> x) {
        const Element e = mesh.locate(x);
        const auto it = basis.on_element.find(e);
        double s = 0.0;
        if (it != basis.on_element.end()) {
          for (std::uint32_t i : it->second) s += evaluate(cfg, basis.functions[i], x);
        }
        const double r = std::fabs(s - 1.0);
        worst = std::max(worst, r);
        if (it == basis.on_element.end()) return;
        for (std::uint32_t i : it->second) residual[i] = std::max(residual[i], r);
      });
      const int finest = mesh.num_levels() - 1;
      out << "origin_level origin_knot finest_terms max_pou_residual\n";
      out << std::scientific << std::setprecision(3);
      for (std::size_t i = 0; i < basis.functions.size(); ++i) {
        const ThbFunction& f = basis.functions[i];
        out << f.origin.level << ' ' << knots_text(cfg.dim, f.origin.knot) << ' '
            << finest_expansion(cfg, f.terms, finest).size() << ' ' << residual[i] << "\n";
      }
      out << "functions: " << basis.functions.size() << "\n";
      out << "max residual: " << worst << "\n";
      return 0;
    }

    if (*cx) {
      if (cx_extents.empty()) cx_extents.assign(static_cast<std::size_t>(cx_dim), 8);
      const MeshConfig cfg = MeshConfig::make(cx_dim, cx_degrees, cx_extents, cx_class);
      MarkingPolicy policy;
      policy.kind = parse_policy(cx_policy);
      policy.fraction = cx_fraction;
      policy.max_marks = cx_max_marks;
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < cx_seeds; ++i) seeds.push_back(cx_seed + static_cast<std::uint64_t>(i));
      std::optional<HierarchicalMesh> initial;
      if (!cx_initial.empty()) {
        initial = parse_mesh(read_file(cx_initial));
        require_same_config(*initial, HierarchicalMesh(cfg));
        if (initial->num_levels() > 1) {
          err << "warning: initial mesh is not the level-0 grid; the complexity bound is only "
                 "established for runs starting from G^0\n";
        }
      }
      const auto rows = run_experiment(cfg, cx_class, policy, cx_steps, seeds,
                                       initial ? &*initial : nullptr);
      std::ostringstream csv;
      write_csv(csv, rows);
      if (cx_out.empty()) out << csv.str();
      else write_file(cx_out, csv.str());
      if (!cx_counts.empty()) {
        std::ostringstream counts;
        counts << "seed,step,elements\n";
        for (const auto& r : rows) {
          for (std::size_t j = 0; j < r.element_counts.size(); ++j) {
            counts << r.seed << ',' << j << ',' << r.element_counts[j] << "\n";
          }
        }
        write_file(cx_counts, counts.str());
      }
      bool ok = true;
      for (const auto& r : rows) ok = ok && r.ratio <= r.lambda_cap && r.max_lb_deficit <= 0.0 &&
                                      r.max_ub_sum <= r.lambda_cap;
      if (!ok) err << "error: a complexity inequality failed\n";
      return ok ? 0 : 1;
    }

    if (*render) {
      const HierarchicalMesh mesh = parse_mesh(read_file(render_mesh));
      const std::string svg = render_svg(mesh, render_legend);
      if (render_out.empty()) out << svg;
      else write_file(render_out, svg);
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace hbref
