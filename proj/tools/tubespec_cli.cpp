// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

// Command-line front end: spectra, mode tables, clustering scans, oracle
// comparisons and slab searches on singular tubes.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "tubespec/io.hpp"
#include "tubespec/tubespec.hpp"

namespace {

using tubespec::io::json;

/// Thrown for flag combinations CLI11 cannot express; exits with 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LatticeArgs {
  std::vector<double> cone;
  std::vector<double> basis;
  std::string file;
  double boundary_area = 1.0;

  void add_to(CLI::App* cmd) {
    auto* c = cmd->add_option("--cone", cone, "cone tube alpha,twist,length")->delimiter(',')->expected(3);
    auto* b = cmd->add_option("--basis", basis, "lattice basis v1x,v1y,v2x,v2y")->delimiter(',')->expected(4);
    auto* f = cmd->add_option("--lattice", file, "lattice JSON file")->check(CLI::ExistingFile);
    c->excludes(b)->excludes(f);
    b->excludes(f);
    cmd->add_option("--boundary-area", boundary_area, "area of the boundary torus")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  tubespec::LatticeBasis lattice() const {
    if (cone.size() == 3) return tubespec::LatticeBasis::cone(cone[0], cone[1], cone[2]);
    if (basis.size() == 4) return {tubespec::Vec2(basis[0], basis[1]), tubespec::Vec2(basis[2], basis[3])};
    if (!file.empty()) return tubespec::io::lattice_from_json(read_json(file));
    throw UsageError("one of --cone, --basis, --lattice is required");
  }

  static json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tubespec::BadConfig("cannot open " + path);
    try {
      return json::parse(in);
    } catch (const json::parse_error& e) {
      throw tubespec::BadConfig(path + ": " + e.what());
    }
  }
};

enum class Format { Json, Csv };

Format format_of(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") return Format::Csv;
  return Format::Json;
}

CLI::Validator output_path() {
  return CLI::Validator(
      [](const std::string& p) -> std::string {
        const auto dot = p.rfind('.');
        const std::string ext = dot == std::string::npos ? "" : p.substr(dot);
        return ext == ".json" || ext == ".csv" ? "" : "output file must end in .json or .csv";
      },
      "PATH(.json|.csv)");
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw tubespec::BadConfig("cannot write " + path);
  out << text;
  if (!out) throw tubespec::BadConfig("write failed for " + path);
  spdlog::info("wrote {}", path);
}

void emit_json(const std::string& path, const json& j) {
  if (!path.empty() && format_of(path) == Format::Csv) throw UsageError("this command writes JSON only (--out *.json)");
  emit(path, j.dump(2) + "\n");
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("tubespec");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("TUBESPEC_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug")
    spdlog::set_level(spdlog::level::debug);
  else if (level == "info")
    spdlog::set_level(spdlog::level::info);
  else
    spdlog::set_level(spdlog::level::err);
}

int run(int argc, char** argv) {
  CLI::App app{"Spectral computations on singular hyperbolic tubes"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "tube eigenvalues in a window");
  LatticeArgs sp_lat;
  sp_lat.add_to(spectrum);
  std::vector<double> window;
  std::string sp_bc = "dirichlet", sp_out;
  spectrum->add_option("--window", window, "energy window a,b")->delimiter(',')->expected(2)->required();
  spectrum->add_option("--right-bc", sp_bc, "dirichlet | natural | robin:<kappa>")->capture_default_str();
  spectrum->add_option("--out", sp_out, "output file (.json or .csv)")->check(output_path());

  // classify-modes
  auto* classify = app.add_subcommand("classify-modes", "enumerate modes and classify the endpoint r = 0");
  LatticeArgs cm_lat;
  cm_lat.add_to(classify);
  std::optional<double> cm_radius;
  double energy_bound = 50.0;
  std::string cm_out;
  classify->add_option("--radius", cm_radius, "tube radius (default: from the boundary area)")
      ->check(CLI::PositiveNumber);
  classify->add_option("--energy-bound", energy_bound, "largest cross-section eigenvalue at R")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  classify->add_option("--out", cm_out, "output file (.json or .csv)")->check(output_path());

  // cluster-scan
  auto* cluster = app.add_subcommand("cluster-scan", "eigenvalue counts in [1, 1 + x^2] along a family");
  std::string family_path, cl_out, cl_bc, source = "tube";
  double x = 1.0;
  std::optional<double> lambda_spec;
  cluster->add_option("--family", family_path, "family JSON file")->required()->check(CLI::ExistingFile);
  cluster->add_option("--x", x, "window half-width parameter")->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--right-bc", cl_bc, "override the family's boundary condition");
  cluster->add_option("--source", source, "tube | model")->check(CLI::IsMember({"tube", "model"}))->capture_default_str();
  cluster->add_option("--lambda-spec", lambda_spec, "also tabulate eigenvalues below this threshold in (0, 1)");
  cluster->add_option("--out", cl_out, "output file (.json or .csv)")->check(output_path());

  // oracle-compare
  auto* oracle = app.add_subcommand("oracle-compare", "mode decomposition against the 3D grid discretization");
  LatticeArgs oc_lat;
  oc_lat.add_to(oracle);
  int k = 10, refine = 0;
  std::string oc_bc = "dirichlet", oc_out;
  oracle->add_option("--k", k, "number of eigenvalues")->check(CLI::Range(1, 200))->capture_default_str();
  oracle->add_option("--refine", refine, "uniform refinements after the default grid")
      ->check(CLI::Range(0, 3))
      ->capture_default_str();
  oracle->add_option("--right-bc", oc_bc, "dirichlet | natural")->capture_default_str();
  oracle->add_option("--out", oc_out, "output file (.json)")->check(output_path());

  // slab-analyze
  auto* slab = app.add_subcommand("slab-analyze", "locate a low-energy slab for the near-zero eigenfunction");
  LatticeArgs sl_lat;
  sl_lat.add_to(slab);
  double rho = 1.0, c = 8.0, sl_lambda = 0.5;
  std::string sl_out;
  slab->add_option("--rho", rho, "inner radius of the search")->check(CLI::NonNegativeNumber)->capture_default_str();
  slab->add_option("--c", c, "search length, > 4")->capture_default_str();
  slab->add_option("--lambda-spec", sl_lambda, "spectral threshold in (0, 1)")->capture_default_str();
  slab->add_option("--out", sl_out, "output file (.json)")->check(output_path());

  // radius
  auto* radius = app.add_subcommand("radius", "tube radius, covolume and shape of a lattice");
  LatticeArgs ra_lat;
  ra_lat.add_to(radius);
  std::string ra_out;
  radius->add_option("--out", ra_out, "output file (.json)")->check(output_path());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  configure_logging();
  tubespec::SolverConfig cfg;

  if (spectrum->parsed()) {
    const auto basis = sp_lat.lattice();
    const auto geo = tubespec::solve_tube_radius(basis, sp_lat.boundary_area);
    spdlog::info("R = {:.17g}, covolume = {:.17g}", geo.radius, geo.base_covolume);
    const auto s = tubespec::assemble_spectrum(basis, geo, tubespec::io::right_boundary_from_string(sp_bc), window[0], window[1], cfg, jobs);
    spdlog::info("{} eigenvalues from {} modes", s.entries.size(), s.modes_used);
    if (!sp_out.empty() && format_of(sp_out) == Format::Csv) {
      std::ostringstream os;
      tubespec::io::write_csv(os, s);
      emit(sp_out, os.str());
    } else {
      emit_json(sp_out, tubespec::io::to_json(s));
    }
  } else if (classify->parsed()) {
    const auto basis = cm_lat.lattice();
    const double R = cm_radius.value_or(tubespec::solve_tube_radius(basis, cm_lat.boundary_area).radius);
    const auto modes = tubespec::enumerate_modes(basis, R, energy_bound);
    json rows = json::array();
    std::ostringstream table, csv;
    table << fmt::format("# R = {:.17g}, {} modes\n", R, modes.size());
    table << fmt::format("{:>6} {:>6} {:>24} {:>24} {:>24} {:>12} {:>24}\n", "m", "n", "lambda1", "lambda2",
                         "value_at_R", "endpoint", "c2");
    csv << "m,n,lambda1,lambda2,value_at_R,endpoint,c2\n";
    for (const auto& mv : modes) {
      const auto ec = tubespec::classify_endpoint(mv.mode);
      const char* tag = tubespec::to_string(ec.kind);
      rows.push_back({{"mode", tubespec::io::to_json(mv.mode)},
                      {"value_at_R", mv.value},
                      {"endpoint", tag},
                      {"c2", ec.c2}});
      table << fmt::format("{:>6} {:>6} {:>24.17g} {:>24.17g} {:>24.17g} {:>12} {:>24.17g}\n", mv.mode.index[0],
                           mv.mode.index[1], mv.mode.lambda.x(), mv.mode.lambda.y(), mv.value, tag, ec.c2);
      csv << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{},{:.17g}\n", mv.mode.index[0], mv.mode.index[1],
                         mv.mode.lambda.x(), mv.mode.lambda.y(), mv.value, tag, ec.c2);
    }
    if (cm_out.empty())
      std::cout << table.str();
    else if (format_of(cm_out) == Format::Csv)
      emit(cm_out, csv.str());
    else
      emit_json(cm_out, {{"radius", R}, {"energy_bound", energy_bound}, {"lattice", tubespec::io::to_json(basis)},
                         {"modes", rows}});
  } else if (cluster->parsed()) {
    auto spec = tubespec::io::family_spec_from_json(LatticeArgs::read_json(family_path));
    if (!cl_bc.empty()) spec.right_bc = tubespec::io::right_boundary_from_string(cl_bc);
    if (app.count("--jobs") > 0) spec.jobs = jobs;
    const auto src = source == "model" ? tubespec::CountingSource::ModelOperator : tubespec::CountingSource::Tube;
    const auto rep = tubespec::run_clustering(spec, x, src);
    spdlog::info("slope vs R {:.6f} (reference {:.6f})", rep.fit_radius.slope, rep.reference_slope_radius);
    if (!cl_out.empty() && format_of(cl_out) == Format::Csv) {
      if (lambda_spec) throw UsageError("--lambda-spec output needs --out *.json");
      std::ostringstream os;
      tubespec::io::write_csv(os, rep);
      emit(cl_out, os.str());
    } else {
      json j = tubespec::io::to_json(rep);
      if (lambda_spec) {
        json table = json::array();
        for (const auto& row : tubespec::small_eigenvalue_table(spec, *lambda_spec, spec.right_bc))
          table.push_back({{"radius", row.radius}, {"covolume", row.covolume}, {"eigenvalues", row.eigenvalues}});
        j["small_eigenvalues"] = {{"threshold", *lambda_spec}, {"members", table}};
      }
      emit_json(cl_out, j);
    }
  } else if (oracle->parsed()) {
    const auto basis = oc_lat.lattice();
    const auto geo = tubespec::solve_tube_radius(basis, oc_lat.boundary_area);
    const auto cmp = tubespec::oracle_compare(basis, geo, tubespec::io::right_boundary_from_string(oc_bc), k, refine, cfg);
    json levels = json::array();
    for (const auto& lv : cmp.levels) {
      json modes = json::array();
      for (const auto& m : lv.mode_of) modes.push_back(tubespec::io::to_json(m));
      levels.push_back({{"dimension", lv.dimension},
                        {"oracle", lv.oracle},
                        {"modes", lv.modes},
                        {"mode_of", modes},
                        {"max_relative_deviation", lv.max_relative_deviation},
                        {"max_residual", lv.max_residual}});
      spdlog::info("dimension {}: max relative deviation {:.3e}", lv.dimension, lv.max_relative_deviation);
    }
    emit_json(oc_out, {{"lattice", tubespec::io::to_json(basis)},
                       {"geometry", tubespec::io::to_json(geo)},
                       {"right_bc", oc_bc},
                       {"max_index", cmp.max_index},
                       {"levels", levels}});
  } else if (slab->parsed()) {
    const auto basis = sl_lat.lattice();
    const auto geo = tubespec::solve_tube_radius(basis, sl_lat.boundary_area);
    const auto gs = tubespec::zero_mode_ground_state(geo.radius, tubespec::RightBoundary::natural(), cfg);
    const auto rep = tubespec::slab_localization(gs.function, geo.radius, rho, c, sl_lambda);
    emit_json(sl_out, {{"radius", geo.radius},
                       {"eigenvalue", gs.eigenvalue},
                       {"rho", rho},
                       {"c", c},
                       {"lambda_spec", sl_lambda},
                       {"r", rep.r},
                       {"slab_mass", rep.slab_mass},
                       {"boundary_mass", rep.boundary_mass},
                       {"slab_bound", rep.slab_bound},
                       {"inner_mass", rep.inner_mass},
                       {"inner_bound", rep.inner_bound},
                       {"candidates", rep.candidates}});
  } else if (radius->parsed()) {
    const auto basis = ra_lat.lattice();
    const auto geo = tubespec::solve_tube_radius(basis, ra_lat.boundary_area);
    const auto shape = tubespec::classify(basis);
    json j = {{"lattice", tubespec::io::to_json(basis)},
              {"geometry", tubespec::io::to_json(geo)},
              {"torus_diameter", tubespec::torus_diameter(basis)}};
    if (const auto* cone = std::get_if<tubespec::ConeTube>(&shape))
      j["shape"] = {{"kind", "cone"}, {"alpha", cone->alpha}, {"twist", cone->twist}, {"length", cone->length}};
    else
      j["shape"] = {{"kind", "irrational"}};
    emit_json(ra_out, j);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
