// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 the tubespec authors

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tubespec/deformation_scan.hpp"
#include "tubespec/errors.hpp"
#include "tubespec/lattice_geometry.hpp"
#include "tubespec/sturm_solver.hpp"
#include "tubespec/tube_spectrum.hpp"

namespace tubespec::io {

using json = nlohmann::json;

/// Decimal with 17 significant digits; reads back to the same double.
inline std::string number(double v) { return fmt::format("{:.17g}", v); }

namespace detail {

inline json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

inline Vec2 vec(const json& j) {
  if (!j.is_array() || j.size() != 2) throw BadConfig("expected a pair of numbers, got " + j.dump());
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw BadConfig(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw BadConfig(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? field<T>(j, key) : fallback;
}

}  // namespace detail

inline json to_json(const LatticeBasis& b) { return {{"basis", json::array({detail::vec(b.v1()), detail::vec(b.v2())})}}; }

/// Accepts {"basis": [[a, b], [c, d]]} or {"cone": {"alpha", "twist", "length"}}.
inline LatticeBasis lattice_from_json(const json& j) {
  if (j.contains("cone")) {
    const json& c = j.at("cone");
    return LatticeBasis::cone(detail::field<double>(c, "alpha"), detail::field_or<double>(c, "twist", 0.0),
                              detail::field<double>(c, "length"));
  }
  if (j.contains("basis")) {
    const json& b = j.at("basis");
    if (!b.is_array() || b.size() != 2) throw BadConfig("basis needs two vectors");
    return LatticeBasis(detail::vec(b.at(0)), detail::vec(b.at(1)));
  }
  throw BadConfig("lattice needs a 'basis' or a 'cone' entry");
}

inline json to_json(const TubeGeometry& g) {
  return {{"radius", g.radius}, {"boundary_area", g.boundary_area}, {"base_covolume", g.base_covolume}};
}

inline TubeGeometry geometry_from_json(const json& j) {
  return {detail::field<double>(j, "radius"), detail::field<double>(j, "boundary_area"),
          detail::field<double>(j, "base_covolume")};
}

inline json to_json(const RightBoundary& bc) { return {{"kind", to_string(bc.kind)}, {"kappa", bc.kappa}}; }

/// "dirichlet", "natural", or "robin:<kappa>".
inline RightBoundary right_boundary_from_string(const std::string& s) {
  if (s == "dirichlet") return RightBoundary::dirichlet();
  if (s == "natural" || s == "neumann") return RightBoundary::natural();
  if (s.rfind("robin:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double kappa = std::stod(s.substr(6), &used);
      if (used == s.size() - 6) return RightBoundary::robin(kappa);
    } catch (const std::exception&) {
    }
  }
  throw BadConfig("unknown boundary condition '" + s + "' (dirichlet, natural, robin:<kappa>)");
}

inline RightBoundary right_boundary_from_json(const json& j) {
  if (j.is_string()) return right_boundary_from_string(j.get<std::string>());
  const auto kind = detail::field<std::string>(j, "kind");
  if (kind == "robin") return RightBoundary::robin(detail::field<double>(j, "kappa"));
  return right_boundary_from_string(kind);
}

inline json to_json(const DualMode& m) { return {{"index", m.index}, {"lambda", detail::vec(m.lambda)}}; }

inline DualMode mode_from_json(const json& j) {
  DualMode m;
  m.index = detail::field<std::array<std::int64_t, 2>>(j, "index");
  m.lambda = detail::vec(j.at("lambda"));
  return m;
}

inline json to_json(const TubeSpectrum& s) {
  json entries = json::array();
  for (const SpectrumEntry& e : s.entries)
    entries.push_back({{"eigenvalue", e.eigenvalue}, {"mode", to_json(e.mode)}, {"error_estimate", e.error_estimate}});
  json out = to_json(s.basis);
  out["geometry"] = to_json(s.geometry);
  out["right_bc"] = to_json(s.right_bc);
  out["window"] = {s.window_a, s.window_b};
  out["truncation_bound"] = s.truncation_bound;
  out["modes_used"] = s.modes_used;
  out["entries"] = std::move(entries);
  return out;
}

inline TubeSpectrum spectrum_from_json(const json& j) {
  const auto window = detail::field<std::array<double, 2>>(j, "window");
  TubeSpectrum s{lattice_from_json(j),
                 geometry_from_json(j.at("geometry")),
                 right_boundary_from_json(j.at("right_bc")),
                 window[0],
                 window[1],
                 detail::field<double>(j, "truncation_bound"),
                 detail::field<std::size_t>(j, "modes_used"),
                 {}};
  for (const json& e : j.at("entries"))
    s.entries.push_back({detail::field<double>(e, "eigenvalue"), mode_from_json(e.at("mode")),
                         detail::field<double>(e, "error_estimate")});
  return s;
}

inline json to_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_error", f.slope_error}, {"residuals", f.residuals}};
}

inline LinearFit fit_from_json(const json& j) {
  return {detail::field<double>(j, "slope"), detail::field<double>(j, "intercept"),
          detail::field_or(j, "slope_error", 0.0), detail::field<std::vector<double>>(j, "residuals")};
}

inline json to_json(const CountingReport& r) {
  json rows = json::array();
  for (const CountingRow& row : r.rows)
    rows.push_back({{"radius", row.radius},
                    {"covolume", row.covolume},
                    {"boundary_area", row.boundary_area},
                    {"count", row.count},
                    {"count_tolerant", row.count_tolerant},
                    {"reference", row.reference}});
  json out = {{"x", r.x},
              {"window", {r.window_a, r.window_b}},
              {"right_bc", r.right_bc},
              {"source", r.source},
              {"rows", std::move(rows)},
              {"fit_radius", to_json(r.fit_radius)},
              {"reference_slope_radius", r.reference_slope_radius},
              {"law_residuals", r.law_residuals}};
  if (r.fit_log_area) {
    out["fit_log_area"] = to_json(*r.fit_log_area);
    out["reference_slope_log_area"] = r.reference_slope_log_area;
  }
  return out;
}

inline CountingReport counting_report_from_json(const json& j) {
  CountingReport r;
  r.x = detail::field<double>(j, "x");
  const auto window = detail::field<std::array<double, 2>>(j, "window");
  r.window_a = window[0];
  r.window_b = window[1];
  r.right_bc = detail::field<std::string>(j, "right_bc");
  r.source = detail::field<std::string>(j, "source");
  for (const json& row : j.at("rows"))
    r.rows.push_back({detail::field<double>(row, "radius"), detail::field<double>(row, "covolume"),
                      detail::field<double>(row, "boundary_area"), detail::field<int>(row, "count"),
                      detail::field<int>(row, "count_tolerant"), detail::field<double>(row, "reference")});
  r.fit_radius = fit_from_json(j.at("fit_radius"));
  r.reference_slope_radius = detail::field<double>(j, "reference_slope_radius");
  r.law_residuals = detail::field<std::vector<double>>(j, "law_residuals");
  if (j.contains("fit_log_area")) {
    r.fit_log_area = fit_from_json(j.at("fit_log_area"));
    r.reference_slope_log_area = detail::field<double>(j, "reference_slope_log_area");
  }
  return r;
}

inline SolverConfig solver_config_from_json(const json& j) {
  SolverConfig c;
  c.n = detail::field_or(j, "n", c.n);
  c.gamma = detail::field_or(j, "gamma", c.gamma);
  c.tol_eig = detail::field_or(j, "tol_eig", c.tol_eig);
  c.max_refinements = detail::field_or(j, "max_refinements", c.max_refinements);
  c.mass_blend = detail::field_or(j, "mass_blend", c.mass_blend);
  c.validate();
  return c;
}

inline json to_json(const SolverConfig& c) {
  return {{"n", c.n}, {"gamma", c.gamma}, {"tol_eig", c.tol_eig}, {"max_refinements", c.max_refinements},
          {"mass_blend", c.mass_blend}};
}

/// Family configuration. "family" holds the kind and its parameters:
///   {"kind": "smooth_filling", "lengths": [...], "twist": t}
///   {"kind": "cone", "alphas": [...], "law": "fixed_area" | "fixed_length", "value": v, "twist": t}
///   {"kind": "irrational", "basis": [[a, b], [c, d]], "shrink": [...]}
inline FamilySpec family_spec_from_json(const json& j) {
  FamilySpec spec;
  const json& fam = j.at("family");
  const auto kind = detail::field<std::string>(fam, "kind");
  if (kind == "smooth_filling") {
    spec.kind = SmoothFilling{detail::field<std::vector<double>>(fam, "lengths"),
                              detail::field_or(fam, "twist", golden_twist)};
  } else if (kind == "cone") {
    ConeFamily c;
    c.alphas = detail::field<std::vector<double>>(fam, "alphas");
    const auto law = detail::field_or<std::string>(fam, "law", "fixed_area");
    if (law == "fixed_area")
      c.law = LengthLaw::FixedArea;
    else if (law == "fixed_length")
      c.law = LengthLaw::FixedLength;
    else
      throw BadConfig("unknown length law '" + law + "'");
    c.value = detail::field<double>(fam, "value");
    c.twist = detail::field_or(fam, "twist", 0.0);
    spec.kind = c;
  } else if (kind == "irrational") {
    IrrationalFamily f;
    if (fam.contains("basis")) f.base = lattice_from_json(fam);
    f.shrink = detail::field<std::vector<double>>(fam, "shrink");
    spec.kind = f;
  } else {
    throw BadConfig("unknown family kind '" + kind + "'");
  }
  spec.boundary_area = detail::field_or(j, "boundary_area", 1.0);
  if (j.contains("right_bc")) spec.right_bc = right_boundary_from_json(j.at("right_bc"));
  if (j.contains("solver")) spec.solver = solver_config_from_json(j.at("solver"));
  spec.jobs = detail::field_or(j, "jobs", 1);
  return spec;
}

inline json to_json(const FamilySpec& spec) {
  json fam;
  if (const auto* s = std::get_if<SmoothFilling>(&spec.kind)) {
    fam = {{"kind", "smooth_filling"}, {"lengths", s->lengths}, {"twist", s->twist}};
  } else if (const auto* c = std::get_if<ConeFamily>(&spec.kind)) {
    fam = {{"kind", "cone"},
           {"alphas", c->alphas},
           {"law", c->law == LengthLaw::FixedArea ? "fixed_area" : "fixed_length"},
           {"value", c->value},
           {"twist", c->twist}};
  } else {
    const auto& f = std::get<IrrationalFamily>(spec.kind);
    fam = to_json(f.base);
    fam["kind"] = "irrational";
    fam["shrink"] = f.shrink;
  }
  return {{"family", fam},
          {"boundary_area", spec.boundary_area},
          {"right_bc", to_json(spec.right_bc)},
          {"solver", to_json(spec.solver)},
          {"jobs", spec.jobs}};
}

inline void write_csv(std::ostream& os, const CountingReport& r) {
  os << "R,covol,N,x_over_pi_R,N_tolerant\n";
  for (const CountingRow& row : r.rows)
    os << number(row.radius) << ',' << number(row.covolume) << ',' << row.count << ',' << number(row.reference) << ','
       << row.count_tolerant << '\n';
}

inline void write_csv(std::ostream& os, const TubeSpectrum& s) {
  os << "eigenvalue,m,n,lambda1,lambda2,error_estimate\n";
  for (const SpectrumEntry& e : s.entries)
    os << number(e.eigenvalue) << ',' << e.mode.index[0] << ',' << e.mode.index[1] << ','
       << number(e.mode.lambda.x()) << ',' << number(e.mode.lambda.y()) << ',' << number(e.error_estimate) << '\n';
}

}  // namespace tubespec::io
