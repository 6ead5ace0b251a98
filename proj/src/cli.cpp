// Copyright 2026 The lattail Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lattail/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lattail/catalog.hpp"
#include "lattail/error.hpp"
#include "lattail/evolve.hpp"
#include "lattail/io.hpp"
#include "lattail/parallel.hpp"
#include "lattail/polytope.hpp"
#include "lattail/rates.hpp"
#include "lattail/spectra.hpp"
#include "lattail/verify.hpp"

#ifndef LATTAIL_VERSION
#define LATTAIL_VERSION "0.0.0"
#endif

namespace lattail {
namespace {

using json = nlohmann::ordered_json;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LoadedModel {
  LatticeModel model;
  std::optional<CatalogEntry> entry;
};

LoadedModel load_source(const std::string& source) {
  if (source.empty()) throw IoError("no model given (positional argument or config key 'model')");
  if (is_catalog_name(source)) {
    CatalogEntry e = catalog_get(source);
    LatticeModel m = e.model;
    return {std::move(m), std::move(e)};
  }
  return {load_model_file(source), std::nullopt};
}

std::vector<RVector> tensor_grid(const std::vector<std::vector<double>>& axes) {
  std::vector<RVector> pts;
  const int s = static_cast<int>(axes.size());
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  for (std::size_t i = 0; i < total; ++i) {
    RVector p(s);
    std::size_t r = i;
    for (int k = s - 1; k >= 0; --k) {
      p[k] = axes[k][r % axes[k].size()];
      r /= axes[k].size();
    }
    pts.push_back(p);
  }
  return pts;
}

/// Per-axis specs joined by ','; with explicit directions a single spec gives radii along each.
std::vector<RVector> sweep_points(const std::string& spec, const std::vector<std::string>& dirs, int s) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (!dirs.empty()) {
    if (parts.size() != 1) throw IoError("with direction lists the sweep spec must be a single start:stop:count");
    std::vector<double> radii = parse_axis_spec(parts[0]);
    std::vector<RVector> pts;
    for (const auto& d : dirs) {
      std::vector<double> v = parse_vector(d);
      if (static_cast<int>(v.size()) != s) throw IoError("direction '" + d + "' must have " + std::to_string(s) + " components");
      RVector n = Eigen::Map<RVector>(v.data(), s);
      if (!(n.norm() > 0)) throw IoError("direction must be nonzero");
      n.normalize();
      for (double r : radii) pts.push_back(r * n);
    }
    return pts;
  }
  if (static_cast<int>(parts.size()) != s)
    throw IoError("sweep spec needs " + std::to_string(s) + " comma-separated axis specs, got " + std::to_string(parts.size()));
  std::vector<std::vector<double>> axes;
  for (const auto& p : parts) axes.push_back(parse_axis_spec(p));
  return tensor_grid(axes);
}

RVector parse_point(const std::string& text, int s) {
  std::vector<double> v = parse_vector(text);
  if (static_cast<int>(v.size()) != s)
    throw IoError("'" + text + "' must have " + std::to_string(s) + " components");
  return Eigen::Map<RVector>(v.data(), s);
}

std::string join(const RVector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
  return s;
}

void add_vector_columns(SweepResult& sr, const std::string& prefix, const std::vector<RVector>& pts, int s) {
  for (int k = 0; k < s; ++k) {
    std::vector<double> col;
    for (const auto& p : pts) col.push_back(p.size() > k ? p[k] : std::numeric_limits<double>::quiet_NaN());
    sr.add_column(prefix + std::to_string(k + 1), std::move(col));
  }
}

void base_metadata(SweepResult& sr, const LatticeModel& m, const std::string& source) {
  sr.set_meta("tool-version", LATTAIL_VERSION);
  sr.set_meta("model", m.label());
  sr.set_meta("model-source", source);
  sr.set_meta("dynamics", to_string(m.kind()));
  sr.set_meta("dim-lattice", std::to_string(m.dim_lattice()));
  sr.set_meta("dim-cell", std::to_string(m.dim_cell()));
}

TorusSearchOptions torus_options(const RunConfig& c) {
  TorusSearchOptions t;
  t.grid_n = c.torus_grid;
  t.max_points = c.torus_max_points;
  t.xtol = c.xtol;
  return t;
}

LegendreOptions legendre_options(const RunConfig& c) {
  LegendreOptions l;
  l.lambda_max = c.lambda_max;
  l.radii = c.radii;
  l.directions = c.directions;
  l.hull_margin = c.hull_margin;
  l.xtol = c.xtol;
  return l;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text(path, text);
}

void check_range(bool ok, const std::string& what) {
  if (!ok) throw IoError("config: " + what);
}

}  // namespace

void RunConfig::validate() const {
  check_range(region_grid == 0 || (region_grid >= 8 && region_grid <= 1 << 16), "region_grid must be 0 or in [8, 65536]");
  check_range(torus_grid >= 16 && torus_grid <= 4096, "torus_grid must be in [16, 4096]");
  check_range(torus_max_points >= 256 && torus_max_points <= (std::int64_t{1} << 26), "torus_max_points must be in [256, 2^26]");
  check_range(lambda_max > 0 && lambda_max <= 100, "lambda_max must be in (0, 100]");
  check_range(radii >= 4 && radii <= 1000, "radii must be in [4, 1000]");
  check_range(directions >= 4 && directions <= 10000, "directions must be in [4, 10000]");
  check_range(radial_directions >= 1 && radial_directions <= 1000, "radial_directions must be in [1, 1000]");
  check_range(gap_tol > 0 && gap_tol < 1, "gap_tol must be in (0, 1)");
  check_range(regular_gap > 0 && regular_gap < 1, "regular_gap must be in (0, 1)");
  check_range(tie_tol > 0 && tie_tol < 1, "tie_tol must be in (0, 1)");
  check_range(hull_margin >= 0 && hull_margin < 1e-3, "hull_margin must be in [0, 1e-3)");
  check_range(xtol > 0 && xtol < 1e-2, "xtol must be in (0, 1e-2)");
  check_range(threads >= 0 && threads <= 1024, "threads must be in [0, 1024]");
  check_range(margin >= 1 && margin <= 1000, "margin must be in [1, 1000]");
  check_range(memory_budget_mb >= 1 && memory_budget_mb <= (std::int64_t{1} << 24), "memory_budget_mb must be in [1, 2^24]");
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw IoError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw IoError("config: top level must be an object");
  RunConfig c;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    try {
      if (k == "model") c.model = v.get<std::string>();
      else if (k == "region_grid") c.region_grid = v.get<int>();
      else if (k == "torus_grid") c.torus_grid = v.get<int>();
      else if (k == "torus_max_points") c.torus_max_points = v.get<std::int64_t>();
      else if (k == "lambda_max") c.lambda_max = v.get<double>();
      else if (k == "radii") c.radii = v.get<int>();
      else if (k == "directions") c.directions = v.get<int>();
      else if (k == "radial_directions") c.radial_directions = v.get<int>();
      else if (k == "gap_tol") c.gap_tol = v.get<double>();
      else if (k == "regular_gap") c.regular_gap = v.get<double>();
      else if (k == "tie_tol") c.tie_tol = v.get<double>();
      else if (k == "hull_margin") c.hull_margin = v.get<double>();
      else if (k == "xtol") c.xtol = v.get<double>();
      else if (k == "out") c.out = v.get<std::string>();
      else if (k == "threads") c.threads = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "margin") c.margin = v.get<int>();
      else if (k == "memory_budget_mb") c.memory_budget_mb = v.get<std::int64_t>();
      else throw IoError("config: unknown key '" + k + "'");
    } catch (const json::exception&) {
      throw IoError("config: key '" + k + "' has the wrong type");
    }
  }
  c.validate();
  return c;
}

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_number(item));
  if (v.empty()) throw IoError("empty vector '" + text + "'");
  return v;
}

std::vector<double> parse_axis_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 1) return {parse_number(parts[0])};
  if (parts.size() != 3) throw IoError("sweep spec '" + spec + "' must be start:stop:count");
  const double a = parse_number(parts[0]), b = parse_number(parts[1]);
  const double nd = parse_number(parts[2]);
  if (!(nd >= 1) || nd != std::floor(nd) || nd > 1e7) throw IoError("sweep count must be a positive integer");
  const int n = static_cast<int>(nd);
  if (!std::isfinite(a) || !std::isfinite(b)) throw IoError("sweep bounds must be finite");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kExitUsage;
  if (dynamic_cast<const ModelError*>(&e) || dynamic_cast<const GeometryError*>(&e)) return kExitCheckFailed;
  return kExitNumeric;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large-deviation tail bounds for lattice quantum walks and Hamiltonians", "lattail"};
  app.set_version_flag("--version", LATTAIL_VERSION);
  app.require_subcommand(1);
  std::string config_path;
  int threads = 0;
  app.add_option("--config", config_path, "JSON file with run parameters");
  app.add_option("--threads", threads, "worker threads (default: LATTAIL_THREADS or all cores)")
      ->check(CLI::Range(1, 1024));

  std::string model_src;
  std::string out_path, dual_out;
  int grid = 0;
  std::string lambda_spec, x_spec, r_spec, n_spec, region_spec, fit_spec, site_spec, times_spec;
  std::vector<std::string> x_dirs, lambda_dirs, points;
  double ell_max = 0.0, t_max = 0.0, t_span = 0.2, dt = 1.0;
  int ell_count = 40, count = 21, dirs = 0, component = 0;
  bool compare = false, no_simulate = false;
  std::string csv_out;
  std::uint64_t seed = 0;

  auto model_arg = [&](CLI::App* sub) { sub->add_option("model", model_src, "model file or catalog name"); };
  auto out_opt = [&](CLI::App* sub) { return sub->add_option("--out", out_path, "output path ('-' for stdout)"); };

  auto* validate = app.add_subcommand("validate", "load a model and report its invariants");
  model_arg(validate);

  auto* region = app.add_subcommand("region", "sample group velocities on a momentum grid");
  model_arg(region);
  region->add_option("--grid", grid, "momentum grid per axis")->check(CLI::Range(8, 1 << 16));
  out_opt(region);

  auto* rate = app.add_subcommand("rate", "dual rate and rate function sweeps");
  model_arg(rate);
  rate->add_option("--x-spec", x_spec, "x sweep: start:stop:count per axis, comma separated")->required();
  rate->add_option("--x-dir", x_dirs, "direction for a radial x sweep (repeatable)");
  rate->add_option("--lambda-spec", lambda_spec, "tabulate R on this lambda sweep and transform the table");
  rate->add_option("--lambda-dir", lambda_dirs, "direction for a radial lambda sweep (repeatable)");
  rate->add_option("--dual-out", dual_out, "CSV for the dual-rate table");
  out_opt(rate);

  auto* radial = app.add_subcommand("radial-rate", "radial dual rate and radial rate function");
  model_arg(radial);
  radial->add_option("--ell-max", ell_max, "largest |lambda|")->required()->check(CLI::PositiveNumber);
  radial->add_option("--ell-count", ell_count, "number of ell points")->check(CLI::Range(2, 100000));
  radial->add_option("--r-spec", r_spec, "r sweep start:stop:count")->required();
  radial->add_option("--directions", dirs, "direction samples per ell")->check(CLI::Range(1, 1000));
  radial->add_option("--dual-out", dual_out, "CSV for the radial dual table");
  out_opt(radial);

  auto* boundary = app.add_subcommand("boundary", "boundary expansion along a direction");
  model_arg(boundary);
  boundary->add_option("--n", n_spec, "direction v1,...,vs")->required();
  boundary->add_option("--t-span", t_span, "largest distance beyond the boundary in the table")->check(CLI::PositiveNumber);
  boundary->add_option("--count", count, "table rows")->check(CLI::Range(2, 100000));
  boundary->add_flag("--compare", compare, "add the numeric rate function to the table");
  out_opt(boundary);

  auto* bounds = app.add_subcommand("bounds", "gauge, hull membership and Lieb-Robinson bounds");
  model_arg(bounds);
  bounds->add_option("--x", points, "point v1,...,vs (repeatable)")->required();
  out_opt(bounds);

  auto* simulate = app.add_subcommand("simulate", "evolve a localized state and record tail probabilities");
  model_arg(simulate);
  simulate->add_option("--t-max", t_max, "final time")->required()->check(CLI::NonNegativeNumber);
  simulate->add_option("--region", region_spec, "\"half n1,..,ns c\" or \"ball r\"")->required();
  simulate->add_option("--dt", dt, "output time step (Hamiltonians)")->check(CLI::PositiveNumber);
  simulate->add_option("--times", times_spec, "explicit output times t1,t2,...");
  simulate->add_option("--site", site_spec, "initial site x1,...,xs (default origin)");
  simulate->add_option("--component", component, "initial internal basis state")->check(CLI::NonNegativeNumber);
  simulate->add_option("--fit", fit_spec, "fit window t_lo:t_hi for the empirical rate");
  out_opt(simulate);

  auto* verify = app.add_subcommand("verify", "run the invariant battery; exit 0 iff all checks pass");
  model_arg(verify);
  verify->add_option("--csv", csv_out, "also write the report as CSV");
  verify->add_flag("--no-simulate", no_simulate, "skip simulation checks");
  verify->add_option("--seed", seed, "seed for random test points");
  out_opt(verify);

  auto* catalog = app.add_subcommand("catalog", "built-in reference models");
  catalog->require_subcommand(1);
  auto* cat_list = catalog->add_subcommand("list", "list catalog names");
  auto* cat_emit = catalog->add_subcommand("emit", "write a catalog model as JSON");
  std::string emit_name;
  cat_emit->add_option("name", emit_name, "catalog name")->required();
  cat_emit->add_option("--out", out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = parse_run_config(read_text(config_path));
    if (threads > 0) cfg.threads = threads;
    if (!model_src.empty()) cfg.model = model_src;
    if (!out_path.empty()) cfg.out = out_path;
    if (grid > 0) cfg.region_grid = grid;
    if (dirs > 0) cfg.radial_directions = dirs;
    if (seed > 0) cfg.seed = seed;
    cfg.validate();
    if (cfg.threads > 0) set_thread_count(cfg.threads);

    if (*catalog) {
      if (*cat_list) {
        for (const auto& name : catalog_names()) out << name << '\t' << catalog_get(name).provenance << '\n';
      } else {
        emit(cfg.out, model_to_document(catalog_get(emit_name).model) + "\n", out);
      }
      return kExitOk;
    }

    LoadedModel lm = load_source(cfg.model);
    const LatticeModel& m = lm.model;
    const int s = m.dim_lattice();

    if (*validate) {
      json doc;
      doc["label"] = m.label();
      doc["kind"] = to_string(m.kind());
      doc["dim_lattice"] = s;
      doc["dim_cell"] = m.dim_cell();
      doc["jumps"] = m.jumps().size();
      doc["max_jump_length"] = m.max_jump_length();
      doc["coefficient_norm_sum"] = m.coefficient_norm_sum();
      if (m.is_walk())
        doc["unitarity_defect"] = m.validation().unitarity_defect;
      else
        doc["hermiticity_defect"] = m.validation().hermiticity_defect;
      doc["grid_points"] = m.validation().grid_points;
      doc["valid"] = true;
      out << doc.dump(2) << '\n';
      return kExitOk;
    }

    if (*region) {
      const int n = cfg.region_grid > 0 ? cfg.region_grid : (s == 1 ? 1024 : 64);
      RegionOptions ro;
      ro.gap_tol = cfg.gap_tol;
      PropagationRegion pr = propagation_region(m, n, ro);
      SweepResult sr;
      sr.kind = SweepKind::Region;
      base_metadata(sr, m, cfg.model);
      sr.set_meta("grid", std::to_string(n));
      sr.set_meta("gap-tol", format_number(cfg.gap_tol));
      sr.set_meta("max-speed", format_number(pr.max_speed));
      sr.set_meta("grid-points", std::to_string(pr.grid_points));
      sr.set_meta("degenerate-points", std::to_string(pr.degenerate_points));
      sr.set_meta("refined-samples", std::to_string(pr.refined_samples));
      std::vector<RVector> ps, vs;
      std::vector<double> br, om, w;
      for (const auto& v : pr.samples) {
        ps.push_back(v.p);
        vs.push_back(v.velocity);
        br.push_back(v.branch);
        om.push_back(v.omega);
        w.push_back(v.weight);
      }
      add_vector_columns(sr, "p_", ps, s);
      sr.add_column("branch", br);
      sr.add_column("omega", om);
      add_vector_columns(sr, "v_", vs, s);
      sr.add_column("weight", w);
      emit(cfg.out, to_csv(sr), out);
      return kExitOk;
    }

    if (*rate) {
      const TorusSearchOptions topt = torus_options(cfg);
      const LegendreOptions lopt = legendre_options(cfg);
      std::vector<RVector> xs = sweep_points(x_spec, x_dirs, s);
      RateFunction rf;
      std::optional<DualRate> table;
      if (!lambda_spec.empty()) {
        table = dual_rate(m, sweep_points(lambda_spec, lambda_dirs, s), topt.grid_n, topt);
        for (std::size_t i = 0; i < table->errors.size(); ++i)
          if (!table->errors[i].empty()) err << "warning: lambda point " << i << ": " << table->errors[i] << '\n';
        rf = legendre(*table, xs, m, lopt);
      } else {
        rf = legendre(dual_rate_function(m, topt), xs, m, lopt);
      }
      SweepResult sr;
      sr.kind = SweepKind::Rate;
      base_metadata(sr, m, cfg.model);
      sr.set_meta("x-spec", x_spec);
      sr.set_meta("lambda-spec", lambda_spec.empty() ? "continuous" : lambda_spec);
      sr.set_meta("torus-grid", std::to_string(topt.grid_n));
      sr.set_meta("lambda-max", format_number(lopt.lambda_max));
      sr.set_meta("radii", std::to_string(lopt.radii));
      sr.set_meta("directions", std::to_string(lopt.directions));
      sr.set_meta("hull-margin", format_number(lopt.hull_margin));
      add_vector_columns(sr, "x_", xs, s);
      sr.add_column("I", rf.values);
      add_vector_columns(sr, "lambda_", rf.maximizer_lambda, s);
      std::vector<double> unb(rf.unbounded.begin(), rf.unbounded.end());
      sr.add_column("unbounded", unb);
      emit(cfg.out, to_csv(sr), out);
      if (!dual_out.empty()) {
        DualRate dr = table ? *table : dual_rate(m, xs.empty() ? std::vector<RVector>{} : rf.maximizer_lambda, topt.grid_n, topt);
        SweepResult d;
        d.kind = SweepKind::DualRate;
        base_metadata(d, m, cfg.model);
        d.set_meta("torus-grid", std::to_string(topt.grid_n));
        d.set_meta("lambda-spec", lambda_spec.empty() ? "maximizers" : lambda_spec);
        add_vector_columns(d, "lambda_", dr.lambda_points, s);
        d.add_column("R", dr.values);
        add_vector_columns(d, "p_", dr.maximizer_p, s);
        std::vector<double> ref(dr.refined.begin(), dr.refined.end());
        d.add_column("refined", ref);
        write_csv(d, dual_out);
      }
      return kExitOk;
    }

    if (*radial) {
      std::vector<double> ells(ell_count);
      for (int i = 0; i < ell_count; ++i) ells[i] = ell_max * (i + 1) / ell_count;
      RadialRate rd = radial_dual(m, ells, cfg.radial_directions);
      std::vector<double> rs = parse_axis_spec(r_spec);
      RadialRate rr = radial_rate(rd, rs);
      SweepResult sr;
      sr.kind = SweepKind::RadialRate;
      base_metadata(sr, m, cfg.model);
      sr.set_meta("ell-max", format_number(ell_max));
      sr.set_meta("ell-count", std::to_string(ell_count));
      sr.set_meta("directions", std::to_string(cfg.radial_directions));
      sr.set_meta("r-spec", r_spec);
      sr.set_meta("hull-radius", format_number(rd.hull_radius));
      sr.add_column("r", rr.r_points);
      sr.add_column("I_radial", rr.rate_values);
      emit(cfg.out, to_csv(sr), out);
      if (!dual_out.empty()) {
        SweepResult d;
        d.kind = SweepKind::RadialRate;
        base_metadata(d, m, cfg.model);
        d.set_meta("ell-max", format_number(ell_max));
        d.set_meta("directions", std::to_string(cfg.radial_directions));
        d.add_column("ell", rd.ell_points);
        d.add_column("R_radial", rd.dual_values);
        add_vector_columns(d, "lambda_", rd.maximizer_lambda, s);
        write_csv(d, dual_out);
      }
      return kExitOk;
    }

    if (*boundary) {
      BoundaryOptions bo;
      bo.gap_tol = cfg.gap_tol;
      bo.tie_tol = cfg.tie_tol;
      bo.regular_gap = cfg.regular_gap;
      bo.grid_n = cfg.torus_grid;
      bo.max_points = cfg.torus_max_points;
      RVector n = parse_point(n_spec, s);
      BoundaryExpansion be = boundary_expansion(m, n, bo);
      RVector nu = be.n;
      std::vector<double> ts;
      std::vector<RVector> xs;
      std::vector<double> bound;
      for (int i = 0; i < count; ++i) {
        double t = t_span * i / (count - 1);
        ts.push_back(t);
        xs.push_back(be.x_star + t * nu);
        bound.push_back(boundary_rate_bound(be, xs.back()));
      }
      json doc;
      doc["n"] = std::vector<double>(nu.data(), nu.data() + s);
      doc["x_star"] = std::vector<double>(be.x_star.data(), be.x_star.data() + s);
      doc["a"] = be.a;
      doc["b"] = be.b;
      doc["cubic"] = be.cubic();
      doc["constant"] = be.constant();
      doc["flat"] = be.flat();
      doc["branch"] = be.branch;
      doc["p"] = std::vector<double>(be.p.data(), be.p.data() + s);
      doc["ties"] = be.ties;
      SweepResult sr;
      sr.kind = SweepKind::Rate;
      base_metadata(sr, m, cfg.model);
      sr.set_meta("n", join(nu));
      sr.set_meta("a", format_number(be.a));
      sr.set_meta("b", format_number(be.b));
      sr.set_meta("constant", format_number(be.constant()));
      sr.add_column("t", ts);
      add_vector_columns(sr, "x_", xs, s);
      sr.add_column("I_boundary", bound);
      if (compare) {
        RateFunction rf = legendre(dual_rate_function(m, torus_options(cfg)), xs, m, legendre_options(cfg));
        sr.add_column("I", rf.values);
      }
      if (cfg.out.empty() || cfg.out == "-") {
        out << doc.dump(2) << '\n' << to_csv(sr);
      } else {
        out << doc.dump(2) << '\n';
        write_csv(sr, cfg.out);
      }
      return kExitOk;
    }

    if (*bounds) {
      Polytope hull = jump_hull(m);
      Polytope aug = augmented_jump_hull(m);
      json arr = json::array();
      for (const auto& text : points) {
        RVector x = parse_point(text, s);
        json e;
        e["x"] = std::vector<double>(x.data(), x.data() + s);
        e["in_conv_F"] = hull.contains(x);
        e["hull_distance"] = hull.distance(x);
        try {
          e["gauge"] = gauge(aug, x);
        } catch (const GeometryError& ge) {
          e["gauge"] = nullptr;
          e["gauge_error"] = ge.what();
        }
        if (m.is_walk()) {
          e["rate_infinite"] = hull.distance(x) > cfg.hull_margin;
        } else {
          e["lieb_robinson_bound"] = lieb_robinson_bound(m, x);
          e["within_lieb_robinson_region"] = within_lieb_robinson_region(m, x);
        }
        arr.push_back(e);
      }
      emit(cfg.out, arr.dump(2) + "\n", out);
      return kExitOk;
    }

    if (*simulate) {
      TailRegion reg;
      try {
        reg = TailRegion::parse(region_spec, s);
      } catch (const ModelError& e) {
        throw IoError(std::string("--region: ") + e.what());
      }
      EvolveOptions eo;
      eo.t_max = t_max;
      eo.dt = dt;
      eo.margin = cfg.margin;
      eo.memory_budget = static_cast<std::size_t>(cfg.memory_budget_mb) << 20;
      if (!times_spec.empty()) eo.times = parse_vector(times_spec);
      if (component >= m.dim_cell()) throw IoError("--component must be below the cell dimension");
      CVector v = CVector::Zero(m.dim_cell());
      v[component] = 1.0;
      Site x0(s, 0);
      if (!site_spec.empty()) {
        RVector p = parse_point(site_spec, s);
        for (int k = 0; k < s; ++k) {
          if (p[k] != std::round(p[k])) throw IoError("--site needs integer coordinates");
          x0[k] = static_cast<int>(p[k]);
        }
      }
      EvolutionRecord rec = evolve(m, InitialState::localized(x0, v), eo);
      TailSeries ts = tail_probability(rec, reg);
      SweepResult sr;
      sr.kind = SweepKind::Tail;
      base_metadata(sr, m, cfg.model);
      sr.set_meta("region", reg.describe());
      sr.set_meta("t-max", format_number(t_max));
      sr.set_meta("initial-site", join(Eigen::Map<const Eigen::VectorXi>(x0.data(), s).cast<double>()));
      sr.set_meta("initial-component", std::to_string(component));
      std::string box;
      for (int k = 0; k < s; ++k) box += (k ? "," : "") + std::to_string(rec.box.lo[k]) + ":" + std::to_string(rec.box.hi[k]);
      sr.set_meta("box", box);
      sr.set_meta("wraparound-safe", rec.wraparound_safe ? "true" : "false");
      sr.set_meta("boundary-mass", format_number(rec.boundary_mass));
      sr.set_meta("precision-floor", format_number(rec.precision_floor));
      if (!fit_spec.empty()) {
        std::vector<double> w = parse_axis_spec(fit_spec + (fit_spec.find(':') != std::string::npos ? ":2" : ""));
        if (w.size() != 2) throw IoError("--fit must be t_lo:t_hi");
        RateFit f = empirical_rate(ts, w[0], w[1]);
        sr.set_meta("fit-window", format_number(w[0]) + ":" + format_number(w[1]));
        sr.set_meta("fit-rate", format_number(f.rate));
        sr.set_meta("fit-intercept", format_number(f.intercept));
        sr.set_meta("fit-points", std::to_string(f.points));
      }
      sr.add_column("t", ts.times);
      sr.add_column("p_tail", ts.probabilities);
      sr.add_column("empirical_rate", ts.empirical_rates);
      std::vector<double> bp(ts.below_precision.begin(), ts.below_precision.end());
      sr.add_column("below_precision", bp);
      if (!rec.wraparound_safe) err << "warning: mass reached the box boundary (" << rec.boundary_mass << ")\n";
      emit(cfg.out, to_csv(sr), out);
      return kExitOk;
    }

    if (*verify) {
      VerifyOptions vo;
      vo.seed = cfg.seed;
      vo.gap_tol = cfg.gap_tol;
      vo.region_grid = cfg.region_grid;
      vo.simulate = !no_simulate;
      vo.memory_budget = static_cast<std::size_t>(cfg.memory_budget_mb) << 20;
      vo.legendre = legendre_options(cfg);
      std::vector<CheckResult> checks = run_verification(m, lm.entry ? &*lm.entry : nullptr, vo);
      std::vector<std::pair<std::string, std::string>> meta = {
          {"tool-version", LATTAIL_VERSION}, {"model", m.label()}, {"model-source", cfg.model},
          {"seed", std::to_string(cfg.seed)}};
      emit(cfg.out, report_to_json(checks, meta), out);
      if (!csv_out.empty()) {
        SweepResult sr = report_to_sweep(checks);
        for (const auto& [k, v] : meta) sr.set_meta(k, v);
        write_csv(sr, csv_out);
      }
      bool all = std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
      return all ? kExitOk : kExitCheckFailed;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace lattail
