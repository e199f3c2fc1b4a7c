// foliation: batch front-end for surface classification, leaf tracing,
// operator studies, curvature sweeps, leaf diffusions and boundary reports.
// Exit codes: 0 success, 1 config/usage error, 2 degenerate-only
// classification, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "foliation/diffusion.hpp"
#include "foliation/expr.hpp"
#include "foliation/leaf.hpp"
#include "foliation/models.hpp"
#include "foliation/operators.hpp"
#include "foliation/util.hpp"

namespace {

using foliation::ChartPoint;
using foliation::NamedSurface;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Surfaces are registered with hyphenated names, process kinds with
// underscores; accept either spelling from users.
std::string to_hyphen(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

std::string to_underscore(std::string s) {
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j;
  try {
    j = json::parse(foliation::read_file(path));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  require_keys(j,
               {"surface", "trace", "ops", "curvature", "sim", "boundary", "output_dir",
                "master_seed"},
               "config");
  return j;
}

foliation::VectorField expr_vector_field(const std::string& label,
                                         const std::vector<foliation::Expr>& comps) {
  return foliation::vector_field(label, [comps](const auto& seeds, int dim) {
    using S = decltype(seeds[0].v);
    foliation::JetVec<S> out{};
    for (int k = 0; k < dim; ++k)
      out[k] = k < static_cast<int>(comps.size()) ? comps[k].eval(seeds, dim)
                                                  : foliation::jet_const(S(0.0), dim);
    return out;
  });
}

std::vector<foliation::Expr> parse_component_list(const json& arr, int dim,
                                                  const std::string& where) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
    throw ConfigError(where + " must be an array of " + std::to_string(dim) +
                      " expressions");
  std::vector<foliation::Expr> out;
  for (const auto& item : arr) {
    if (!item.is_string()) throw ConfigError(where + " entries must be strings");
    try {
      out.push_back(foliation::Expr::parse(item.get<std::string>()));
    } catch (const foliation::ExprError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return out;
}

// Effective surface from config + flag overrides. Custom surfaces have no
// sampler, no closed form and no expected characteristic points.
struct SurfaceChoice {
  NamedSurface surface;
  bool is_custom = false;
};

SurfaceChoice make_surface_choice(const json& cfg_surface, std::string flag_name,
                                  const std::map<std::string, double>& flag_params) {
  json sec = cfg_surface.is_null() ? json::object() : cfg_surface;
  require_keys(sec, {"name", "params", "space", "k", "u", "chart", "x1", "x2", "x0"},
               "surface");

  std::string name = flag_name;
  if (name.empty() && sec.contains("name")) name = sec["name"].get<std::string>();

  std::map<std::string, double> params;
  if (sec.contains("params")) {
    require_keys(sec["params"], {"a", "c", "k", "kappa"}, "surface.params");
    for (const auto& [key, val] : sec["params"].items()) params[key] = val.get<double>();
  }
  for (const auto& [key, val] : flag_params) params[key] = val;

  if (!name.empty()) {
    auto named = foliation::make_surface(to_hyphen(name), params);
    if (!named) throw ConfigError("unknown surface '" + name + "'");
    return {std::move(*named), false};
  }

  if (sec.contains("u") && sec.contains("space")) {
    const double k = sec.contains("k") ? sec["k"].get<double>() : 1.0;
    auto space = foliation::make_model(to_underscore(sec["space"].get<std::string>()), k);
    if (!space) throw ConfigError("unknown model space in surface.space");
    foliation::Expr u = [&] {
      try {
        return foliation::Expr::parse(sec["u"].get<std::string>());
      } catch (const foliation::ExprError& e) {
        throw ConfigError(std::string("surface.u: ") + e.what());
      }
    }();
    NamedSurface out;
    out.name = "custom";
    out.space = *space;
    out.spec = {"custom", space->structure.chart, u.field()};
    return {std::move(out), true};
  }

  if (sec.contains("u") && sec.contains("chart")) {
    const auto chart = foliation::chart_from_name(to_underscore(sec["chart"].get<std::string>()));
    if (!chart) throw ConfigError("unknown chart in surface.chart");
    const int dim = foliation::chart_dim(*chart);
    for (const char* need : {"x1", "x2", "x0"})
      if (!sec.contains(need))
        throw ConfigError("custom frame needs surface.x1, surface.x2 and surface.x0");
    foliation::ContactStructure cs;
    cs.chart = *chart;
    cs.X1 = expr_vector_field("X1", parse_component_list(sec["x1"], dim, "surface.x1"));
    cs.X2 = expr_vector_field("X2", parse_component_list(sec["x2"], dim, "surface.x2"));
    cs.X0 = expr_vector_field("X0", parse_component_list(sec["x0"], dim, "surface.x0"));
    foliation::Expr u = [&] {
      try {
        return foliation::Expr::parse(sec["u"].get<std::string>());
      } catch (const foliation::ExprError& e) {
        throw ConfigError(std::string("surface.u: ") + e.what());
      }
    }();
    NamedSurface out;
    out.name = "custom";
    out.space = foliation::ModelSpace{"custom", 0.0, 0.0, cs};
    out.spec = {"custom", *chart, u.field()};
    return {std::move(out), true};
  }

  throw ConfigError("no surface selected: pass --surface or a surface config section");
}

ChartPoint point_from_array(const json& arr, foliation::ChartId chart) {
  const int dim = foliation::chart_dim(chart);
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
    throw ConfigError("point must be an array of " + std::to_string(dim) + " numbers");
  std::array<double, foliation::kMaxDim> x{};
  for (int i = 0; i < dim; ++i) x[i] = arr[i].get<double>();
  auto p = foliation::project_to_chart(chart, x);
  if (!p) throw ConfigError("point does not satisfy the chart constraint");
  return *p;
}

ChartPoint parse_point_flag(const std::string& text, foliation::ChartId chart) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string cell =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      vals.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse coordinate '" + cell + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  json arr = vals;
  return point_from_array(arr, chart);
}

// Start point for a named leaf of the graph surfaces over the xy plane.
ChartPoint axis_start(const NamedSurface& S, const std::string& leaf, double r0) {
  if (S.space.structure.chart != foliation::ChartId::Heisenberg)
    throw ConfigError("--leaf axis names apply to the flat-chart surfaces; pass --start");
  const double a = S.params.count("a") ? S.params.at("a") : 1.0;
  std::array<double, foliation::kMaxDim> x{};
  if (leaf == "x-axis") {
    x = {r0, 0.0, S.name == "paraboloid" ? a * r0 * r0 : 0.0, 0.0};
  } else if (leaf == "y-axis") {
    x = {0.0, r0, S.name == "paraboloid" ? a * r0 * r0 : 0.0, 0.0};
  } else {
    throw ConfigError("unknown --leaf '" + leaf + "' (use x-axis or y-axis)");
  }
  return foliation::make_chart_point(foliation::ChartId::Heisenberg, x);
}

ChartPoint nearest_char_point(const NamedSurface& S, const ChartPoint& p) {
  std::vector<ChartPoint> candidates = S.expected_characteristic_points;
  if (candidates.empty()) {
    candidates = foliation::find_characteristic_points(S.space.structure, S.spec).points;
    if (candidates.empty())
      throw std::runtime_error("no characteristic point found for this surface");
  }
  double best = std::numeric_limits<double>::infinity();
  ChartPoint out = candidates.front();
  for (const auto& c : candidates) {
    const double d = foliation::dist(c, p);
    if (d < best) {
      best = d;
      out = c;
    }
  }
  return out;
}

// Trace from start toward the nearest characteristic point.
foliation::LeafTrace trace_toward(const NamedSurface& S, const ChartPoint& start,
                                  const ChartPoint& target, double max_length) {
  const auto hatx = foliation::eval_vector(
      foliation::foliation_field(S.space.structure, S.spec), start);
  double dot = 0.0;
  for (int k = 0; k < start.dim; ++k) dot += hatx[k] * (target.x[k] - start.x[k]);
  foliation::TraceOptions opt;
  opt.direction = dot >= 0.0 ? +1 : -1;
  opt.max_length = max_length;
  return foliation::trace_leaf(S.space.structure, S.spec, start, opt);
}

ordered_json report_to_json(const foliation::CharacteristicPointReport& r) {
  ordered_json j;
  j["location"] = std::vector<double>(r.location.x.begin(),
                                      r.location.x.begin() + r.location.dim);
  j["class"] = foliation::point_class_name(r.cls);
  j["det"] = r.det;
  j["trace"] = r.trace;
  j["eigenvalues"] = {{r.eigenvalues[0].real(), r.eigenvalues[0].imag()},
                      {r.eigenvalues[1].real(), r.eigenvalues[1].imag()}};
  j["hess_j"] = {{r.hess_j[0][0], r.hess_j[0][1]}, {r.hess_j[1][0], r.hess_j[1][1]}};
  ordered_json dirs = ordered_json::array();
  for (const auto& d : r.directions) {
    ordered_json dj;
    dj["lambda"] = d.lambda;
    dj["ambient"] = std::vector<double>(d.ambient.begin(),
                                        d.ambient.begin() + r.location.dim);
    dirs.push_back(dj);
  }
  j["directions"] = dirs;
  j["normalized"] = r.normalized;
  return j;
}

struct Emitter {
  std::filesystem::path out_dir;
  ordered_json manifest_artifacts = ordered_json::array();

  void write(const std::string& name, const std::string& content) {
    foliation::atomic_write_file((out_dir / name).string(), content);
    manifest_artifacts.push_back(name);
  }
  void write_json(const std::string& name, const ordered_json& j) {
    write(name, j.dump(2) + "\n");
  }
  void manifest(const std::string& command, const ordered_json& extra, double wall_s) {
    ordered_json m;
    m["command"] = command;
    for (const auto& [k, v] : extra.items()) m[k] = v;
    m["artifacts"] = manifest_artifacts;
    m["wall_time_s"] = wall_s;
    foliation::atomic_write_file((out_dir / "manifest.json").string(), m.dump(2) + "\n");
  }
};

double wall_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<ChartPoint> sampled_points(const NamedSurface& S, int n) {
  if (!S.sample)
    throw ConfigError("this surface has no point sampler; list points in the config");
  std::vector<ChartPoint> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t1 = (i + 0.5) / double(n);
    const double t2 = 0.5 + 0.37 * std::sin(2.399963229728653 * i);  // spread, deterministic
    pts.push_back(S.sample(t1, t2));
  }
  return pts;
}

int cmd_list_models() {
  std::cout << "model spaces: heisenberg, su2(k), sl2(k)\n";
  std::cout << "surfaces:\n";
  for (const auto& name : foliation::builtin_surface_names())
    std::cout << "  " << name << "\n";
  std::cout << "surface params: a (paraboloid, spheroid, hyperbolic_paraboloid),\n"
               "  c (spheroid), k (su2_sphere, sl2_plane), kappa (canonical_exp_surface)\n";
  return 0;
}

int cmd_classify(const SurfaceChoice& sc, Emitter& em, const ordered_json& meta) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto found =
      foliation::find_characteristic_points(sc.surface.space.structure, sc.surface.spec);
  ordered_json arr = ordered_json::array();
  int n_nondeg = 0;
  for (const auto& p : found.points) {
    const auto rep = foliation::classify(sc.surface.space.structure, sc.surface.spec, p);
    if (rep.cls != foliation::PointClass::Degenerate) ++n_nondeg;
    arr.push_back(report_to_json(rep));
    std::cout << foliation::point_class_name(rep.cls) << " at (";
    for (int k = 0; k < p.dim; ++k)
      std::cout << (k ? ", " : "") << foliation::format_g17(p.x[k]);
    std::cout << ")\n";
  }
  ordered_json out;
  out["surface"] = sc.surface.name;
  out["n_points"] = found.points.size();
  out["points"] = arr;
  em.write_json("classify.json", out);
  em.manifest("classify", meta, wall_since(t0));
  if (!found.points.empty() && n_nondeg == 0) return 2;
  return 0;
}

int cmd_trace(const SurfaceChoice& sc, const json& cfg, Emitter& em,
              const ordered_json& meta, int n_leaves_flag, int direction_flag) {
  const auto t0 = std::chrono::steady_clock::now();
  json sec = cfg.contains("trace") ? cfg["trace"] : json::object();
  require_keys(sec, {"starts", "direction", "step", "max_length", "char_stop", "n_leaves"},
               "trace");

  foliation::TraceOptions opt;
  opt.direction = direction_flag != 0 ? direction_flag
                                      : (sec.contains("direction") ? sec["direction"].get<int>() : 1);
  if (sec.contains("step")) opt.step = sec["step"].get<double>();
  if (sec.contains("max_length")) opt.max_length = sec["max_length"].get<double>();
  if (sec.contains("char_stop")) opt.char_stop = sec["char_stop"].get<double>();

  std::vector<ChartPoint> starts;
  if (sec.contains("starts"))
    for (const auto& arr : sec["starts"])
      starts.push_back(point_from_array(arr, sc.surface.space.structure.chart));
  const int n_leaves = n_leaves_flag > 0
                           ? n_leaves_flag
                           : (sec.contains("n_leaves") ? sec["n_leaves"].get<int>() : 0);
  if (starts.empty() && n_leaves > 0) {
    if (!sc.surface.sample)
      throw ConfigError("surface has no sampler; list trace.starts in the config");
    for (int i = 0; i < n_leaves; ++i)
      starts.push_back(sc.surface.sample((i + 0.5) / double(n_leaves), 0.5));
  }
  if (starts.empty())
    throw ConfigError("no trace starts: pass --n-leaves or trace.starts");

  int ok_count = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      const auto trace =
          foliation::trace_leaf(sc.surface.space.structure, sc.surface.spec, starts[i], opt);
      const std::string name = "leaf_" + std::to_string(i) + ".csv";
      em.write(name, foliation::leaf_trace_to_csv(trace));
      std::cout << name << ": " << trace.samples.size() << " samples, stop="
                << foliation::stop_reason_name(trace.stop) << "\n";
      ++ok_count;
    } catch (const std::exception& e) {
      std::cerr << "leaf " << i << " failed: " << e.what() << "\n";
    }
  }
  em.manifest("trace", meta, wall_since(t0));
  return ok_count > 0 ? 0 : 3;
}

std::vector<double> eps_list_from(const json& sec) {
  if (sec.contains("eps")) {
    std::vector<double> out;
    for (const auto& e : sec["eps"]) out.push_back(e.get<double>());
    if (out.empty()) throw ConfigError("eps list must not be empty");
    return out;
  }
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
}

std::vector<ChartPoint> points_from(const NamedSurface& S, const json& sec, int fallback_n) {
  if (sec.contains("points")) {
    std::vector<ChartPoint> pts;
    for (const auto& arr : sec["points"])
      pts.push_back(point_from_array(arr, S.space.structure.chart));
    if (pts.empty()) throw ConfigError("points list must not be empty");
    return pts;
  }
  const int n = sec.contains("n_points") ? sec["n_points"].get<int>() : fallback_n;
  return sampled_points(S, n);
}

int cmd_ops(const SurfaceChoice& sc, const json& cfg, Emitter& em, const ordered_json& meta) {
  const auto t0 = std::chrono::steady_clock::now();
  json sec = cfg.contains("ops") ? cfg["ops"] : json::object();
  require_keys(sec, {"eps", "points", "bump", "n_points"}, "ops");
  const auto eps = eps_list_from(sec);
  const auto points = points_from(sc.surface, sec, 50);

  ChartPoint center = points[points.size() / 2];
  double radius = 1.0;
  if (sec.contains("bump")) {
    require_keys(sec["bump"], {"center", "radius"}, "ops.bump");
    if (sec["bump"].contains("center"))
      center = point_from_array(sec["bump"]["center"], sc.surface.space.structure.chart);
    if (sec["bump"].contains("radius")) radius = sec["bump"]["radius"].get<double>();
  }
  const auto f = foliation::bump_field(center, radius);
  const auto ctx = foliation::make_operators(sc.surface.space.structure, sc.surface.spec);

  const auto study = foliation::convergence_study(ctx, f, points, eps);
  em.write("convergence.csv", foliation::convergence_csv(study));

  const auto curv = foliation::curvature_sweep(ctx, points, eps);
  em.write("curvature.csv", foliation::curvature_csv(curv, eps));

  double riccati_max = 0.0;
  for (const auto& row : curv) riccati_max = std::max(riccati_max, std::abs(row.riccati));

  ordered_json summary;
  summary["surface"] = sc.surface.name;
  summary["eps"] = study.summary.eps;
  summary["max_error_per_eps"] = study.summary.max_error;
  summary["order_per_decade"] = study.summary.order;
  summary["empirical_order"] = study.summary.overall_slope;
  summary["riccati_max"] = riccati_max;
  em.write_json("summary.json", summary);
  em.manifest("ops", meta, wall_since(t0));

  std::cout << "empirical order " << study.summary.overall_slope << ", riccati max "
            << riccati_max << "\n";
  return study.summary.overall_slope >= 0.5 ? 0 : 3;
}

int cmd_curvature(const SurfaceChoice& sc, const json& cfg, Emitter& em,
                  const ordered_json& meta) {
  const auto t0 = std::chrono::steady_clock::now();
  json sec = cfg.contains("curvature") ? cfg["curvature"] : json::object();
  require_keys(sec, {"eps", "points", "n_points"}, "curvature");
  const auto eps = eps_list_from(sec);
  const auto points = points_from(sc.surface, sec, 100);
  const auto ctx = foliation::make_operators(sc.surface.space.structure, sc.surface.spec);
  const auto curv = foliation::curvature_sweep(ctx, points, eps);
  em.write("curvature.csv", foliation::curvature_csv(curv, eps));
  double riccati_max = 0.0;
  for (const auto& row : curv) riccati_max = std::max(riccati_max, std::abs(row.riccati));
  ordered_json summary;
  summary["surface"] = sc.surface.name;
  summary["eps"] = eps;
  summary["riccati_max"] = riccati_max;
  em.write_json("summary.json", summary);
  em.manifest("curvature", meta, wall_since(t0));
  std::cout << "riccati max " << riccati_max << "\n";
  return 0;
}

struct SimFlags {
  std::string process;
  double param = 1.0;
  std::string leaf;
  std::string start;
  double s0 = -1.0;
  double dt = -1.0;
  double t_max = -1.0;
  std::int64_t n_paths = -1;
  double kill_radius = -1.0;
};

foliation::LeafDiffusionSpec build_leaf_spec(const SurfaceChoice& sc, const json& sec,
                                             const SimFlags& fl,
                                             foliation::CharacteristicPointReport* rep_out,
                                             std::array<double, foliation::kMaxDim>* dir_out) {
  ChartPoint start = [&] {
    if (!fl.start.empty())
      return parse_point_flag(fl.start, sc.surface.space.structure.chart);
    if (sec.contains("start"))
      return point_from_array(sec["start"], sc.surface.space.structure.chart);
    if (!fl.leaf.empty()) return axis_start(sc.surface, fl.leaf, 0.5);
    if (sec.contains("leaf"))
      return axis_start(sc.surface, sec["leaf"].get<std::string>(), 0.5);
    if (!sc.surface.sample) throw ConfigError("pass --start for custom surfaces");
    return sc.surface.sample(0.3, 0.5);
  }();
  const ChartPoint target = nearest_char_point(sc.surface, start);
  const auto trace = trace_toward(sc.surface, start, target, 5.0);
  if (trace.stop != foliation::StopReason::NearCharacteristicPoint)
    throw std::runtime_error("leaf trace did not reach a characteristic point (stop=" +
                             foliation::stop_reason_name(trace.stop) + ")");
  if (rep_out)
    *rep_out = foliation::classify(sc.surface.space.structure, sc.surface.spec, target);
  if (dir_out) {
    // Approach direction: from the characteristic point toward the last
    // resolved sample of the trace.
    const auto& last = trace.samples.back().point;
    for (int k = 0; k < last.dim; ++k) (*dir_out)[k] = last.x[k] - target.x[k];
  }
  return foliation::spec_from_trace(trace, target, sc.surface.name);
}

int cmd_sim(const SurfaceChoice* sc, const json& cfg, Emitter& em, const ordered_json& meta,
            const SimFlags& fl, std::uint64_t master_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  json sec = cfg.contains("sim") ? cfg["sim"] : json::object();
  require_keys(sec,
               {"process", "param", "s0", "dt", "t_max", "n_paths", "kill_radius", "leaf",
                "start", "direction"},
               "sim");

  foliation::LeafDiffusionSpec spec;
  std::string process = fl.process;
  if (process.empty() && sec.contains("process")) process = sec["process"].get<std::string>();
  if (!process.empty()) {
    const std::string norm = to_underscore(process);
    const double param =
        fl.param != 1.0 ? fl.param : (sec.contains("param") ? sec["param"].get<double>() : 1.0);
    if (norm == "bessel3")
      spec = foliation::reference_process(foliation::ReferenceKind::Bessel3);
    else if (norm == "legendre3")
      spec = foliation::reference_process(foliation::ReferenceKind::Legendre3, param);
    else if (norm == "hyperbolic_bessel3")
      spec = foliation::reference_process(foliation::ReferenceKind::HyperbolicBessel3, param);
    else if (norm == "bessel_order")
      spec = foliation::reference_process(foliation::ReferenceKind::BesselOrder, param);
    else
      throw ConfigError("unknown process '" + process + "'");
  } else {
    if (!sc) throw ConfigError("sim needs --process or a surface");
    spec = build_leaf_spec(*sc, sec, fl, nullptr, nullptr);
  }

  foliation::SimConfig sim;
  sim.master_seed = master_seed;
  if (fl.s0 > 0)
    sim.s0 = fl.s0;
  else if (sec.contains("s0"))
    sim.s0 = sec["s0"].get<double>();
  else
    sim.s0 = std::isfinite(spec.s_max) ? 0.5 * (spec.s_min + spec.s_max) : 1.0;
  if (sim.s0 <= spec.s_min || sim.s0 >= spec.s_max)
    throw ConfigError("s0 must lie inside the leaf domain (" +
                      std::to_string(spec.s_min) + ", " + std::to_string(spec.s_max) + ")");
  sim.dt = fl.dt > 0 ? fl.dt : (sec.contains("dt") ? sec["dt"].get<double>() : 1e-4);
  sim.t_max = fl.t_max > 0 ? fl.t_max : (sec.contains("t_max") ? sec["t_max"].get<double>() : 10.0);
  sim.n_paths =
      fl.n_paths > 0 ? fl.n_paths
                     : (sec.contains("n_paths") ? sec["n_paths"].get<std::int64_t>() : 10000);
  sim.kill_radius = fl.kill_radius > 0
                        ? fl.kill_radius
                        : (sec.contains("kill_radius") ? sec["kill_radius"].get<double>() : 1e-3);

  const auto stats = foliation::simulate(spec, sim);
  em.write_json("sim.json", foliation::path_stats_json(spec, sim, stats));
  em.manifest("sim", meta, wall_since(t0));
  std::cout << "hit_fraction " << stats.hit_fraction << " (" << stats.n_hit << "/"
            << stats.n_paths << "), wilson95 [" << stats.wilson_lo << ", "
            << stats.wilson_hi << "]\n";
  return 0;
}

int cmd_boundary(const SurfaceChoice& sc, const json& cfg, Emitter& em,
                 const ordered_json& meta, const SimFlags& fl) {
  const auto t0 = std::chrono::steady_clock::now();
  json sec = cfg.contains("boundary") ? cfg["boundary"] : json::object();
  require_keys(sec, {"leaf", "start", "delta", "direction"}, "boundary");

  foliation::CharacteristicPointReport rep;
  std::array<double, foliation::kMaxDim> dir{};
  const auto spec = build_leaf_spec(sc, sec, fl, &rep, &dir);
  std::optional<double> lambda;
  if (rep.cls != foliation::PointClass::Degenerate)
    lambda = foliation::approach_lambda(rep, dir);
  std::optional<double> delta;
  if (sec.contains("delta")) delta = sec["delta"].get<double>();

  const auto report =
      foliation::classify_boundary(spec, foliation::Side::Lower, lambda, delta);
  ordered_json out = foliation::boundary_report_json(report);
  out["characteristic_point"] = report_to_json(rep);
  em.write_json("boundary.json", out);
  em.manifest("boundary", meta, wall_since(t0));
  std::cout << foliation::verdict_name(report.verdict)
            << " (lambda=" << report.lambda_exponent << ", q_hat=" << report.q_hat << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"characteristic foliations, surface Laplacians and leaf diffusions"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", surface_flag, leaf_flag, start_flag, process_flag;
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int threads = 0;
  std::map<std::string, double> flag_params;
  double a_flag = std::nan(""), c_flag = std::nan(""), k_flag = std::nan(""),
         kappa_flag = std::nan("");

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed_flag, "master seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--threads", threads, "worker thread cap (also FOLIATION_THREADS)");

  auto add_surface_flags = [&](CLI::App* sub) {
    sub->fallthrough();  // --config/--out/--seed/--threads may follow the subcommand
    sub->add_option("--surface", surface_flag, "built-in surface name");
    sub->add_option("--a", a_flag, "surface parameter a");
    sub->add_option("--c", c_flag, "surface parameter c");
    sub->add_option("--k", k_flag, "model scale k");
    sub->add_option("--kappa", kappa_flag, "curvature parameter for the exp-surface");
  };

  auto* sub_classify = app.add_subcommand("classify", "find and classify characteristic points");
  add_surface_flags(sub_classify);

  auto* sub_trace = app.add_subcommand("trace", "trace foliation leaves to CSV");
  add_surface_flags(sub_trace);
  int n_leaves = 0, direction = 0;
  sub_trace->add_option("--n-leaves", n_leaves, "number of sampler-seeded leaves");
  sub_trace->add_option("--direction", direction, "trace direction (+1/-1)");

  auto* sub_ops = app.add_subcommand("ops", "operator convergence and curvature study");
  add_surface_flags(sub_ops);

  auto* sub_curv = app.add_subcommand("curvature", "curvature sweep with Riccati residuals");
  add_surface_flags(sub_curv);

  SimFlags sim_flags;
  auto* sub_sim = app.add_subcommand("sim", "leaf diffusion Monte Carlo");
  add_surface_flags(sub_sim);
  sub_sim->add_option("--process", sim_flags.process,
                      "bessel3 | legendre3 | hyperbolic-bessel3 | bessel-order");
  sub_sim->add_option("--param", sim_flags.param, "process parameter (k or order)");
  sub_sim->add_option("--leaf", sim_flags.leaf, "named leaf (x-axis | y-axis)");
  sub_sim->add_option("--start", sim_flags.start, "leaf start point, comma separated");
  sub_sim->add_option("--s0", sim_flags.s0, "start arc distance");
  sub_sim->add_option("--dt", sim_flags.dt, "time step");
  sub_sim->add_option("--t-max", sim_flags.t_max, "time horizon");
  sub_sim->add_option("--paths", sim_flags.n_paths, "number of paths");
  sub_sim->add_option("--kill-radius", sim_flags.kill_radius, "absorption radius");

  auto* sub_boundary = app.add_subcommand("boundary", "boundary accessibility report");
  add_surface_flags(sub_boundary);
  sub_boundary->add_option("--leaf", sim_flags.leaf, "named leaf (x-axis | y-axis)");
  sub_boundary->add_option("--start", sim_flags.start, "leaf start point, comma separated");

  auto* sub_list = app.add_subcommand("list-models", "print built-in spaces and surfaces");
  sub_list->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (threads > 0) setenv("FOLIATION_THREADS", std::to_string(threads).c_str(), 1);

    if (sub_list->parsed()) return cmd_list_models();

    const json cfg = load_config(config_path);
    std::uint64_t master_seed = 0;
    if (cfg.contains("master_seed")) master_seed = cfg["master_seed"].get<std::uint64_t>();
    if (seed_set) master_seed = seed_flag;
    if (cfg.contains("output_dir") && out_dir == "out")
      out_dir = cfg["output_dir"].get<std::string>();

    if (!std::isnan(a_flag)) flag_params["a"] = a_flag;
    if (!std::isnan(c_flag)) flag_params["c"] = c_flag;
    if (!std::isnan(k_flag)) flag_params["k"] = k_flag;
    if (!std::isnan(kappa_flag)) flag_params["kappa"] = kappa_flag;

    Emitter em;
    em.out_dir = out_dir;
    std::filesystem::create_directories(em.out_dir);

    ordered_json meta;
    meta["master_seed"] = master_seed;

    const bool needs_surface = sub_classify->parsed() || sub_trace->parsed() ||
                               sub_ops->parsed() || sub_curv->parsed() ||
                               sub_boundary->parsed();
    std::optional<SurfaceChoice> sc;
    if (needs_surface || (sub_sim->parsed() && sim_flags.process.empty() &&
                          !(cfg.contains("sim") && cfg["sim"].contains("process")))) {
      sc = make_surface_choice(cfg.contains("surface") ? cfg["surface"] : json(),
                               surface_flag, flag_params);
      meta["surface"] = sc->surface.name;
      if (sc->surface.warning) std::cerr << "warning: " << *sc->surface.warning << "\n";
    }

    if (sub_classify->parsed()) return cmd_classify(*sc, em, meta);
    if (sub_trace->parsed()) return cmd_trace(*sc, cfg, em, meta, n_leaves, direction);
    if (sub_ops->parsed()) return cmd_ops(*sc, cfg, em, meta);
    if (sub_curv->parsed()) return cmd_curvature(*sc, cfg, em, meta);
    if (sub_sim->parsed())
      return cmd_sim(sc ? &*sc : nullptr, cfg, em, meta, sim_flags, master_seed);
    if (sub_boundary->parsed()) return cmd_boundary(*sc, cfg, em, meta, sim_flags);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
