#include "fermat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "fermat/catalog.hpp"
#include "fermat/csvio.hpp"
#include "fermat/errors.hpp"
#include "fermat/grid_oracle.hpp"
#include "fermat/knn_graph.hpp"
#include "fermat/rng.hpp"
#include "fermat/sampler.hpp"
#include "fermat/svg.hpp"
#include "fermat/thread_pool.hpp"
#include "fermat/version.hpp"

namespace fermat {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw ValidationError("config field '" + field + "': " + why);
}

void reject_unknown(const json& j, const std::vector<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      bad_field(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) bad_field("alpha", "must be >= 1");
  if (dim < 1 || dim > 16) bad_field("dim", "must be in 1..16");
  if (schedule.empty()) bad_field("schedule", "must be non-empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] > 0.0)) bad_field("schedule", "entries must be positive");
    if (i > 0 && !(schedule[i] > schedule[i - 1])) {
      bad_field("schedule", "must be strictly increasing");
    }
  }
  if (replicates < 1) bad_field("replicates", "must be >= 1");
  if (!query_x.empty() && query_x.size() != query_y.size()) {
    bad_field("query", "x and y must have the same dimension");
  }
  if (!(exact_threshold >= 0.0)) bad_field("exact_threshold", "must be >= 0");
  if (!(knn_c > 0.0)) bad_field("knn_c", "must be positive");
  if (oracle_h < 0.0) bad_field("oracle.h", "must be >= 0 (0 = auto)");
  if (oracle_r < 1) bad_field("oracle.r", "must be >= 1");
  if (!(shape_target_radius > 0.0)) bad_field("shape.target_radius", "must be positive");
  if (shape_t < 0.0) bad_field("shape.t", "must be >= 0 (0 = auto)");
  if (mu_hat < 0.0) bad_field("shape.mu_hat", "must be >= 0 (0 = bootstrap)");
  if (!(knn_epsilon > 0.0) || knn_epsilon >= 1.0) bad_field("knn.epsilon", "must be in (0,1)");
  if (knn_pairs < 1) bad_field("knn.pairs", "must be >= 1");
  if (knn_sources < 1) bad_field("knn.sources", "must be >= 1");
  if (curve_resolution < 2) bad_field("curve_resolution", "must be >= 2");
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  reject_unknown(j, {"scenario", "manifold", "alpha", "dim", "schedule", "replicates",
                     "seed", "query", "exact_threshold", "knn_c", "oracle", "workers",
                     "out_dir", "shape", "knn", "curve_resolution"},
                 "");
  ExperimentConfig c;
  auto num = [&](const json& o, const char* f, double fallback) {
    if (!o.contains(f)) return fallback;
    if (!o[f].is_number()) bad_field(f, "expected a number");
    return o[f].get<double>();
  };
  if (j.contains("scenario")) {
    if (!j["scenario"].is_object()) bad_field("scenario", "expected an object");
    c.scenario_json = j["scenario"].dump();
  }
  if (j.contains("manifold")) {
    if (!j["manifold"].is_object()) bad_field("manifold", "expected an object");
    c.manifold_json = j["manifold"].dump();
  }
  c.alpha = num(j, "alpha", c.alpha);
  c.dim = static_cast<int>(num(j, "dim", c.dim));
  if (j.contains("schedule")) {
    if (!j["schedule"].is_array()) bad_field("schedule", "expected an array of numbers");
    c.schedule.clear();
    for (const auto& v : j["schedule"]) {
      if (!v.is_number()) bad_field("schedule", "expected an array of numbers");
      c.schedule.push_back(v.get<double>());
    }
  }
  c.replicates = static_cast<int>(num(j, "replicates", c.replicates));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
      bad_field("seed", "expected an integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("query")) {
    const json& q = j["query"];
    if (!q.is_object()) bad_field("query", "expected an object with x and y arrays");
    reject_unknown(q, {"x", "y"}, "query");
    for (const char* f : {"x", "y"}) {
      if (!q.contains(f) || !q[f].is_array()) bad_field(std::string("query.") + f, "expected an array");
      Vec& dst = f[0] == 'x' ? c.query_x : c.query_y;
      dst.clear();
      for (const auto& v : q[f]) {
        if (!v.is_number()) bad_field(std::string("query.") + f, "expected numbers");
        dst.push_back(v.get<double>());
      }
    }
  }
  c.exact_threshold = num(j, "exact_threshold", c.exact_threshold);
  c.knn_c = num(j, "knn_c", c.knn_c);
  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    if (!o.is_object()) bad_field("oracle", "expected an object");
    reject_unknown(o, {"h", "r"}, "oracle");
    c.oracle_h = num(o, "h", c.oracle_h);
    c.oracle_r = static_cast<int>(num(o, "r", c.oracle_r));
  }
  c.workers = static_cast<int>(num(j, "workers", c.workers));
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) bad_field("out_dir", "expected a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("shape")) {
    const json& s = j["shape"];
    if (!s.is_object()) bad_field("shape", "expected an object");
    reject_unknown(s, {"t", "target_radius", "mu_hat"}, "shape");
    c.shape_t = num(s, "t", c.shape_t);
    c.shape_target_radius = num(s, "target_radius", c.shape_target_radius);
    c.mu_hat = num(s, "mu_hat", c.mu_hat);
  }
  if (j.contains("knn")) {
    const json& s = j["knn"];
    if (!s.is_object()) bad_field("knn", "expected an object");
    reject_unknown(s, {"epsilon", "pairs", "sources", "k_grid"}, "knn");
    c.knn_epsilon = num(s, "epsilon", c.knn_epsilon);
    c.knn_pairs = static_cast<int>(num(s, "pairs", c.knn_pairs));
    c.knn_sources = static_cast<int>(num(s, "sources", c.knn_sources));
    if (s.contains("k_grid")) {
      if (!s["k_grid"].is_array()) bad_field("knn.k_grid", "expected an array");
      c.k_grid.clear();
      for (const auto& v : s["k_grid"]) c.k_grid.push_back(v.get<std::size_t>());
    }
  }
  c.curve_resolution = static_cast<int>(num(j, "curve_resolution", c.curve_resolution));
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j;
  if (!scenario_json.empty()) j["scenario"] = json::parse(scenario_json);
  if (!manifold_json.empty()) j["manifold"] = json::parse(manifold_json);
  j["alpha"] = alpha;
  j["dim"] = dim;
  j["schedule"] = schedule;
  j["replicates"] = replicates;
  j["seed"] = seed;
  if (!query_x.empty()) j["query"] = json{{"x", query_x}, {"y", query_y}};
  j["exact_threshold"] = exact_threshold;
  j["knn_c"] = knn_c;
  j["oracle"] = json{{"h", oracle_h}, {"r", oracle_r}};
  j["workers"] = workers;
  if (!out_dir.empty()) j["out_dir"] = out_dir.string();
  j["shape"] = json{{"t", shape_t}, {"target_radius", shape_target_radius}, {"mu_hat", mu_hat}};
  json kj{{"epsilon", knn_epsilon}, {"pairs", knn_pairs}, {"sources", knn_sources}};
  if (!k_grid.empty()) kj["k_grid"] = k_grid;
  j["knn"] = kj;
  j["curve_resolution"] = curve_resolution;
  return j.dump();
}

SummaryStat summarize(double n, std::vector<double> values) {
  if (values.empty()) throw ValidationError("summarize: no values");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
  };
  SummaryStat s;
  s.n = n;
  s.median = quantile(0.5);
  s.q25 = quantile(0.25);
  s.q75 = quantile(0.75);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

namespace {

// ---------------------------------------------------------------------
// shared helpers

Vec fraction_point(const DomainSpec& dom, const Vec& frac) {
  Vec p(dom.lo.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double f = j < frac.size() ? frac[j] : 0.5;
    p[j] = dom.lo[j] + f * (dom.hi[j] - dom.lo[j]);
  }
  return p;
}

struct MethodResult {
  DistanceResult res;
  std::string method;
  std::size_t k = 0;
};

std::size_t knn_k_for(double knn_c, std::size_t n_points) {
  const std::size_t k =
      static_cast<std::size_t>(std::ceil(knn_c * std::log(static_cast<double>(n_points))));
  return std::clamp<std::size_t>(k, 1, n_points - 1);
}

/// Exact below the threshold, kNN-restricted with k = ceil(c ln n) above.
MethodResult distance_with_method(const PointCloud& cloud, Alpha alpha, PointView x,
                                  PointView y, const ExperimentConfig& cfg) {
  MethodResult m;
  if (cloud.size() < 2) throw NumericalError("sample produced fewer than 2 particles");
  if (static_cast<double>(cloud.size()) <= cfg.exact_threshold) {
    m.res = exact_distance(cloud, alpha, x, y);
    m.method = "exact";
    return m;
  }
  m.k = knn_k_for(cfg.knn_c, cloud.size());
  SpatialIndex index(cloud);
  const KnnGraph graph = KnnGraph::build(cloud, index, m.k, alpha, false, 1);
  m.res = restricted_distance(graph, cloud, alpha, x, y);
  m.method = "knn";
  if (m.res.unreachable) {
    throw NumericalError("restricted search unreachable at k=" + std::to_string(m.k) +
                         "; increase knn_c");
  }
  return m;
}

double auto_oracle_h(const DomainSpec& dom, double requested) {
  if (requested > 0.0) return requested;
  const int d = dom.dim();
  const double target = d == 1 ? 4096.0 : 262144.0;
  return std::pow(dom.box_volume() / target, 1.0 / static_cast<double>(d));
}

GridOracle build_oracle(const Scenario& sc, Beta beta, const ExperimentConfig& cfg) {
  GridOracleConfig oc;
  oc.h = auto_oracle_h(sc.domain, cfg.oracle_h);
  oc.stencil_radius = cfg.oracle_r;
  oc.workers = cfg.workers;
  return GridOracle::build(sc.domain, sc.density, beta, oc, sc.params_json);
}

void ensure_out_dir(const std::filesystem::path& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

void write_sidecar(const std::filesystem::path& dir, const std::string& schema,
                   const ExperimentConfig& cfg, const json& extras, double total_ms) {
  json meta{
      {"schema", schema},
      {"version", 1},
      {"config", json::parse(cfg.to_json())},
      {"seed", cfg.seed},
      {"library_version", kVersion},
      {"timing", json{{"total_ms", total_ms}}},
      {"workers_used", resolve_workers(cfg.workers)},
  };
  if (!extras.is_null()) meta["extras"] = extras;
  write_text_file(dir / (schema + ".meta.json"), meta.dump(2) + "\n");
}

/// Median line + IQR band against log10(n).
void plot_per_n(const std::filesystem::path& path, const std::vector<SummaryStat>& stats,
                const std::string& y_label, const std::string& series_color) {
  if (stats.empty()) return;
  double ymin = stats[0].q25, ymax = stats[0].q75;
  for (const auto& s : stats) {
    ymin = std::min({ymin, s.q25, s.median});
    ymax = std::max({ymax, s.q75, s.median});
  }
  const double pad = 0.15 * std::max(1e-12, ymax - ymin);
  const double x0 = std::log10(stats.front().n), x1 = std::log10(stats.back().n);
  SvgCanvas svg(x0 - 0.2, ymin - pad, x1 + 0.2, ymax + pad);
  Polyline med, up, lo;
  for (const auto& s : stats) {
    const double x = std::log10(s.n);
    med.push_back({x, s.median});
    up.push_back({x, s.q75});
    lo.push_back({x, s.q25});
  }
  svg.band(up, lo, series_color);
  svg.polyline(med, series_color, 2.0);
  for (const auto& s : stats) {
    svg.circle(std::log10(s.n), s.median, 3.0, series_color);
    svg.text(std::log10(s.n), ymin - 0.5 * pad, format_double(s.n), 11, "middle");
  }
  svg.axes("log10 n", y_label);
  svg.save(path);
}

}  // namespace

// ---------------------------------------------------------------------
// estimate_mu

MuResult estimate_mu(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  const Alpha alpha(config.alpha);
  const Beta beta = Beta::from_alpha(alpha, config.dim);

  Scenario sc = make_scenario("{\"type\":\"uniform\",\"dim\":" + std::to_string(config.dim) + "}");
  Vec x = config.query_x.empty() ? fraction_point(sc.domain, {0.2, 0.5, 0.5}) : config.query_x;
  Vec y = config.query_y.empty() ? fraction_point(sc.domain, {0.8, 0.5, 0.5}) : config.query_y;
  if (static_cast<int>(x.size()) != config.dim) {
    throw ValidationError("estimate_mu: query dimension does not match dim");
  }
  const double xy = euclidean_distance(x, y);
  if (!(xy >= 0.5)) {
    throw ValidationError("estimate_mu: query pair must satisfy |x-y| >= 0.5");
  }

  const std::size_t n_tasks = config.schedule.size() * static_cast<std::size_t>(config.replicates);
  MuResult result;
  result.beta = beta.value;
  result.records.resize(n_tasks);
  parallel_for(n_tasks, config.workers, [&](std::size_t task) {
    const std::size_t ni = task / static_cast<std::size_t>(config.replicates);
    const int rep = static_cast<int>(task % static_cast<std::size_t>(config.replicates));
    const double n = config.schedule[ni];
    const std::uint64_t s = Rng::derive(config.seed, "mu", ni, static_cast<std::uint64_t>(rep));
    const SampleBatch batch = sample_poisson(sc.domain, sc.density, n, s);
    const MethodResult m = distance_with_method(batch.cloud, alpha, x, y, config);
    MuRecord r;
    r.n = n;
    r.replicate = rep;
    r.method = m.method;
    r.k = m.k;
    r.distance = m.res.distance;
    r.mu_hat = std::pow(n, beta.value) * m.res.distance / xy;
    result.records[task] = std::move(r);
  });

  for (std::size_t ni = 0; ni < config.schedule.size(); ++ni) {
    std::vector<double> vals;
    for (const auto& r : result.records) {
      if (r.n == config.schedule[ni]) vals.push_back(r.mu_hat);
    }
    result.per_n.push_back(summarize(config.schedule[ni], std::move(vals)));
  }

  if (!config.out_dir.empty()) {
    ensure_out_dir(config.out_dir);
    CsvWriter csv(config.out_dir / "mu.csv", "mu", 1,
                  {"n", "replicate", "method", "k", "distance", "mu_hat", "wall_time_ms"});
    for (const auto& r : result.records) {
      csv.begin_row();
      csv.cell(r.n);
      csv.cell(static_cast<std::int64_t>(r.replicate));
      csv.cell(r.method);
      csv.cell(static_cast<std::uint64_t>(r.k));
      csv.cell(r.distance);
      csv.cell(r.mu_hat);
      csv.cell(0.0);  // timings live in the sidecar; CSV stays reproducible
      csv.end_row();
    }
    csv.close();
    json extras{{"beta", beta.value}, {"query_distance", xy}};
    json per_n = json::array();
    for (const auto& s : result.per_n) {
      per_n.push_back(json{{"n", s.n}, {"mean", s.mean}, {"median", s.median},
                           {"q25", s.q25}, {"q75", s.q75}});
    }
    extras["per_n"] = per_n;
    write_sidecar(config.out_dir, "mu", config, extras, elapsed_ms(t0));
    plot_per_n(config.out_dir / "mu.svg", result.per_n, "mu_hat", "#1f6fb2");
  }
  return result;
}

// ---------------------------------------------------------------------
// run_convergence

ConvergenceResult run_convergence(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  if (config.scenario_json.empty()) {
    throw ValidationError("config field 'scenario': required for convergence runs");
  }
  const Alpha alpha(config.alpha);
  Scenario sc = make_scenario(config.scenario_json);
  const Beta beta = Beta::from_alpha(alpha, sc.domain.dim());

  Vec x = config.query_x.empty() ? fraction_point(sc.domain, {0.2, 0.5, 0.5}) : config.query_x;
  Vec y = config.query_y.empty() ? fraction_point(sc.domain, {0.8, 0.5, 0.5}) : config.query_y;

  // Oracle first: a broken oracle must fail before any sampling starts.
  const GridOracle oracle = build_oracle(sc, beta, config);
  const ContinuumResult cont = continuum_distance(oracle, x, y);
  if (cont.unreachable) {
    throw NumericalError("run_convergence: oracle reports unreachable query pair");
  }

  ConvergenceResult result;
  result.beta = beta.value;
  result.oracle_distance = cont.distance;

  const std::size_t n_tasks = config.schedule.size() * static_cast<std::size_t>(config.replicates);
  result.records.resize(n_tasks);
  parallel_for(n_tasks, config.workers, [&](std::size_t task) {
    const std::size_t ni = task / static_cast<std::size_t>(config.replicates);
    const int rep = static_cast<int>(task % static_cast<std::size_t>(config.replicates));
    const double n = config.schedule[ni];
    const std::uint64_t s =
        Rng::derive(config.seed, "convergence", ni, static_cast<std::uint64_t>(rep));
    const SampleBatch batch = sample_poisson(sc.domain, sc.density, n, s);
    const MethodResult m = distance_with_method(batch.cloud, alpha, x, y, config);
    const PathStats st = path_statistics(m.res.path, batch.cloud);
    ConvergenceRecord r;
    r.n = n;
    r.replicate = rep;
    r.method = m.method;
    r.k = m.k;
    r.scaled_distance = std::pow(n, beta.value) * m.res.distance;
    r.oracle_distance = cont.distance;
    r.ratio = r.scaled_distance / cont.distance;
    r.arc_length = st.arc_length;
    r.max_gap = st.max_gap;
    r.hop_count = st.hop_count;
    result.records[task] = std::move(r);
  });

  for (std::size_t ni = 0; ni < config.schedule.size(); ++ni) {
    std::vector<double> vals;
    for (const auto& r : result.records) {
      if (r.n == config.schedule[ni]) vals.push_back(r.ratio);
    }
    result.ratio_per_n.push_back(summarize(config.schedule[ni], std::move(vals)));
  }

  if (!config.out_dir.empty()) {
    ensure_out_dir(config.out_dir);
    CsvWriter csv(config.out_dir / "convergence.csv", "convergence", 1,
                  {"n", "replicate", "method", "k", "scaled_distance", "oracle_distance",
                   "ratio", "arc_length", "max_gap", "hop_count", "wall_time_ms"});
    for (const auto& r : result.records) {
      csv.begin_row();
      csv.cell(r.n);
      csv.cell(static_cast<std::int64_t>(r.replicate));
      csv.cell(r.method);
      csv.cell(static_cast<std::uint64_t>(r.k));
      csv.cell(r.scaled_distance);
      csv.cell(r.oracle_distance);
      csv.cell(r.ratio);
      csv.cell(r.arc_length);
      csv.cell(r.max_gap);
      csv.cell(static_cast<std::uint64_t>(r.hop_count));
      csv.cell(0.0);
      csv.end_row();
    }
    csv.close();
    json extras{{"beta", beta.value},
                {"oracle_distance", cont.distance},
                {"oracle_h", oracle.h()},
                {"oracle_nodes", oracle.node_count()}};
    write_sidecar(config.out_dir, "convergence", config, extras, elapsed_ms(t0));
    plot_per_n(config.out_dir / "convergence.svg", result.ratio_per_n, "n^beta D / oracle",
               "#b2451f");
  }
  return result;
}

// ---------------------------------------------------------------------
// run_geodesic_convergence

GeodesicResult run_geodesic_convergence(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  const std::string scenario_json = config.scenario_json.empty()
                                        ? std::string("{\"type\":\"gauss_bump\"}")
                                        : config.scenario_json;
  const Alpha alpha(config.alpha);
  Scenario sc = make_scenario(scenario_json);
  const Beta beta = Beta::from_alpha(alpha, sc.domain.dim());

  Vec x = config.query_x.empty() ? fraction_point(sc.domain, {0.1, 0.3}) : config.query_x;
  Vec y = config.query_y.empty() ? fraction_point(sc.domain, {0.9, 0.3}) : config.query_y;

  const GridOracle oracle = build_oracle(sc, beta, config);
  GeodesicResult result;
  result.oracle_geodesic = continuum_geodesic(oracle, x, y);

  // Mid-chord deviation: signed offset of the path vertex nearest to the
  // chord midpoint, oriented toward the density bump when one exists.
  Vec u(x.size()), normal(x.size(), 0.0);
  const double chord = euclidean_distance(x, y);
  for (std::size_t j = 0; j < x.size(); ++j) u[j] = (y[j] - x[j]) / chord;
  if (x.size() == 2) {
    normal = {-u[1], u[0]};
    const json params = json::parse(sc.params_json);
    if (params.contains("center")) {
      Vec center = params["center"].get<Vec>();
      double orient = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        orient += (center[j] - 0.5 * (x[j] + y[j])) * normal[j];
      }
      if (orient < 0.0) {
        normal[0] = -normal[0];
        normal[1] = -normal[1];
      }
    }
  }
  auto signed_dev_mid = [&](const Polyline& path) {
    if (x.size() != 2 || path.empty()) return 0.0;
    double best_gap = std::numeric_limits<double>::infinity();
    double dev = 0.0;
    for (const auto& p : path) {
      double s = 0.0;
      for (std::size_t j = 0; j < 2; ++j) s += (p[j] - x[j]) * u[j];
      const double gap = std::abs(s - 0.5 * chord);
      if (gap < best_gap) {
        best_gap = gap;
        dev = (p[0] - (x[0] + s * u[0])) * normal[0] + (p[1] - (x[1] + s * u[1])) * normal[1];
      }
    }
    return dev;
  };

  const std::size_t n_tasks = config.schedule.size() * static_cast<std::size_t>(config.replicates);
  result.records.resize(n_tasks);
  std::vector<Polyline> sample_paths(n_tasks);
  parallel_for(n_tasks, config.workers, [&](std::size_t task) {
    const std::size_t ni = task / static_cast<std::size_t>(config.replicates);
    const int rep = static_cast<int>(task % static_cast<std::size_t>(config.replicates));
    const double n = config.schedule[ni];
    const std::uint64_t s =
        Rng::derive(config.seed, "geodesic", ni, static_cast<std::uint64_t>(rep));
    const SampleBatch batch = sample_poisson(sc.domain, sc.density, n, s);
    const MethodResult m = distance_with_method(batch.cloud, alpha, x, y, config);
    Polyline path;
    path.reserve(m.res.path.particle_indices.size());
    for (std::size_t id : m.res.path.particle_indices) {
      const PointView p = batch.cloud.point(id);
      path.push_back(Vec(p.begin(), p.end()));
    }
    const PathStats st = path_statistics(m.res.path, batch.cloud);
    GeodesicRecord r;
    r.n = n;
    r.replicate = rep;
    r.method = m.method;
    r.curve_dist =
        curve_distance(path, result.oracle_geodesic, config.curve_resolution).value;
    r.signed_dev_mid = signed_dev_mid(path);
    r.arc_length = st.arc_length;
    r.hop_count = st.hop_count;
    r.max_gap = st.max_gap;
    result.records[task] = std::move(r);
    sample_paths[task] = std::move(path);
  });

  for (std::size_t ni = 0; ni < config.schedule.size(); ++ni) {
    std::vector<double> vals;
    for (const auto& r : result.records) {
      if (r.n == config.schedule[ni]) vals.push_back(r.curve_dist);
    }
    result.curve_per_n.push_back(summarize(config.schedule[ni], std::move(vals)));
  }

  if (!config.out_dir.empty()) {
    ensure_out_dir(config.out_dir);
    CsvWriter csv(config.out_dir / "geodesic.csv", "geodesic", 1,
                  {"n", "replicate", "method", "curve_dist", "signed_dev_mid", "arc_length",
                   "hop_count", "max_gap", "wall_time_ms"});
    for (const auto& r : result.records) {
      csv.begin_row();
      csv.cell(r.n);
      csv.cell(static_cast<std::int64_t>(r.replicate));
      csv.cell(r.method);
      csv.cell(r.curve_dist);
      csv.cell(r.signed_dev_mid);
      csv.cell(r.arc_length);
      csv.cell(static_cast<std::uint64_t>(r.hop_count));
      csv.cell(r.max_gap);
      csv.cell(0.0);
      csv.end_row();
    }
    csv.close();
    json extras{{"beta", beta.value}, {"oracle_h", oracle.h()}};
    write_sidecar(config.out_dir, "geodesic", config, extras, elapsed_ms(t0));
    plot_per_n(config.out_dir / "geodesic.svg", result.curve_per_n, "curve distance d_S",
               "#2a7a2a");
    if (sc.domain.dim() == 2) {
      SvgCanvas svg(sc.domain.lo[0], sc.domain.lo[1], sc.domain.hi[0], sc.domain.hi[1], 560, 560);
      svg.polyline({Vec(x), Vec(y)}, "#999999", 1.0, "4 3");
      svg.polyline(result.oracle_geodesic, "#1f6fb2", 2.0);
      const std::size_t last = n_tasks - static_cast<std::size_t>(config.replicates);
      svg.polyline(sample_paths[last], "#b2451f", 1.5);
      svg.save(config.out_dir / "geodesic_overlay.svg");
    }
  }
  return result;
}

// ---------------------------------------------------------------------
// run_shape

ShapeResult run_shape(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  if (config.scenario_json.empty()) {
    throw ValidationError("config field 'scenario': required for shape runs");
  }
  const Alpha alpha(config.alpha);
  Scenario sc = make_scenario(config.scenario_json);
  const Beta beta = Beta::from_alpha(alpha, sc.domain.dim());

  double mu = config.mu_hat;
  if (mu <= 0.0) {
    ExperimentConfig boot;
    boot.alpha = config.alpha;
    boot.dim = sc.domain.dim();
    boot.schedule = {4000, 16000};
    boot.replicates = 8;
    boot.seed = Rng::derive(config.seed, "mu_boot");
    boot.workers = config.workers;
    boot.exact_threshold = config.exact_threshold;
    boot.knn_c = config.knn_c;
    mu = estimate_mu(boot).per_n.back().median;
  }

  // Radius of the outer continuum ball is (t/mu) * f^beta per medium;
  // pick t so the densest medium reaches target_radius.
  const double t_used = config.shape_t > 0.0
                            ? config.shape_t
                            : config.shape_target_radius * mu *
                                  std::pow(sc.density.upper_bound, -beta.value);

  Vec center = config.query_x.empty() ? fraction_point(sc.domain, {0.5, 0.5, 0.5})
                                      : config.query_x;

  const GridOracle oracle = build_oracle(sc, beta, config);
  const std::vector<double> field = oracle.distance_field(oracle.snap(center));

  // Split axis for the two-sided extent ratio (two_media contrast).
  int axis = 1 % sc.domain.dim();
  {
    const json params = json::parse(sc.params_json);
    if (params.contains("axis")) axis = params["axis"].get<int>();
  }

  ShapeResult result;
  result.t_used = t_used;
  result.mu_hat_used = mu;

  const std::size_t n_tasks = config.schedule.size() * static_cast<std::size_t>(config.replicates);
  result.records.resize(n_tasks);
  std::vector<std::vector<Vec>> overlay_ball(n_tasks);
  parallel_for(n_tasks, config.workers, [&](std::size_t task) {
    const std::size_t ni = task / static_cast<std::size_t>(config.replicates);
    const int rep = static_cast<int>(task % static_cast<std::size_t>(config.replicates));
    const double n = config.schedule[ni];
    const std::uint64_t s = Rng::derive(config.seed, "shape", ni, static_cast<std::uint64_t>(rep));
    const SampleBatch batch = sample_poisson(sc.domain, sc.density, n, s);
    if (batch.cloud.size() < 2) throw NumericalError("sample produced fewer than 2 particles");

    // Sample Fermat ball in scaled units: n^beta D < t.
    const double t_raw = t_used * std::pow(n, -beta.value);
    const std::vector<std::size_t> ball = fermat_ball(batch.cloud, alpha, center, t_raw);
    std::vector<char> in_ball(batch.cloud.size(), 0);
    for (std::size_t id : ball) in_ball[id] = 1;

    // Outer inclusion: every ball particle inside B(x, (1/mu + eps) t).
    double eps_out = 0.0;
    for (std::size_t id : ball) {
      const std::size_t node = oracle.snap(batch.cloud.point(id));
      if (!std::isfinite(field[node])) continue;
      eps_out = std::max(eps_out, field[node] / t_used - 1.0 / mu);
    }
    // Inner inclusion surrogate: grid nodes of the inner continuum ball
    // must have their nearest particle inside the sample ball.
    const SpatialIndex index(batch.cloud);
    double eps_in = 0.0;
    for (std::size_t node = 0; node < field.size(); ++node) {
      if (!(field[node] < t_used / mu)) continue;
      const Vec c = oracle.node_coords(node);
      if (!in_ball[index.nearest(c)]) {
        eps_in = std::max(eps_in, 1.0 / mu - field[node] / t_used);
      }
    }

    double r_plus = 0.0, r_minus = 0.0;
    for (std::size_t id : ball) {
      const double off = batch.cloud.coord(id, axis) - center[static_cast<std::size_t>(axis)];
      r_plus = std::max(r_plus, off);
      r_minus = std::max(r_minus, -off);
    }
    if (!(r_plus > 0.0) || !(r_minus > 0.0)) {
      throw NumericalError("run_shape: degenerate sample ball; increase t or n");
    }

    // The sandwich at this record's epsilon only certifies anything if
    // its outer continuum ball stays inside the domain.
    {
      const double limit = (1.0 / mu + std::max(eps_in, eps_out)) * t_used;
      for (std::size_t node = 0; node < field.size(); ++node) {
        if (!(field[node] < limit)) continue;
        const Vec c = oracle.node_coords(node);
        for (int j = 0; j < sc.domain.dim(); ++j) {
          const std::size_t sj = static_cast<std::size_t>(j);
          if (c[sj] - sc.domain.lo[sj] < oracle.h() || sc.domain.hi[sj] - c[sj] < oracle.h()) {
            throw NumericalError(
                "run_shape: outer continuum ball exits the domain; use smaller t");
          }
        }
      }
    }

    ShapeRecord r;
    r.n = n;
    r.replicate = rep;
    r.eps_in = eps_in;
    r.eps_out = eps_out;
    r.eps_star = std::max(eps_in, eps_out);
    r.ball_size = ball.size();
    r.axis_ratio = r_plus / r_minus;
    result.records[task] = std::move(r);
    if (sc.domain.dim() == 2) {
      auto& pts = overlay_ball[task];
      pts.reserve(ball.size());
      for (std::size_t id : ball) {
        const PointView p = batch.cloud.point(id);
        pts.push_back(Vec(p.begin(), p.end()));
      }
    }
  });

  for (std::size_t ni = 0; ni < config.schedule.size(); ++ni) {
    std::vector<double> eps, ax;
    for (const auto& r : result.records) {
      if (r.n == config.schedule[ni]) {
        eps.push_back(r.eps_star);
        ax.push_back(r.axis_ratio);
      }
    }
    result.eps_per_n.push_back(summarize(config.schedule[ni], std::move(eps)));
    result.axis_per_n.push_back(summarize(config.schedule[ni], std::move(ax)));
  }

  if (!config.out_dir.empty()) {
    ensure_out_dir(config.out_dir);
    CsvWriter csv(config.out_dir / "shape.csv", "shape", 1,
                  {"n", "replicate", "eps_star", "eps_in", "eps_out", "ball_size",
                   "axis_ratio", "wall_time_ms"});
    for (const auto& r : result.records) {
      csv.begin_row();
      csv.cell(r.n);
      csv.cell(static_cast<std::int64_t>(r.replicate));
      csv.cell(r.eps_star);
      csv.cell(r.eps_in);
      csv.cell(r.eps_out);
      csv.cell(static_cast<std::uint64_t>(r.ball_size));
      csv.cell(r.axis_ratio);
      csv.cell(0.0);
      csv.end_row();
    }
    csv.close();
    json extras{{"beta", beta.value}, {"t", t_used}, {"mu_hat", mu},
                {"oracle_h", oracle.h()}, {"axis", axis}};
    write_sidecar(config.out_dir, "shape", config, extras, elapsed_ms(t0));
    plot_per_n(config.out_dir / "shape.svg", result.eps_per_n, "sandwich epsilon", "#7a2a7a");
    if (sc.domain.dim() == 2) {
      SvgCanvas svg(sc.domain.lo[0], sc.domain.lo[1], sc.domain.hi[0], sc.domain.hi[1], 560, 560);
      for (std::size_t node = 0; node < field.size(); ++node) {
        if (field[node] < t_used / mu) {
          const Vec c = oracle.node_coords(node);
          svg.rect_px(c[0], c[1], 2.0, 2.0, "#bcd5ea");
        }
      }
      const std::size_t last = n_tasks - static_cast<std::size_t>(config.replicates);
      for (const auto& p : overlay_ball[last]) svg.circle(p[0], p[1], 1.5, "#b2451f");
      svg.circle(center[0], center[1], 4.0, "#000000");
      svg.save(config.out_dir / "shape_overlay.svg");
    }
  }
  return result;
}

// ---------------------------------------------------------------------
// run_knn_sufficiency

KnnResult run_knn_sufficiency(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  const std::string scenario_json =
      config.scenario_json.empty() ? std::string("{\"type\":\"uniform\"}") : config.scenario_json;
  const Alpha alpha(config.alpha);
  Scenario sc = make_scenario(scenario_json);

  KnnResult result;
  result.n_values = config.schedule;

  for (std::size_t ni = 0; ni < config.schedule.size(); ++ni) {
    const double n = config.schedule[ni];
    const std::uint64_t s = Rng::derive(config.seed, "knn_sufficiency", ni);
    const SampleBatch batch = sample_poisson(sc.domain, sc.density, n, s);
    const std::size_t n_pts = batch.cloud.size();
    if (n_pts < 16) throw NumericalError("run_knn_sufficiency: sample too small");

    std::vector<std::size_t> k_grid = config.k_grid;
    const std::size_t k_max_target = static_cast<std::size_t>(
        std::ceil(15.0 * std::log(static_cast<double>(n_pts))));
    if (k_grid.empty()) {
      for (std::size_t k = 2; k < k_max_target;
           k = std::max(k + 2, static_cast<std::size_t>(std::llround(k * 1.3)))) {
        k_grid.push_back(k);
      }
      k_grid.push_back(k_max_target);
    }
    for (std::size_t& k : k_grid) k = std::min(k, n_pts - 1);
    std::sort(k_grid.begin(), k_grid.end());
    k_grid.erase(std::unique(k_grid.begin(), k_grid.end()), k_grid.end());
    if (k_grid.front() < 1) throw ValidationError("config field 'knn.k_grid': k must be >= 1");

    // Pick sources/targets, compute exact rows, then sweep k over a
    // single graph built at the largest k (prefix property).
    Rng pick(Rng::derive(s, "pairs"));
    const int n_sources = std::min<int>(config.knn_sources, static_cast<int>(n_pts));
    const int per_source = std::max(1, config.knn_pairs / n_sources);
    std::vector<std::size_t> sources;
    while (sources.size() < static_cast<std::size_t>(n_sources)) {
      const std::size_t cand = pick.next_u64() % n_pts;
      if (std::find(sources.begin(), sources.end(), cand) == sources.end()) {
        sources.push_back(cand);
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t src : sources) {
      for (int q = 0; q < per_source; ++q) {
        std::size_t tgt = pick.next_u64() % n_pts;
        while (tgt == src) tgt = pick.next_u64() % n_pts;
        pairs.emplace_back(src, tgt);
      }
    }

    std::vector<std::vector<double>> exact_rows(sources.size());
    parallel_for(sources.size(), config.workers, [&](std::size_t i) {
      exact_rows[i] = exact_distances_from(batch.cloud, alpha, sources[i]);
    });

    const SpatialIndex index(batch.cloud);
    const KnnGraph graph =
        KnnGraph::build(batch.cloud, index, k_grid.back(), alpha, false, config.workers);

    // One Dijkstra per (source, k); rows keyed for determinism.
    std::vector<std::vector<double>> rows(sources.size() * k_grid.size());
    parallel_for(rows.size(), config.workers, [&](std::size_t slot) {
      const std::size_t si = slot / k_grid.size();
      const std::size_t ki = slot % k_grid.size();
      rows[slot] = restricted_distances_from(graph, sources[si], k_grid[ki]);
    });

    // Pathwise monotonicity is exact (k-prefix edge sets are nested);
    // a violation would mean a broken graph or search.
    for (std::size_t si = 0; si < sources.size(); ++si) {
      for (std::size_t ki = 1; ki < k_grid.size(); ++ki) {
        const auto& coarse = rows[si * k_grid.size() + ki - 1];
        const auto& fine = rows[si * k_grid.size() + ki];
        for (std::size_t t = 0; t < n_pts; ++t) {
          if (fine[t] > coarse[t]) {
            throw NumericalError("run_knn_sufficiency: restricted distance increased with k");
          }
        }
      }
    }

    for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
      int agree = 0;
      for (const auto& [src, tgt] : pairs) {
        const std::size_t si =
            static_cast<std::size_t>(std::find(sources.begin(), sources.end(), src) -
                                     sources.begin());
        const double exact = exact_rows[si][tgt];
        const double restricted = rows[si * k_grid.size() + ki][tgt];
        if (restricted <= exact * (1.0 + 1e-12)) ++agree;
      }
      KnnRecord r;
      r.n = n;
      r.k = k_grid[ki];
      r.agreement = static_cast<double>(agree) / static_cast<double>(pairs.size());
      r.pairs = static_cast<int>(pairs.size());
      result.records.push_back(r);
    }

    std::int64_t k_star = -1;
    for (std::size_t ki = 0; ki < k_grid.size(); ++ki) {
      const auto& r = result.records[result.records.size() - k_grid.size() + ki];
      if (r.agreement >= 1.0 - config.knn_epsilon) {
        k_star = static_cast<std::int64_t>(r.k);
        break;
      }
    }
    result.k_star.push_back(k_star);
  }

  // Least-squares fit k*(n) = c_hat ln(n/eps) + d_hat.
  {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < result.n_values.size(); ++i) {
      if (result.k_star[i] >= 0) {
        xs.push_back(std::log(result.n_values[i] / config.knn_epsilon));
        ys.push_back(static_cast<double>(result.k_star[i]));
      }
    }
    if (xs.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
      }
      const double m = static_cast<double>(xs.size());
      const double denom = m * sxx - sx * sx;
      if (std::abs(denom) > 1e-12) {
        result.c_hat = (m * sxy - sx * sy) / denom;
        result.d_hat = (sy - result.c_hat * sx) / m;
      }
    } else if (xs.size() == 1) {
      result.c_hat = ys[0] / xs[0];
    }
  }

  if (!config.out_dir.empty()) {
    ensure_out_dir(config.out_dir);
    CsvWriter csv(config.out_dir / "knn.csv", "knn", 1,
                  {"n", "k", "agreement", "pairs", "wall_time_ms"});
    for (const auto& r : result.records) {
      csv.begin_row();
      csv.cell(r.n);
      csv.cell(static_cast<std::uint64_t>(r.k));
      csv.cell(r.agreement);
      csv.cell(static_cast<std::int64_t>(r.pairs));
      csv.cell(0.0);
      csv.end_row();
    }
    csv.close();
    json extras{{"c_hat", result.c_hat}, {"d_hat", result.d_hat},
                {"epsilon", config.knn_epsilon}};
    json kstars = json::array();
    for (std::size_t i = 0; i < result.n_values.size(); ++i) {
      kstars.push_back(json{{"n", result.n_values[i]}, {"k_star", result.k_star[i]}});
    }
    extras["k_star"] = kstars;
    write_sidecar(config.out_dir, "knn", config, extras, elapsed_ms(t0));

    double k_max = 1.0;
    for (const auto& r : result.records) k_max = std::max(k_max, static_cast<double>(r.k));
    SvgCanvas svg(0.0, 0.0, k_max * 1.05, 1.05);
    const std::vector<std::string> colors = {"#1f6fb2", "#b2451f", "#2a7a2a", "#7a2a7a"};
    for (std::size_t i = 0; i < result.n_values.size(); ++i) {
      Polyline line;
      for (const auto& r : result.records) {
        if (r.n == result.n_values[i]) {
          line.push_back({static_cast<double>(r.k), r.agreement});
        }
      }
      svg.polyline(line, colors[i % colors.size()], 2.0);
      if (!line.empty()) {
        svg.text(line.back()[0], line.back()[1], "n=" + format_double(result.n_values[i]), 11,
                 "end");
      }
    }
    svg.axes("k", "agreement fraction");
    svg.save(config.out_dir / "knn.svg");
  }
  return result;
}

// ---------------------------------------------------------------------
// run_manifold

ManifoldResult run_manifold(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = Clock::now();
  const std::string manifold_json = config.manifold_json.empty()
                                        ? std::string("{\"type\":\"swiss_roll\"}")
                                        : config.manifold_json;
  const Alpha alpha(config.alpha);
  ManifoldScenario ms = make_manifold(manifold_json);
  check_isometry(ms.manifold, 100, Rng::derive(config.seed, "isometry"));

  const Beta beta_intrinsic = Beta::from_alpha(alpha, ms.manifold.intrinsic_dim);
  const Beta beta_ambient = Beta::from_alpha(alpha, ms.manifold.ambient_dim);

  const DomainSpec& pdom = ms.manifold.parameter_domain;
  Vec zx = config.query_x.empty() ? fraction_point(pdom, {0.15, 0.25, 0.5}) : config.query_x;
  Vec zy = config.query_y.empty() ? fraction_point(pdom, {0.85, 0.75, 0.5}) : config.query_y;
  const Vec x = ms.manifold.chart(zx);
  const Vec y = ms.manifold.chart(zy);

  // Parameter-space oracle: chart isometry makes it the manifold oracle.
  Scenario param_sc;
  param_sc.name = ms.name + "_chart";
  param_sc.params_json = ms.params_json;
  param_sc.domain = pdom;
  param_sc.density = ms.chart_density;
  const GridOracle oracle = build_oracle(param_sc, beta_intrinsic, config);
  const ContinuumResult cont = continuum_distance(oracle, zx, zy);
  if (cont.unreachable) {
    throw NumericalError("run_manifold: parameter oracle reports unreachable query pair");
  }

  ManifoldResult result;
  result.oracle_distance = cont.distance;

  const std::size_t n_tasks = config.schedule.size() * static_cast<std::size_t>(config.replicates);
  result.records.resize(n_tasks);
  parallel_for(n_tasks, config.workers, [&](std::size_t task) {
    const std::size_t ni = task / static_cast<std::size_t>(config.replicates);
    const int rep = static_cast<int>(task % static_cast<std::size_t>(config.replicates));
    const double n = config.schedule[ni];
    const std::uint64_t s =
        Rng::derive(config.seed, "manifold", ni, static_cast<std::uint64_t>(rep));
    const SampleBatch batch =
        sample_manifold(ms.manifold, ms.chart_density, static_cast<std::size_t>(n), s);
    const MethodResult m = distance_with_method(batch.cloud, alpha, x, y, config);
    ManifoldRecord r;
    r.n = n;
    r.replicate = rep;
    r.method = m.method;
    r.k = m.k;
    r.distance = m.res.distance;
    r.oracle_distance = cont.distance;
    r.ratio_intrinsic = std::pow(n, beta_intrinsic.value) * m.res.distance / cont.distance;
    r.ratio_ambient = std::pow(n, beta_ambient.value) * m.res.distance / cont.distance;
    result.records[task] = std::move(r);
  });

  for (std::size_t ni = 0; ni < config.schedule.size(); ++ni) {
    std::vector<double> ri, ra;
    for (const auto& r : result.records) {
      if (r.n == config.schedule[ni]) {
        ri.push_back(r.ratio_intrinsic);
        ra.push_back(r.ratio_ambient);
      }
    }
    result.intrinsic_per_n.push_back(summarize(config.schedule[ni], std::move(ri)));
    result.ambient_per_n.push_back(summarize(config.schedule[ni], std::move(ra)));
  }

  if (!config.out_dir.empty()) {
    ensure_out_dir(config.out_dir);
    CsvWriter csv(config.out_dir / "manifold.csv", "manifold", 1,
                  {"n", "replicate", "method", "k", "distance", "oracle_distance",
                   "ratio_intrinsic", "ratio_ambient", "wall_time_ms"});
    for (const auto& r : result.records) {
      csv.begin_row();
      csv.cell(r.n);
      csv.cell(static_cast<std::int64_t>(r.replicate));
      csv.cell(r.method);
      csv.cell(static_cast<std::uint64_t>(r.k));
      csv.cell(r.distance);
      csv.cell(r.oracle_distance);
      csv.cell(r.ratio_intrinsic);
      csv.cell(r.ratio_ambient);
      csv.cell(0.0);
      csv.end_row();
    }
    csv.close();
    json extras{{"beta_intrinsic", beta_intrinsic.value},
                {"beta_ambient", beta_ambient.value},
                {"oracle_distance", cont.distance}};
    write_sidecar(config.out_dir, "manifold", config, extras, elapsed_ms(t0));
    plot_per_n(config.out_dir / "manifold.svg", result.intrinsic_per_n,
               "n^beta D / oracle (intrinsic)", "#1f6fb2");
  }
  return result;
}

}  // namespace fermat
