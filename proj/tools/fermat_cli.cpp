// Command-line front end: sampling, distances, balls, landmark bounds,
// continuum oracle queries, and the experiment harness.
//
// Exit codes: 0 success, 2 validation/config error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fermat/catalog.hpp"
#include "fermat/csvio.hpp"
#include "fermat/errors.hpp"
#include "fermat/experiments.hpp"
#include "fermat/grid_oracle.hpp"
#include "fermat/knn_graph.hpp"
#include "fermat/matrix_io.hpp"
#include "fermat/rng.hpp"
#include "fermat/sampler.hpp"
#include "fermat/svg.hpp"
#include "fermat/thread_pool.hpp"
#include "fermat/version.hpp"

namespace {

using fermat::Vec;
using nlohmann::json;

/// --config accepts inline JSON or a path to a JSON file.
json load_config(const std::string& arg) {
  if (arg.empty()) return json::object();
  std::string text = arg;
  if (arg.front() != '{' && arg.front() != '[') {
    text = fermat::read_text_file(arg);
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw fermat::ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw fermat::ValidationError("config: expected a JSON object");
  return j;
}

Vec parse_point(const std::string& text, const char* flag) {
  Vec p;
  try {
    p = fermat::parse_csv_doubles(text);
  } catch (const fermat::ValidationError&) {
    throw fermat::ValidationError(std::string(flag) + ": expected comma-separated numbers");
  }
  for (double v : p) {
    if (!std::isfinite(v)) {
      throw fermat::ValidationError(std::string(flag) + ": coordinates must be finite");
    }
  }
  return p;
}

std::string config_string(const json& cfg, const char* key, const std::string& fallback) {
  if (!cfg.contains(key)) return fallback;
  if (cfg[key].is_object()) return cfg[key].dump();
  if (cfg[key].is_string()) return cfg[key].get<std::string>();
  throw fermat::ValidationError(std::string("config field '") + key + "': expected object or string");
}

double config_number(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number()) {
    throw fermat::ValidationError(std::string("config field '") + key + "': expected a number");
  }
  return cfg[key].get<double>();
}

void write_path_json(const std::filesystem::path& out, const std::vector<std::size_t>& indices) {
  json arr = json::array();
  for (std::size_t i : indices) arr.push_back(i);
  fermat::write_text_file(out, arr.dump() + "\n");
}

void write_points_svg(const std::filesystem::path& out, const std::vector<Vec>& pts,
                      const fermat::Polyline& line) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  auto grow = [&](const Vec& p) {
    x0 = std::min(x0, p[0]);
    y0 = std::min(y0, p[1]);
    x1 = std::max(x1, p[0]);
    y1 = std::max(y1, p[1]);
  };
  for (const auto& p : pts) grow(p);
  for (const auto& p : line) grow(p);
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  const double padx = 0.05 * (x1 - x0), pady = 0.05 * (y1 - y0);
  fermat::SvgCanvas svg(x0 - padx, y0 - pady, x1 + padx, y1 + pady, 560, 560);
  for (const auto& p : pts) svg.circle(p[0], p[1], 1.5, "#1f6fb2");
  if (!line.empty()) svg.polyline(line, "#b2451f", 2.0);
  svg.save(out);
}

// -------------------------------------------------------------------
// sample

int cmd_sample(const std::string& config_arg, const std::string& scenario_arg,
               const std::string& mode, double n, std::uint64_t seed,
               const std::string& out) {
  const json cfg = load_config(config_arg);
  const std::string scenario_json =
      !scenario_arg.empty() ? scenario_arg : config_string(cfg, "scenario", "");
  if (scenario_json.empty()) {
    throw fermat::ValidationError("config field 'scenario': required (or pass --scenario)");
  }
  if (out.empty()) throw fermat::ValidationError("--out: output CSV path required");
  if (!(n > 0.0)) n = config_number(cfg, "n", 0.0);
  if (!(n > 0.0)) throw fermat::ValidationError("config field 'n': must be positive");

  fermat::SampleBatch batch = [&]() {
    if (mode == "poisson") {
      fermat::Scenario sc = fermat::make_scenario(scenario_json);
      return fermat::sample_poisson(sc.domain, sc.density, n, seed);
    }
    if (mode == "iid") {
      fermat::Scenario sc = fermat::make_scenario(scenario_json);
      return fermat::sample_iid(sc.domain, sc.density, static_cast<std::size_t>(n), seed);
    }
    if (mode == "manifold") {
      fermat::ManifoldScenario ms = fermat::make_manifold(scenario_json);
      fermat::check_isometry(ms.manifold, 32, fermat::Rng::derive(seed, "isometry"));
      return fermat::sample_manifold(ms.manifold, ms.chart_density,
                                     static_cast<std::size_t>(n), seed);
    }
    throw fermat::ValidationError("--mode: expected poisson, iid, or manifold");
  }();

  batch.cloud.save_csv(out);
  json sidecar{
      {"seed", batch.seed},
      {"provenance", fermat::provenance_name(batch.provenance)},
      {"n_target", batch.n_target},
      {"count", batch.cloud.size()},
      {"dim", batch.cloud.dim()},
      {"scenario", json::parse(scenario_json)},
      {"library_version", fermat::kVersion},
  };
  fermat::write_text_file(std::filesystem::path(out).string() + ".meta.json",
                          sidecar.dump(2) + "\n");
  if (batch.parameter_cloud) {
    batch.parameter_cloud->save_csv(std::filesystem::path(out).string() + ".params.csv");
  }
  std::cout << "count=" << batch.cloud.size() << " dim=" << batch.cloud.dim() << '\n';
  return 0;
}

// -------------------------------------------------------------------
// dist / knn-dist

int cmd_dist(const std::string& cloud_path, double alpha_v, const std::string& x_s,
             const std::string& y_s, double scaled_n, const std::string& out) {
  const fermat::PointCloud cloud = fermat::PointCloud::load_csv(cloud_path);
  const fermat::Alpha alpha(alpha_v);
  const Vec x = parse_point(x_s, "--x");
  const Vec y = parse_point(y_s, "--y");
  fermat::DistanceResult res = fermat::exact_distance(cloud, alpha, x, y);
  if (scaled_n > 0.0) {
    const double beta = (alpha_v - 1.0) / cloud.dim();
    res.scaled = std::pow(scaled_n, beta) * res.distance;
  }
  std::cout << "distance=" << fermat::format_double(res.distance) << '\n';
  if (res.scaled) std::cout << "scaled=" << fermat::format_double(*res.scaled) << '\n';
  std::cout << "hops=" << (res.path.particle_indices.size() - 1)
            << " arc_length=" << fermat::format_double(res.path.arc_length) << '\n';
  if (!out.empty()) write_path_json(out, res.path.particle_indices);
  return 0;
}

int cmd_knn_dist(const std::string& cloud_path, double alpha_v, std::size_t k,
                 const std::string& x_s, const std::string& y_s, bool mutual,
                 const std::string& out) {
  const fermat::PointCloud cloud = fermat::PointCloud::load_csv(cloud_path);
  const fermat::Alpha alpha(alpha_v);
  const Vec x = parse_point(x_s, "--x");
  const Vec y = parse_point(y_s, "--y");
  const fermat::SpatialIndex index(cloud);
  const fermat::KnnGraph graph = fermat::KnnGraph::build(cloud, index, k, alpha, mutual);
  const fermat::DistanceResult res = fermat::restricted_distance(graph, cloud, alpha, x, y);
  if (res.unreachable) {
    std::cout << "distance=inf unreachable=true\n";
    return 0;
  }
  std::cout << "distance=" << fermat::format_double(res.distance) << '\n';
  std::cout << "hops=" << (res.path.particle_indices.size() - 1)
            << " arc_length=" << fermat::format_double(res.path.arc_length) << '\n';
  if (!out.empty()) write_path_json(out, res.path.particle_indices);
  return 0;
}

// -------------------------------------------------------------------
// all-pairs

int cmd_all_pairs(const std::string& cloud_path, double alpha_v, std::size_t k,
                  const std::string& symmetrize, const std::string& format,
                  int workers, const std::string& out) {
  if (out.empty()) throw fermat::ValidationError("--out: output path required");
  const fermat::PointCloud cloud = fermat::PointCloud::load_csv(cloud_path);
  const fermat::Alpha alpha(alpha_v);
  const fermat::SpatialIndex index(cloud);
  const fermat::KnnGraph graph = fermat::KnnGraph::build(cloud, index, k, alpha, false, workers);
  const std::vector<double> matrix =
      fermat::all_pairs_restricted(graph, fermat::symmetrize_from_name(symmetrize), workers);
  if (format == "csv") {
    fermat::save_matrix_csv(matrix, cloud.size(), out);
  } else if (format == "bin") {
    fermat::save_matrix_binary(matrix, cloud.size(), out);
  } else {
    throw fermat::ValidationError("--format: expected csv or bin");
  }
  std::size_t unreachable = 0;
  for (double v : matrix) {
    if (!std::isfinite(v)) ++unreachable;
  }
  std::cout << "n=" << cloud.size() << " unreachable_entries=" << unreachable << '\n';
  return 0;
}

// -------------------------------------------------------------------
// landmarks

int cmd_landmarks(const std::string& cloud_path, double alpha_v, int count,
                  std::size_t k, const std::string& pairs_arg, int random_pairs,
                  std::uint64_t seed, int workers, const std::string& out) {
  if (out.empty()) throw fermat::ValidationError("--out: output path required");
  const fermat::PointCloud cloud = fermat::PointCloud::load_csv(cloud_path);
  const fermat::Alpha alpha(alpha_v);
  const std::size_t n = cloud.size();
  if (count < 1 || static_cast<std::size_t>(count) > n) {
    throw fermat::ValidationError("--count: landmark count must be in 1..n");
  }

  fermat::Rng rng(fermat::Rng::derive(seed, "landmarks"));
  std::vector<std::size_t> landmarks;
  while (landmarks.size() < static_cast<std::size_t>(count)) {
    const std::size_t cand = rng.next_u64() % n;
    if (std::find(landmarks.begin(), landmarks.end(), cand) == landmarks.end()) {
      landmarks.push_back(cand);
    }
  }

  std::vector<std::vector<double>> rows(landmarks.size());
  if (k == 0) {
    fermat::parallel_for(landmarks.size(), workers, [&](std::size_t i) {
      rows[i] = fermat::exact_distances_from(cloud, alpha, landmarks[i]);
    });
  } else {
    // Mutualized graph: an undirected metric, so the bounds stay valid
    // for the restricted distance it induces.
    const fermat::SpatialIndex index(cloud);
    const fermat::KnnGraph graph = fermat::KnnGraph::build(cloud, index, k, alpha, true, workers);
    fermat::parallel_for(landmarks.size(), workers, [&](std::size_t i) {
      rows[i] = fermat::restricted_distances_from(graph, landmarks[i]);
    });
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (!pairs_arg.empty()) {
    std::size_t start = 0;
    const std::string& s = pairs_arg;
    while (start < s.size()) {
      const std::size_t comma = s.find(',', start);
      const std::string tok =
          comma == std::string::npos ? s.substr(start) : s.substr(start, comma - start);
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos) {
        throw fermat::ValidationError("--pairs: expected i:j entries");
      }
      pairs.emplace_back(std::stoull(tok.substr(0, colon)), std::stoull(tok.substr(colon + 1)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  } else {
    const int m = random_pairs > 0 ? random_pairs : 100;
    for (int q = 0; q < m; ++q) {
      const std::size_t i = rng.next_u64() % n;
      std::size_t j = rng.next_u64() % n;
      while (j == i) j = rng.next_u64() % n;
      pairs.emplace_back(i, j);
    }
  }

  std::ofstream of(out);
  if (!of) throw fermat::ValidationError("cannot write file: " + out);
  of << "i,j,lower,upper\n";
  for (const auto& [i, j] : pairs) {
    if (i >= n || j >= n) throw fermat::ValidationError("--pairs: index out of range");
    const fermat::LandmarkBounds b = fermat::landmark_bounds(rows, i, j);
    of << i << ',' << j << ',' << fermat::format_double(b.lower) << ','
       << fermat::format_double(b.upper) << '\n';
  }
  std::cout << "landmarks=" << landmarks.size() << " pairs=" << pairs.size() << '\n';
  return 0;
}

// -------------------------------------------------------------------
// ball

int cmd_ball(const std::string& cloud_path, double alpha_v, const std::string& x_s,
             double t, const std::string& out, const std::string& svg) {
  if (out.empty()) throw fermat::ValidationError("--out: output path required");
  const fermat::PointCloud cloud = fermat::PointCloud::load_csv(cloud_path);
  const fermat::Alpha alpha(alpha_v);
  const Vec x = parse_point(x_s, "--x");
  const std::vector<std::size_t> ball = fermat::fermat_ball(cloud, alpha, x, t);
  std::ofstream of(out);
  if (!of) throw fermat::ValidationError("cannot write file: " + out);
  for (std::size_t id : ball) {
    of << id;
    for (int j = 0; j < cloud.dim(); ++j) of << ',' << fermat::format_double(cloud.coord(id, j));
    of << '\n';
  }
  if (!svg.empty()) {
    if (cloud.dim() != 2) throw fermat::ValidationError("--svg: only available for 2-D clouds");
    std::vector<Vec> pts;
    for (std::size_t id : ball) {
      pts.push_back(Vec{cloud.coord(id, 0), cloud.coord(id, 1)});
    }
    write_points_svg(svg, pts, {});
  }
  std::cout << "ball_size=" << ball.size() << '\n';
  return 0;
}

// -------------------------------------------------------------------
// oracle

int cmd_oracle_build(const std::string& config_arg, const std::string& scenario_arg,
                     double alpha_v, double beta_v, double h, int r, std::size_t cap,
                     int workers, const std::string& out) {
  if (out.empty()) throw fermat::ValidationError("--out: output path required");
  const json cfg = load_config(config_arg);
  const std::string scenario_json =
      !scenario_arg.empty() ? scenario_arg : config_string(cfg, "scenario", "");
  if (scenario_json.empty()) {
    throw fermat::ValidationError("config field 'scenario': required (or pass --scenario)");
  }
  fermat::Scenario sc = fermat::make_scenario(scenario_json);
  fermat::Beta beta = beta_v >= 0.0
                          ? fermat::Beta(beta_v)
                          : fermat::Beta::from_alpha(fermat::Alpha(alpha_v), sc.domain.dim());
  fermat::GridOracleConfig oc;
  oc.h = h > 0.0 ? h : std::pow(sc.domain.box_volume() / (sc.domain.dim() == 1 ? 4096.0 : 262144.0),
                                1.0 / sc.domain.dim());
  oc.stencil_radius = r;
  oc.node_cap = cap;
  oc.workers = workers;
  const fermat::GridOracle oracle = fermat::GridOracle::build(sc.domain, sc.density, beta, oc,
                                                              sc.params_json);
  oracle.save(out);
  std::cout << "nodes=" << oracle.node_count() << " edges=" << oracle.edge_count()
            << " h=" << fermat::format_double(oracle.h()) << '\n';
  return 0;
}

int cmd_oracle_dist(const std::string& oracle_path, const std::string& x_s,
                    const std::string& y_s, const std::string& out) {
  const fermat::GridOracle oracle = fermat::GridOracle::load(oracle_path);
  const fermat::ContinuumResult res =
      fermat::continuum_distance(oracle, parse_point(x_s, "--x"), parse_point(y_s, "--y"));
  if (res.unreachable) {
    std::cout << "distance=inf unreachable=true\n";
    return 0;
  }
  std::cout << "distance=" << fermat::format_double(res.distance) << '\n';
  if (!out.empty()) {
    std::ofstream of(out);
    if (!of) throw fermat::ValidationError("cannot write file: " + out);
    for (const auto& p : res.geodesic) {
      for (std::size_t j = 0; j < p.size(); ++j) of << (j ? "," : "") << fermat::format_double(p[j]);
      of << '\n';
    }
  }
  return 0;
}

int cmd_oracle_geodesic(const std::string& oracle_path, const std::string& x_s,
                        const std::string& y_s, const std::string& out,
                        const std::string& svg) {
  if (out.empty()) throw fermat::ValidationError("--out: output path required");
  const fermat::GridOracle oracle = fermat::GridOracle::load(oracle_path);
  const fermat::Polyline geo =
      fermat::continuum_geodesic(oracle, parse_point(x_s, "--x"), parse_point(y_s, "--y"));
  std::ofstream of(out);
  if (!of) throw fermat::ValidationError("cannot write file: " + out);
  for (const auto& p : geo) {
    for (std::size_t j = 0; j < p.size(); ++j) of << (j ? "," : "") << fermat::format_double(p[j]);
    of << '\n';
  }
  if (!svg.empty()) {
    if (oracle.dim() != 2) throw fermat::ValidationError("--svg: only available in 2-D");
    write_points_svg(svg, {}, geo);
  }
  std::cout << "vertices=" << geo.size() << '\n';
  return 0;
}

int cmd_oracle_ball(const std::string& oracle_path, const std::string& x_s, double t,
                    const std::string& out, const std::string& svg) {
  if (out.empty()) throw fermat::ValidationError("--out: output path required");
  const fermat::GridOracle oracle = fermat::GridOracle::load(oracle_path);
  const std::vector<std::size_t> ball =
      fermat::continuum_ball(oracle, parse_point(x_s, "--x"), t);
  std::ofstream of(out);
  if (!of) throw fermat::ValidationError("cannot write file: " + out);
  std::vector<Vec> pts;
  for (std::size_t id : ball) {
    const Vec c = oracle.node_coords(id);
    of << id;
    for (double v : c) of << ',' << fermat::format_double(v);
    of << '\n';
    if (oracle.dim() == 2) pts.push_back(c);
  }
  if (!svg.empty()) {
    if (oracle.dim() != 2) throw fermat::ValidationError("--svg: only available in 2-D");
    write_points_svg(svg, pts, {});
  }
  std::cout << "ball_nodes=" << ball.size() << '\n';
  return 0;
}

// -------------------------------------------------------------------
// experiments

struct ExperimentFlags {
  std::string config_arg;
  std::string scenario;
  std::string manifold;
  double alpha = -1.0;
  int dim = -1;
  std::string schedule;
  int reps = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int workers = -1;
  double mu_hat = -1.0;
};

fermat::ExperimentConfig merge_config(const ExperimentFlags& f) {
  json base = load_config(f.config_arg);
  fermat::ExperimentConfig cfg = fermat::ExperimentConfig::from_json(base.dump());
  if (!f.scenario.empty()) cfg.scenario_json = f.scenario;
  if (!f.manifold.empty()) cfg.manifold_json = f.manifold;
  if (f.alpha >= 0.0) cfg.alpha = f.alpha;
  if (f.dim > 0) cfg.dim = f.dim;
  if (!f.schedule.empty()) cfg.schedule = fermat::parse_csv_doubles(f.schedule);
  if (f.reps > 0) cfg.replicates = f.reps;
  if (f.seed_set) cfg.seed = f.seed;
  if (!f.out.empty()) cfg.out_dir = f.out;
  if (f.workers >= 0) cfg.workers = f.workers;
  if (f.mu_hat >= 0.0) cfg.mu_hat = f.mu_hat;
  cfg.validate();
  return cfg;
}

void print_per_n(const std::vector<fermat::SummaryStat>& stats, const char* label) {
  for (const auto& s : stats) {
    std::cout << label << " n=" << fermat::format_double(s.n)
              << " mean=" << fermat::format_double(s.mean)
              << " median=" << fermat::format_double(s.median)
              << " iqr=" << fermat::format_double(s.iqr()) << '\n';
  }
}

int cmd_experiment(const std::string& kind, const ExperimentFlags& flags) {
  const fermat::ExperimentConfig cfg = merge_config(flags);
  if (kind == "mu") {
    print_per_n(estimate_mu(cfg).per_n, "mu");
  } else if (kind == "convergence") {
    const auto res = fermat::run_convergence(cfg);
    std::cout << "oracle_distance=" << fermat::format_double(res.oracle_distance) << '\n';
    print_per_n(res.ratio_per_n, "ratio");
  } else if (kind == "geodesic") {
    print_per_n(fermat::run_geodesic_convergence(cfg).curve_per_n, "curve_dist");
  } else if (kind == "shape") {
    const auto res = fermat::run_shape(cfg);
    std::cout << "t=" << fermat::format_double(res.t_used)
              << " mu_hat=" << fermat::format_double(res.mu_hat_used) << '\n';
    print_per_n(res.eps_per_n, "eps");
    print_per_n(res.axis_per_n, "axis_ratio");
  } else if (kind == "knn") {
    const auto res = fermat::run_knn_sufficiency(cfg);
    for (std::size_t i = 0; i < res.n_values.size(); ++i) {
      std::cout << "k_star n=" << fermat::format_double(res.n_values[i]) << " k="
                << res.k_star[i] << '\n';
    }
    std::cout << "fit c_hat=" << fermat::format_double(res.c_hat)
              << " d_hat=" << fermat::format_double(res.d_hat) << '\n';
  } else if (kind == "manifold") {
    const auto res = fermat::run_manifold(cfg);
    std::cout << "oracle_distance=" << fermat::format_double(res.oracle_distance) << '\n';
    print_per_n(res.intrinsic_per_n, "ratio_intrinsic");
    print_per_n(res.ambient_per_n, "ratio_ambient");
  } else {
    throw fermat::ValidationError("unknown experiment '" + kind + "'");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fermat: power-weighted shortest-path distances on point clouds"};
  app.set_version_flag("--version", fermat::kVersion);
  app.require_subcommand(1);

  try {
    // ---- sample
    auto* sample = app.add_subcommand("sample", "Generate a point cloud (CSV + sidecar)");
    std::string s_config, s_scenario, s_mode = "poisson", s_out;
    double s_n = 0.0;
    std::uint64_t s_seed = 0;
    sample->add_option("--config", s_config, "JSON config (inline or file)");
    sample->add_option("--scenario", s_scenario, "scenario JSON object");
    sample->add_option("--mode", s_mode, "poisson | iid | manifold");
    sample->add_option("--n", s_n, "intensity multiplier / sample count");
    sample->add_option("--seed", s_seed, "RNG seed");
    sample->add_option("--out", s_out, "output CSV path");

    // ---- dist
    auto* dist = app.add_subcommand("dist", "Exact sample Fermat distance");
    std::string d_config, d_cloud, d_x, d_y, d_out;
    double d_alpha = 2.0, d_scaled_n = 0.0;
    std::uint64_t d_seed = 0;
    dist->add_option("--config", d_config, "JSON config (inline or file)");
    dist->add_option("--cloud", d_cloud, "point cloud CSV")->required();
    dist->add_option("--alpha", d_alpha, "path-cost exponent");
    dist->add_option("--x", d_x, "query point, comma separated")->required();
    dist->add_option("--y", d_y, "query point, comma separated")->required();
    dist->add_option("--scaled-n", d_scaled_n, "also report n^beta * D for this n");
    dist->add_option("--seed", d_seed, "RNG seed (unused)");
    dist->add_option("--out", d_out, "write optimal path as JSON index array");

    // ---- knn-dist
    auto* kdist = app.add_subcommand("knn-dist", "kNN-restricted Fermat distance");
    std::string kd_config, kd_cloud, kd_x, kd_y, kd_out;
    double kd_alpha = 2.0;
    std::size_t kd_k = 10;
    bool kd_mutual = false;
    std::uint64_t kd_seed = 0;
    kdist->add_option("--config", kd_config, "JSON config (inline or file)");
    kdist->add_option("--cloud", kd_cloud, "point cloud CSV")->required();
    kdist->add_option("--alpha", kd_alpha, "path-cost exponent");
    kdist->add_option("--k", kd_k, "neighbors per particle");
    kdist->add_flag("--mutual", kd_mutual, "mutualize the kNN graph (undirected union)");
    kdist->add_option("--x", kd_x, "query point")->required();
    kdist->add_option("--y", kd_y, "query point")->required();
    kdist->add_option("--seed", kd_seed, "RNG seed (unused)");
    kdist->add_option("--out", kd_out, "write path as JSON index array");

    // ---- all-pairs
    auto* ap = app.add_subcommand("all-pairs", "All-pairs restricted distance matrix");
    std::string ap_config, ap_cloud, ap_sym = "none", ap_format = "csv", ap_out;
    double ap_alpha = 2.0;
    std::size_t ap_k = 10;
    int ap_workers = 0;
    std::uint64_t ap_seed = 0;
    ap->add_option("--config", ap_config, "JSON config (inline or file)");
    ap->add_option("--cloud", ap_cloud, "point cloud CSV")->required();
    ap->add_option("--alpha", ap_alpha, "path-cost exponent");
    ap->add_option("--k", ap_k, "neighbors per particle");
    ap->add_option("--symmetrize", ap_sym, "none | min | max");
    ap->add_option("--format", ap_format, "csv | bin");
    ap->add_option("--workers", ap_workers, "worker threads (0 = auto)");
    ap->add_option("--seed", ap_seed, "RNG seed (unused)");
    ap->add_option("--out", ap_out, "output path");

    // ---- landmarks
    auto* lm = app.add_subcommand("landmarks", "Landmark lower/upper distance bounds");
    std::string lm_config, lm_cloud, lm_pairs, lm_out;
    double lm_alpha = 2.0;
    int lm_count = 20, lm_random = 0, lm_workers = 0;
    std::size_t lm_k = 0;
    std::uint64_t lm_seed = 0;
    lm->add_option("--config", lm_config, "JSON config (inline or file)");
    lm->add_option("--cloud", lm_cloud, "point cloud CSV")->required();
    lm->add_option("--alpha", lm_alpha, "path-cost exponent");
    lm->add_option("--count", lm_count, "number of landmarks");
    lm->add_option("--k", lm_k, "restricted graph k (0 = exact distances)");
    lm->add_option("--pairs", lm_pairs, "explicit i:j pairs, comma separated");
    lm->add_option("--pairs-random", lm_random, "number of random pairs");
    lm->add_option("--workers", lm_workers, "worker threads (0 = auto)");
    lm->add_option("--seed", lm_seed, "RNG seed");
    lm->add_option("--out", lm_out, "output CSV (i,j,lower,upper)");

    // ---- ball
    auto* ball = app.add_subcommand("ball", "Sample Fermat ball around a point");
    std::string b_config, b_cloud, b_x, b_out, b_svg;
    double b_alpha = 2.0, b_t = 1.0;
    std::uint64_t b_seed = 0;
    ball->add_option("--config", b_config, "JSON config (inline or file)");
    ball->add_option("--cloud", b_cloud, "point cloud CSV")->required();
    ball->add_option("--alpha", b_alpha, "path-cost exponent");
    ball->add_option("--x", b_x, "center point")->required();
    ball->add_option("--t", b_t, "distance threshold")->required();
    ball->add_option("--seed", b_seed, "RNG seed (unused)");
    ball->add_option("--out", b_out, "output CSV (index,coords)");
    ball->add_option("--svg", b_svg, "optional SVG overlay (2-D)");

    // ---- oracle
    auto* oracle = app.add_subcommand("oracle", "Continuum oracle operations");
    oracle->require_subcommand(1);

    auto* ob = oracle->add_subcommand("build", "Build and save a grid oracle");
    std::string ob_config, ob_scenario, ob_out;
    double ob_alpha = 2.0, ob_beta = -1.0, ob_h = 0.0;
    int ob_r = 3, ob_workers = 0;
    std::size_t ob_cap = 4'000'000;
    std::uint64_t ob_seed = 0;
    ob->add_option("--config", ob_config, "JSON config (inline or file)");
    ob->add_option("--scenario", ob_scenario, "scenario JSON object");
    ob->add_option("--alpha", ob_alpha, "exponent (beta = (alpha-1)/dim)");
    ob->add_option("--beta", ob_beta, "override beta directly");
    ob->add_option("--spacing", ob_h, "grid spacing h (0 = auto)");
    ob->add_option("--r", ob_r, "stencil Chebyshev radius");
    ob->add_option("--cap", ob_cap, "node cap");
    ob->add_option("--workers", ob_workers, "worker threads (0 = auto)");
    ob->add_option("--seed", ob_seed, "RNG seed (unused)");
    ob->add_option("--out", ob_out, "oracle output file");

    auto* od = oracle->add_subcommand("dist", "Continuum distance between points");
    std::string od_config, od_oracle, od_x, od_y, od_out;
    std::uint64_t od_seed = 0;
    od->add_option("--config", od_config, "JSON config (inline or file)");
    od->add_option("--oracle", od_oracle, "oracle file")->required();
    od->add_option("--x", od_x, "query point")->required();
    od->add_option("--y", od_y, "query point")->required();
    od->add_option("--seed", od_seed, "RNG seed (unused)");
    od->add_option("--out", od_out, "write geodesic vertices CSV");

    auto* og = oracle->add_subcommand("geodesic", "Continuum geodesic polyline");
    std::string og_config, og_oracle, og_x, og_y, og_out, og_svg;
    std::uint64_t og_seed = 0;
    og->add_option("--config", og_config, "JSON config (inline or file)");
    og->add_option("--oracle", og_oracle, "oracle file")->required();
    og->add_option("--x", og_x, "query point")->required();
    og->add_option("--y", og_y, "query point")->required();
    og->add_option("--seed", og_seed, "RNG seed (unused)");
    og->add_option("--out", og_out, "geodesic CSV output");
    og->add_option("--svg", og_svg, "optional SVG (2-D)");

    auto* obl = oracle->add_subcommand("ball", "Continuum ball node set");
    std::string obl_config, obl_oracle, obl_x, obl_out, obl_svg;
    double obl_t = 1.0;
    std::uint64_t obl_seed = 0;
    obl->add_option("--config", obl_config, "JSON config (inline or file)");
    obl->add_option("--oracle", obl_oracle, "oracle file")->required();
    obl->add_option("--x", obl_x, "center point")->required();
    obl->add_option("--t", obl_t, "distance threshold")->required();
    obl->add_option("--seed", obl_seed, "RNG seed (unused)");
    obl->add_option("--out", obl_out, "output CSV (node,coords)");
    obl->add_option("--svg", obl_svg, "optional SVG (2-D)");

    // ---- experiment
    auto* exp = app.add_subcommand("experiment", "Monte Carlo experiment harness");
    exp->require_subcommand(1);
    const std::vector<std::string> kinds = {"mu", "convergence", "geodesic",
                                            "shape", "knn", "manifold"};
    std::vector<std::pair<CLI::App*, std::shared_ptr<ExperimentFlags>>> exp_subs;
    for (const auto& kind : kinds) {
      auto* sub = exp->add_subcommand(kind, "Run the " + kind + " experiment");
      auto flags = std::make_shared<ExperimentFlags>();
      sub->add_option("--config", flags->config_arg, "JSON config (inline or file)");
      sub->add_option("--scenario", flags->scenario, "scenario JSON override");
      sub->add_option("--manifold", flags->manifold, "manifold JSON override");
      sub->add_option("--alpha", flags->alpha, "path-cost exponent");
      sub->add_option("--dim", flags->dim, "dimension (mu experiment)");
      sub->add_option("--schedule", flags->schedule, "comma-separated n values");
      sub->add_option("--reps", flags->reps, "replicates per n");
      sub->add_option("--seed", flags->seed, "RNG seed")->each([flags](const std::string&) {
        flags->seed_set = true;
      });
      sub->add_option("--out", flags->out, "output directory");
      sub->add_option("--workers", flags->workers, "worker threads (0 = auto)");
      sub->add_option("--mu-hat", flags->mu_hat, "precomputed mu (shape experiment)");
      exp_subs.emplace_back(sub, flags);
    }

    app.parse(argc, argv);

    if (sample->parsed()) return cmd_sample(s_config, s_scenario, s_mode, s_n, s_seed, s_out);
    if (dist->parsed()) return cmd_dist(d_cloud, d_alpha, d_x, d_y, d_scaled_n, d_out);
    if (kdist->parsed()) {
      return cmd_knn_dist(kd_cloud, kd_alpha, kd_k, kd_x, kd_y, kd_mutual, kd_out);
    }
    if (ap->parsed()) {
      return cmd_all_pairs(ap_cloud, ap_alpha, ap_k, ap_sym, ap_format, ap_workers, ap_out);
    }
    if (lm->parsed()) {
      return cmd_landmarks(lm_cloud, lm_alpha, lm_count, lm_k, lm_pairs, lm_random, lm_seed,
                           lm_workers, lm_out);
    }
    if (ball->parsed()) return cmd_ball(b_cloud, b_alpha, b_x, b_t, b_out, b_svg);
    if (oracle->parsed()) {
      if (ob->parsed()) {
        return cmd_oracle_build(ob_config, ob_scenario, ob_alpha, ob_beta, ob_h, ob_r, ob_cap,
                                ob_workers, ob_out);
      }
      if (od->parsed()) return cmd_oracle_dist(od_oracle, od_x, od_y, od_out);
      if (og->parsed()) return cmd_oracle_geodesic(og_oracle, og_x, og_y, og_out, og_svg);
      if (obl->parsed()) return cmd_oracle_ball(obl_oracle, obl_x, obl_t, obl_out, obl_svg);
    }
    if (exp->parsed()) {
      for (std::size_t i = 0; i < exp_subs.size(); ++i) {
        if (exp_subs[i].first->parsed()) return cmd_experiment(kinds[i], *exp_subs[i].second);
      }
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  } catch (const fermat::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fermat::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
