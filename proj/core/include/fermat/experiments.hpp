#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fermat/curve_metric.hpp"
#include "fermat/geometry.hpp"

namespace fermat {

/// One configuration type shared by every experiment; unused fields are
/// ignored by drivers that do not need them. Parsed from JSON by
/// from_json (unknown fields rejected to catch typos), validated by
/// validate().
struct ExperimentConfig {
  std::string scenario_json;  // catalog density/domain (JSON object text)
  std::string manifold_json;  // catalog manifold (manifold experiment)
  double alpha = 2.0;
  int dim = 2;                         // mu experiment dimension
  std::vector<double> schedule = {1000, 4000, 16000};  // intensities n
  int replicates = 16;
  std::uint64_t seed = 0;
  Vec query_x, query_y;     // empty -> per-experiment default
  double exact_threshold = 20000;  // restricted path search above this n
  double knn_c = 10.0;             // k = ceil(knn_c * ln n) when restricted
  double oracle_h = 0.0;           // 0 -> auto from domain volume
  int oracle_r = 3;
  int workers = 0;                 // 0 -> FERMAT_WORKERS or hardware
  std::filesystem::path out_dir;   // empty -> no files written

  // shape experiment
  double shape_t = 0.0;              // 0 -> auto from target radius
  double shape_target_radius = 0.25;  // headroom for large small-n epsilons
  double mu_hat = 0.0;               // 0 -> bootstrap internally

  // knn sufficiency experiment
  double knn_epsilon = 0.01;
  int knn_pairs = 96;
  int knn_sources = 8;
  std::vector<std::size_t> k_grid;  // empty -> auto geometric grid

  int curve_resolution = 256;

  void validate() const;
  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// Quantile summary of per-replicate values at one schedule point.
struct SummaryStat {
  double n = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;

  double iqr() const { return q75 - q25; }
};

SummaryStat summarize(double n, std::vector<double> values);

struct MuRecord {
  double n;
  int replicate;
  std::string method;  // "exact" or "knn"
  std::size_t k;       // 0 for exact
  double distance;
  double mu_hat;
};

struct MuResult {
  std::vector<MuRecord> records;
  std::vector<SummaryStat> per_n;  // of mu_hat
  double beta = 0.0;
};

/// Scaled distance ratio against |x-y| on the uniform unit box: the
/// empirical time constant of the underlying first-passage process.
MuResult estimate_mu(const ExperimentConfig& config);

struct ConvergenceRecord {
  double n;
  int replicate;
  std::string method;
  std::size_t k;
  double scaled_distance;
  double oracle_distance;
  double ratio;
  double arc_length;
  double max_gap;
  std::size_t hop_count;
};

struct ConvergenceResult {
  std::vector<ConvergenceRecord> records;
  std::vector<SummaryStat> ratio_per_n;
  double oracle_distance = 0.0;
  double beta = 0.0;
};

/// Scaled sample distance against the continuum oracle for a catalog
/// density; the ratio column should collapse onto the same constant for
/// every density and query pair.
ConvergenceResult run_convergence(const ExperimentConfig& config);

struct GeodesicRecord {
  double n;
  int replicate;
  std::string method;
  double curve_dist;       // d_S(sample geodesic, oracle geodesic)
  double signed_dev_mid;   // mid-chord deviation toward the density bump
  double arc_length;
  std::size_t hop_count;
  double max_gap;
};

struct GeodesicResult {
  std::vector<GeodesicRecord> records;
  std::vector<SummaryStat> curve_per_n;
  Polyline oracle_geodesic;
};

GeodesicResult run_geodesic_convergence(const ExperimentConfig& config);

struct ShapeRecord {
  double n;
  int replicate;
  double eps_star;  // smallest sandwich epsilon
  double eps_in;
  double eps_out;
  std::size_t ball_size;
  double axis_ratio;  // positive-side over negative-side extent
};

struct ShapeResult {
  std::vector<ShapeRecord> records;
  std::vector<SummaryStat> eps_per_n;
  std::vector<SummaryStat> axis_per_n;
  double t_used = 0.0;
  double mu_hat_used = 0.0;
};

ShapeResult run_shape(const ExperimentConfig& config);

struct KnnRecord {
  double n;
  std::size_t k;
  double agreement;
  int pairs;
};

struct KnnResult {
  std::vector<KnnRecord> records;
  std::vector<double> n_values;
  std::vector<std::int64_t> k_star;  // per n, -1 when never reached
  double c_hat = 0.0;
  double d_hat = 0.0;
};

/// Fraction of particle pairs where the kNN-restricted distance equals
/// the exact one, swept over k; fits k*(n) = c_hat * ln(n/eps) + d_hat.
KnnResult run_knn_sufficiency(const ExperimentConfig& config);

struct ManifoldRecord {
  double n;
  int replicate;
  std::string method;
  std::size_t k;
  double distance;
  double oracle_distance;
  double ratio_intrinsic;  // n^{(a-1)/d} D / oracle
  double ratio_ambient;    // n^{(a-1)/D} D / oracle (the wrong scaling)
};

struct ManifoldResult {
  std::vector<ManifoldRecord> records;
  std::vector<SummaryStat> intrinsic_per_n;
  std::vector<SummaryStat> ambient_per_n;
  double oracle_distance = 0.0;
};

/// Ambient-space sample distances on an embedded manifold against the
/// parameter-space oracle: the intrinsic-dimension scaling stabilizes,
/// the ambient-dimension scaling drifts.
ManifoldResult run_manifold(const ExperimentConfig& config);

}  // namespace fermat
