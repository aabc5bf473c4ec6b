#include "fermat/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <queue>

#include <json.hpp>

#include "fermat/thread_pool.hpp"

namespace fermat {

Beta::Beta(double v) : value(v) {
  if (!std::isfinite(v) || v < 0.0) throw ValidationError("beta must be finite and >= 0");
}

Beta Beta::from_alpha(Alpha alpha, int intrinsic_dim) {
  if (intrinsic_dim < 1) throw ValidationError("beta: intrinsic dimension must be >= 1");
  return Beta((alpha.value - 1.0) / static_cast<double>(intrinsic_dim));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kQuadSamples = 8;     // trapezoid sub-intervals per edge
constexpr int kInteriorChecks = 8;  // membership probes per edge

std::vector<std::vector<int>> stencil_offsets(int dim, int radius) {
  std::vector<std::vector<int>> out;
  std::vector<int> o(static_cast<std::size_t>(dim), -radius);
  for (;;) {
    bool all_zero = true;
    for (int v : o) {
      if (v != 0) {
        all_zero = false;
        break;
      }
    }
    if (!all_zero) out.push_back(o);
    int j = dim - 1;
    for (; j >= 0; --j) {
      if (o[static_cast<std::size_t>(j)] < radius) {
        ++o[static_cast<std::size_t>(j)];
        for (int l = j + 1; l < dim; ++l) o[static_cast<std::size_t>(l)] = -radius;
        break;
      }
    }
    if (j < 0) break;
  }
  return out;
}

}  // namespace

std::uint64_t GridOracle::cell_linear(const std::vector<std::size_t>& idx) const {
  std::uint64_t lin = 0;
  for (std::size_t j = 0; j < dims_.size(); ++j) lin = lin * dims_[j] + idx[j];
  return lin;
}

void GridOracle::cell_multi(std::uint64_t lin, std::vector<std::size_t>& idx) const {
  idx.resize(dims_.size());
  for (std::size_t j = dims_.size(); j-- > 0;) {
    idx[j] = static_cast<std::size_t>(lin % dims_[j]);
    lin /= dims_[j];
  }
}

Vec GridOracle::cell_coords(std::uint64_t lin) const {
  Vec p(dims_.size());
  for (std::size_t j = dims_.size(); j-- > 0;) {
    const std::size_t i = static_cast<std::size_t>(lin % dims_[j]);
    lin /= dims_[j];
    p[j] = lo_[j] + static_cast<double>(i) * h_;
  }
  return p;
}

Vec GridOracle::node_coords(std::size_t id) const { return cell_coords(node_cells_[id]); }

GridOracle GridOracle::build(const DomainSpec& domain, const DensityField& density,
                             Beta beta, const GridOracleConfig& config,
                             std::string scenario_json) {
  const int d = domain.dim();
  if (d < 1 || d > 3) throw ValidationError("GridOracle: only dimensions 1..3 supported");
  if (!(config.h > 0.0)) throw ValidationError("GridOracle: h must be positive");
  if (config.stencil_radius < 1) throw ValidationError("GridOracle: stencil radius must be >= 1");

  GridOracle g;
  g.lo_ = domain.lo;
  g.hi_ = domain.hi;
  g.h_ = config.h;
  g.radius_ = config.stencil_radius;
  g.beta_ = beta.value;
  g.scenario_json_ = std::move(scenario_json);
  g.dims_.resize(static_cast<std::size_t>(d));
  std::uint64_t total = 1;
  for (int j = 0; j < d; ++j) {
    const double span = domain.hi[static_cast<std::size_t>(j)] - domain.lo[static_cast<std::size_t>(j)];
    g.dims_[static_cast<std::size_t>(j)] =
        static_cast<std::size_t>(std::floor(span / config.h + 1e-9)) + 1;
    total *= g.dims_[static_cast<std::size_t>(j)];
    if (total > config.node_cap) {
      throw ValidationError("GridOracle: grid would exceed the node cap of " +
                            std::to_string(config.node_cap) + " nodes; increase h");
    }
  }

  g.cell_to_node_.assign(total, -1);
  std::vector<std::size_t> idx;
  for (std::uint64_t lin = 0; lin < total; ++lin) {
    const Vec p = g.cell_coords(lin);
    if (domain.contains(p)) {
      g.cell_to_node_[lin] = static_cast<std::int32_t>(g.node_cells_.size());
      g.node_cells_.push_back(lin);
    }
  }
  if (g.node_cells_.empty()) throw ValidationError("GridOracle: no in-domain grid nodes");

  const auto offsets = stencil_offsets(d, config.stencil_radius);
  const std::size_t n = g.node_cells_.size();

  // Pass 1: count admissible neighbors per node. Pass 2: fill CSR, with
  // weights computed once per canonical (low id -> high id) direction so
  // w(u,v) == w(v,u) bit-for-bit.
  auto neighbor_node = [&](std::uint64_t lin, const std::vector<int>& off,
                           std::vector<std::size_t>& scratch) -> std::int64_t {
    g.cell_multi(lin, scratch);
    for (int j = 0; j < d; ++j) {
      const std::int64_t v = static_cast<std::int64_t>(scratch[static_cast<std::size_t>(j)]) +
                             off[static_cast<std::size_t>(j)];
      if (v < 0 || v >= static_cast<std::int64_t>(g.dims_[static_cast<std::size_t>(j)])) return -1;
      scratch[static_cast<std::size_t>(j)] = static_cast<std::size_t>(v);
    }
    return g.cell_to_node_[g.cell_linear(scratch)];
  };

  auto segment_admissible = [&](const Vec& a, const Vec& b, Vec& probe) {
    for (int s = 1; s <= kInteriorChecks; ++s) {
      const double t = static_cast<double>(s) / (kInteriorChecks + 1);
      for (int j = 0; j < d; ++j) {
        probe[static_cast<std::size_t>(j)] =
            a[static_cast<std::size_t>(j)] +
            t * (b[static_cast<std::size_t>(j)] - a[static_cast<std::size_t>(j)]);
      }
      if (!domain.contains(probe)) return false;
    }
    return true;
  };

  std::vector<std::size_t> degree(n, 0);
  parallel_for(n, config.workers, [&](std::size_t u) {
    std::vector<std::size_t> scratch;
    Vec probe(static_cast<std::size_t>(d));
    const Vec a = g.node_coords(u);
    std::size_t deg = 0;
    for (const auto& off : offsets) {
      const std::int64_t v = neighbor_node(g.node_cells_[u], off, scratch);
      if (v < 0) continue;
      const Vec b = g.node_coords(static_cast<std::size_t>(v));
      if (segment_admissible(a, b, probe)) ++deg;
    }
    degree[u] = deg;
  });

  g.offsets_.assign(n + 1, 0);
  for (std::size_t u = 0; u < n; ++u) g.offsets_[u + 1] = g.offsets_[u] + degree[u];
  g.targets_.resize(g.offsets_.back());
  g.weights_.resize(g.offsets_.back());

  auto edge_weight = [&](std::size_t u, std::size_t v) {
    // Canonical orientation: integrate from the lower node id.
    const Vec a = g.node_coords(std::min(u, v));
    const Vec b = g.node_coords(std::max(u, v));
    const double len = euclidean_distance(a, b);
    if (beta.value == 0.0) return len;
    Vec probe(a.size());
    double sum = 0.0;
    for (int s = 0; s <= kQuadSamples; ++s) {
      const double t = static_cast<double>(s) / kQuadSamples;
      for (std::size_t j = 0; j < a.size(); ++j) probe[j] = a[j] + t * (b[j] - a[j]);
      const double f = density.evaluate(probe);
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw NumericalError("GridOracle: density must be finite and positive on edges");
      }
      const double val = std::pow(f, -beta.value);
      sum += (s == 0 || s == kQuadSamples) ? val : 2.0 * val;
    }
    return len * sum / (2.0 * kQuadSamples);
  };

  parallel_for(n, config.workers, [&](std::size_t u) {
    std::vector<std::size_t> scratch;
    Vec probe(static_cast<std::size_t>(d));
    const Vec a = g.node_coords(u);
    std::size_t at = g.offsets_[u];
    for (const auto& off : offsets) {
      const std::int64_t v = neighbor_node(g.node_cells_[u], off, scratch);
      if (v < 0) continue;
      const Vec b = g.node_coords(static_cast<std::size_t>(v));
      if (!segment_admissible(a, b, probe)) continue;
      g.targets_[at] = static_cast<std::uint32_t>(v);
      g.weights_[at] = edge_weight(u, static_cast<std::size_t>(v));
      ++at;
    }
  });
  return g;
}

std::size_t GridOracle::snap(PointView x) const {
  if (static_cast<int>(x.size()) != dim()) {
    throw ValidationError("GridOracle::snap: dimension mismatch");
  }
  const int d = dim();
  // Candidate nodes: the 2^d cells whose centers can be within h/2 of x.
  std::vector<std::size_t> base(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const double rel = (x[static_cast<std::size_t>(j)] - lo_[static_cast<std::size_t>(j)]) / h_;
    const double fl = std::clamp(std::floor(rel), 0.0,
                                 static_cast<double>(dims_[static_cast<std::size_t>(j)] - 1));
    base[static_cast<std::size_t>(j)] = static_cast<std::size_t>(fl);
  }
  std::int64_t best = -1;
  double best_d2 = kInf;
  Vec best_coords;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  const std::size_t corners = static_cast<std::size_t>(1) << d;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    bool ok = true;
    for (int j = 0; j < d && ok; ++j) {
      idx[static_cast<std::size_t>(j)] = base[static_cast<std::size_t>(j)] +
                                         ((mask >> j) & 1u);
      if (idx[static_cast<std::size_t>(j)] >= dims_[static_cast<std::size_t>(j)]) ok = false;
    }
    if (!ok) continue;
    const std::uint64_t lin = cell_linear(idx);
    const std::int32_t node = cell_to_node_[lin];
    if (node < 0) continue;
    const Vec c = cell_coords(lin);
    double linf = 0.0;
    for (int j = 0; j < d; ++j) {
      linf = std::max(linf, std::abs(c[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]));
    }
    if (linf > 0.5 * h_ * (1.0 + 1e-9)) continue;
    const double d2 = squared_distance(c, x);
    if (best < 0 ||
        compare_candidates(d2, c, static_cast<std::size_t>(node), best_d2, best_coords,
                           static_cast<std::size_t>(best)) < 0) {
      best = node;
      best_d2 = d2;
      best_coords = c;
    }
  }
  if (best < 0) {
    throw ValidationError("GridOracle::snap: point lies outside all in-domain grid cells");
  }
  return static_cast<std::size_t>(best);
}

void GridOracle::dijkstra(std::size_t source, std::size_t target, double stop_at,
                          std::vector<double>& dist, std::vector<std::size_t>* pred) const {
  const std::size_t n = node_count();
  dist.assign(n, kInf);
  if (pred) pred->assign(n, static_cast<std::size_t>(-1));
  std::vector<char> settled(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [dd, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    if (dd >= stop_at) break;
    settled[u] = 1;
    if (u == target) return;
    for (std::uint64_t e = offsets_[u]; e < offsets_[u + 1]; ++e) {
      const std::size_t v = targets_[e];
      const double nd = dd + weights_[e];
      if (nd < dist[v]) {
        dist[v] = nd;
        if (pred) (*pred)[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  // Mark labels of unsettled nodes as unreached for early-exit callers.
  if (std::isfinite(stop_at)) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!settled[i]) dist[i] = kInf;
    }
  }
}

GridOracle::Query GridOracle::distance_between_nodes(std::size_t a, std::size_t b) const {
  if (a >= node_count() || b >= node_count()) {
    throw ValidationError("GridOracle: node index out of range");
  }
  Query q;
  if (a == b) {
    q.node_path = {a};
    return q;
  }
  // Canonical source (smaller id): the accumulated sum is then identical
  // for (a,b) and (b,a), making symmetry exact.
  const std::size_t src = std::min(a, b);
  const std::size_t dst = std::max(a, b);
  std::vector<double> dist;
  std::vector<std::size_t> pred;
  dijkstra(src, dst, kInf, dist, &pred);
  if (!std::isfinite(dist[dst])) {
    q.distance = kInf;
    q.unreachable = true;
    return q;
  }
  q.distance = dist[dst];
  std::vector<std::size_t> rev;
  for (std::size_t v = dst; v != static_cast<std::size_t>(-1); v = pred[v]) {
    rev.push_back(v);
    if (v == src) break;
  }
  std::reverse(rev.begin(), rev.end());
  if (src != a) std::reverse(rev.begin(), rev.end());
  q.node_path = std::move(rev);
  return q;
}

GridOracle::Query GridOracle::distance(PointView x, PointView y) const {
  return distance_between_nodes(snap(x), snap(y));
}

std::vector<double> GridOracle::distance_field(std::size_t source) const {
  if (source >= node_count()) throw ValidationError("GridOracle: source out of range");
  std::vector<double> dist;
  dijkstra(source, static_cast<std::size_t>(-2), kInf, dist, nullptr);
  return dist;
}

std::vector<std::size_t> GridOracle::ball(PointView x, double t) const {
  if (!(t > 0.0)) throw ValidationError("GridOracle::ball: t must be positive");
  const std::size_t src = snap(x);
  std::vector<double> dist;
  dijkstra(src, static_cast<std::size_t>(-2), t, dist, nullptr);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < node_count(); ++i) {
    if (dist[i] < t) out.push_back(i);
  }
  return out;
}

Polyline GridOracle::to_polyline(const std::vector<std::size_t>& node_path) const {
  Polyline p;
  p.reserve(node_path.size());
  for (std::size_t id : node_path) p.push_back(node_coords(id));
  return p;
}

namespace {

template <typename T>
void write_pod(std::ofstream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <typename T>
void read_pod(std::ifstream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
  if (!in) throw ValidationError("oracle file: truncated");
}

constexpr char kOracleMagic[8] = {'F', 'E', 'R', 'M', 'O', 'R', 'C', '1'};

}  // namespace

void GridOracle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write oracle file: " + path.string());
  nlohmann::json header{
      {"dim", dim()},
      {"h", h_},
      {"stencil_radius", radius_},
      {"beta", beta_},
      {"lo", lo_},
      {"hi", hi_},
      {"dims", dims_},
      {"node_count", node_cells_.size()},
      {"edge_count", targets_.size()},
  };
  if (!scenario_json_.empty()) {
    header["scenario"] = nlohmann::json::parse(scenario_json_, nullptr, false);
  }
  const std::string htext = header.dump();
  out.write(kOracleMagic, sizeof(kOracleMagic));
  const std::uint64_t hlen = htext.size();
  write_pod(out, &hlen, 1);
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  write_pod(out, node_cells_.data(), node_cells_.size());
  write_pod(out, offsets_.data(), offsets_.size());
  write_pod(out, targets_.data(), targets_.size());
  write_pod(out, weights_.data(), weights_.size());
}

GridOracle GridOracle::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open oracle file: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kOracleMagic, sizeof(kOracleMagic)) != 0) {
    throw ValidationError(path.string() + ": bad magic (expected FERMORC1)");
  }
  std::uint64_t hlen = 0;
  read_pod(in, &hlen, 1);
  std::string htext(hlen, '\0');
  in.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw ValidationError(path.string() + ": truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(htext);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": bad header JSON: " + e.what());
  }
  GridOracle g;
  g.h_ = header.at("h").get<double>();
  g.radius_ = header.at("stencil_radius").get<int>();
  g.beta_ = header.at("beta").get<double>();
  g.lo_ = header.at("lo").get<Vec>();
  g.hi_ = header.at("hi").get<Vec>();
  g.dims_ = header.at("dims").get<std::vector<std::size_t>>();
  if (header.contains("scenario")) g.scenario_json_ = header["scenario"].dump();
  const std::size_t n = header.at("node_count").get<std::size_t>();
  const std::size_t e = header.at("edge_count").get<std::size_t>();
  g.node_cells_.resize(n);
  read_pod(in, g.node_cells_.data(), n);
  g.offsets_.resize(n + 1);
  read_pod(in, g.offsets_.data(), n + 1);
  g.targets_.resize(e);
  read_pod(in, g.targets_.data(), e);
  g.weights_.resize(e);
  read_pod(in, g.weights_.data(), e);
  std::uint64_t total = 1;
  for (std::size_t dsz : g.dims_) total *= dsz;
  g.cell_to_node_.assign(total, -1);
  for (std::size_t id = 0; id < n; ++id) {
    g.cell_to_node_[g.node_cells_[id]] = static_cast<std::int32_t>(id);
  }
  return g;
}

ContinuumResult continuum_distance(const GridOracle& oracle, PointView x, PointView y) {
  const GridOracle::Query q = oracle.distance(x, y);
  ContinuumResult r;
  r.distance = q.distance;
  r.unreachable = q.unreachable;
  r.grid_spacing = oracle.h();
  r.stencil_radius = oracle.stencil_radius();
  if (!q.unreachable) r.geodesic = oracle.to_polyline(q.node_path);
  return r;
}

Polyline continuum_geodesic(const GridOracle& oracle, PointView x, PointView y) {
  const ContinuumResult r = continuum_distance(oracle, x, y);
  if (r.unreachable) {
    throw NumericalError("continuum_geodesic: endpoints in disconnected grid components");
  }
  return r.geodesic;
}

std::vector<std::size_t> continuum_ball(const GridOracle& oracle, PointView x, double t) {
  return oracle.ball(x, t);
}

}  // namespace fermat
