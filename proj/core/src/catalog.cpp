#include "fermat/catalog.hpp"

#include <cmath>

#include <json.hpp>

namespace fermat {

namespace {

using nlohmann::json;

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  return j;
}

double get_number(const json& j, const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_number()) {
    throw ValidationError("config field '" + field + "': expected a number");
  }
  return j[field].get<double>();
}

Vec get_vec(const json& j, const std::string& field, const Vec& fallback) {
  if (!j.contains(field)) return fallback;
  if (!j[field].is_array()) {
    throw ValidationError("config field '" + field + "': expected an array of numbers");
  }
  Vec out;
  for (const auto& v : j[field]) {
    if (!v.is_number()) {
      throw ValidationError("config field '" + field + "': expected an array of numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

Scenario make_uniform(const json& j) {
  int dim = static_cast<int>(get_number(j, "dim", 2));
  Vec lo = get_vec(j, "lo", Vec(static_cast<std::size_t>(dim), 0.0));
  Vec hi = get_vec(j, "hi", Vec(static_cast<std::size_t>(dim), 1.0));
  if (lo.size() != hi.size()) throw ValidationError("config field 'lo'/'hi': size mismatch");
  Scenario s;
  s.name = "uniform";
  s.domain = DomainSpec::box(lo, hi);
  const double density_value = 1.0 / s.domain.box_volume();
  s.density.evaluate = [density_value](PointView) { return density_value; };
  s.density.lower_bound = density_value;
  s.density.upper_bound = density_value;
  s.density.domain = s.domain;
  json norm{{"type", "uniform"}, {"lo", lo}, {"hi", hi}};
  s.params_json = norm.dump();
  return s;
}

Scenario make_two_media(const json& j) {
  const double a = get_number(j, "a", 1.0);
  const double b = get_number(j, "b", 4.0);
  const int axis = static_cast<int>(get_number(j, "axis", 1));
  const double threshold = get_number(j, "threshold", 0.5);
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ValidationError("config field 'a'/'b': two_media values must be positive");
  }
  int dim = static_cast<int>(get_number(j, "dim", 2));
  Vec lo = get_vec(j, "lo", Vec(static_cast<std::size_t>(dim), 0.0));
  Vec hi = get_vec(j, "hi", Vec(static_cast<std::size_t>(dim), 1.0));
  if (axis < 0 || static_cast<std::size_t>(axis) >= lo.size()) {
    throw ValidationError("config field 'axis': out of range");
  }
  Scenario s;
  s.name = "two_media";
  s.domain = DomainSpec::box(lo, hi);
  s.density.evaluate = [a, b, axis, threshold](PointView x) {
    return x[static_cast<std::size_t>(axis)] < threshold ? a : b;
  };
  s.density.lower_bound = std::min(a, b);
  s.density.upper_bound = std::max(a, b);
  s.density.domain = s.domain;
  json norm{{"type", "two_media"}, {"a", a},         {"b", b},  {"axis", axis},
            {"threshold", threshold}, {"lo", lo},    {"hi", hi}};
  s.params_json = norm.dump();
  return s;
}

Scenario make_gauss_bump(const json& j) {
  Vec center = get_vec(j, "center", Vec{0.5, 0.6});
  const double sigma = get_number(j, "sigma", 0.15);
  const double floor = get_number(j, "floor", 0.2);
  if (!(sigma > 0.0)) throw ValidationError("config field 'sigma': must be positive");
  if (!(floor > 0.0)) throw ValidationError("config field 'floor': must be positive");
  const int dim = static_cast<int>(center.size());
  Vec lo = get_vec(j, "lo", Vec(static_cast<std::size_t>(dim), 0.0));
  Vec hi = get_vec(j, "hi", Vec(static_cast<std::size_t>(dim), 1.0));
  Scenario s;
  s.name = "gauss_bump";
  s.domain = DomainSpec::box(lo, hi);
  s.density.evaluate = [center, sigma](PointView x) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < center.size(); ++k) {
      const double d = x[k] - center[k];
      r2 += d * d;
    }
    return std::exp(-r2 / (2.0 * sigma * sigma));
  };
  const auto base = s.density.evaluate;
  s.density.evaluate = [base, floor](PointView x) { return floor + base(x); };
  s.density.lower_bound = floor;
  s.density.upper_bound = floor + 1.0;
  s.density.domain = s.domain;
  json norm{{"type", "gauss_bump"}, {"center", center}, {"sigma", sigma},
            {"floor", floor},       {"lo", lo},         {"hi", hi}};
  s.params_json = norm.dump();
  return s;
}

Scenario make_gauss_mixture_1d(const json& j) {
  Vec means = get_vec(j, "means", Vec{0.0, 10.0});
  Vec sds = get_vec(j, "sds", Vec{1.0, std::sqrt(2.0)});
  Vec weights = get_vec(j, "weights", Vec{0.5, 0.5});
  const double lo = get_number(j, "lo", -5.0);
  const double hi = get_number(j, "hi", 15.0);
  if (means.size() != sds.size() || means.size() != weights.size() || means.empty()) {
    throw ValidationError("config field 'means'/'sds'/'weights': sizes must match");
  }
  for (double s : sds) {
    if (!(s > 0.0)) throw ValidationError("config field 'sds': must be positive");
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    mass += weights[i] * (normal_cdf(hi, means[i], sds[i]) - normal_cdf(lo, means[i], sds[i]));
  }
  if (!(mass > 0.0)) throw ValidationError("config field 'weights': zero truncated mass");
  Scenario s;
  s.name = "gauss_mixture_1d";
  s.domain = DomainSpec::box(Vec{lo}, Vec{hi});
  s.density.evaluate = [means, sds, weights, mass](PointView x) {
    double f = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
      f += weights[i] * normal_pdf(x[0], means[i], sds[i]);
    }
    return f / mass;
  };
  // Peak-sum bound is a certified M_f; m_f from a fine grid with margin.
  double peak = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    peak += weights[i] / (sds[i] * std::sqrt(2.0 * M_PI));
  }
  s.density.upper_bound = peak / mass;
  double fmin = std::numeric_limits<double>::infinity();
  Vec x(1);
  for (int g = 0; g <= 8192; ++g) {
    x[0] = lo + (hi - lo) * g / 8192.0;
    fmin = std::min(fmin, s.density.evaluate(x));
  }
  s.density.lower_bound = 0.5 * fmin;
  s.density.domain = s.domain;
  json norm{{"type", "gauss_mixture_1d"}, {"means", means}, {"sds", sds},
            {"weights", weights},         {"lo", lo},       {"hi", hi}};
  s.params_json = norm.dump();
  return s;
}

DensityField uniform_chart_density(const DomainSpec& dom) {
  DensityField f;
  const double v = 1.0 / dom.box_volume();
  f.evaluate = [v](PointView) { return v; };
  f.lower_bound = v;
  f.upper_bound = v;
  f.domain = dom;
  return f;
}

ManifoldScenario make_swiss_roll(const json& j) {
  const double u_min = get_number(j, "u_min", 0.5);
  const double u_max = get_number(j, "u_max", 8.5);
  const double v_min = get_number(j, "v_min", 0.0);
  const double v_max = get_number(j, "v_max", 1.0);
  if (!(u_min > 0.0) || !(u_max > u_min)) {
    throw ValidationError("config field 'u_min'/'u_max': need 0 < u_min < u_max");
  }
  ManifoldScenario m;
  m.name = "swiss_roll";
  m.manifold.intrinsic_dim = 2;
  m.manifold.ambient_dim = 3;
  m.manifold.parameter_domain = DomainSpec::box(Vec{u_min, v_min}, Vec{u_max, v_max});
  // Involute-of-a-circle spiral: unit-speed in u by construction, so the
  // chart is an exact isometry (J^T J = I).
  m.manifold.chart = [](PointView z) {
    const double t = std::sqrt(2.0 * z[0]);
    return Vec{std::cos(t) + t * std::sin(t), z[1], std::sin(t) - t * std::cos(t)};
  };
  m.chart_density = uniform_chart_density(m.manifold.parameter_domain);
  json norm{{"type", "swiss_roll"}, {"u_min", u_min}, {"u_max", u_max},
            {"v_min", v_min},       {"v_max", v_max}};
  m.params_json = norm.dump();
  return m;
}

ManifoldScenario make_rotated_plane(const json& j) {
  Vec lo = get_vec(j, "lo", Vec{0.0, 0.0});
  Vec hi = get_vec(j, "hi", Vec{1.0, 1.0});
  const double yaw = get_number(j, "yaw", 0.4);
  const double pitch = get_number(j, "pitch", 0.3);
  const double roll = get_number(j, "roll", 0.2);
  Vec offset = get_vec(j, "offset", Vec{0.0, 0.0, 0.0});
  if (lo.size() != 2 || hi.size() != 2 || offset.size() != 3) {
    throw ValidationError("config field 'lo'/'hi'/'offset': rotated_plane is 2D -> 3D");
  }
  // R = Rz(yaw) * Ry(pitch) * Rx(roll)
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double R[3][3] = {
      {cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr},
      {sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr},
      {-sp, cp * sr, cp * cr},
  };
  std::vector<double> rot = {R[0][0], R[0][1], R[1][0], R[1][1], R[2][0], R[2][1]};
  ManifoldScenario m;
  m.name = "rotated_plane";
  m.manifold.intrinsic_dim = 2;
  m.manifold.ambient_dim = 3;
  m.manifold.parameter_domain = DomainSpec::box(lo, hi);
  m.manifold.chart = [rot, offset](PointView z) {
    return Vec{rot[0] * z[0] + rot[1] * z[1] + offset[0],
               rot[2] * z[0] + rot[3] * z[1] + offset[1],
               rot[4] * z[0] + rot[5] * z[1] + offset[2]};
  };
  m.chart_density = uniform_chart_density(m.manifold.parameter_domain);
  json norm{{"type", "rotated_plane"}, {"lo", lo},     {"hi", hi},   {"yaw", yaw},
            {"pitch", pitch},          {"roll", roll}, {"offset", offset}};
  m.params_json = norm.dump();
  return m;
}

ManifoldScenario make_identity_manifold(const json& j) {
  int dim = static_cast<int>(get_number(j, "dim", 2));
  Vec lo = get_vec(j, "lo", Vec(static_cast<std::size_t>(dim), 0.0));
  Vec hi = get_vec(j, "hi", Vec(static_cast<std::size_t>(dim), 1.0));
  ManifoldScenario m;
  m.name = "identity";
  m.manifold.intrinsic_dim = static_cast<int>(lo.size());
  m.manifold.ambient_dim = static_cast<int>(lo.size());
  m.manifold.parameter_domain = DomainSpec::box(lo, hi);
  m.manifold.chart = [](PointView z) { return Vec(z.begin(), z.end()); };
  m.chart_density = uniform_chart_density(m.manifold.parameter_domain);
  json norm{{"type", "identity"}, {"lo", lo}, {"hi", hi}};
  m.params_json = norm.dump();
  return m;
}

}  // namespace

Scenario make_scenario(const std::string& json_text) {
  const json j = parse_object(json_text, "scenario");
  if (!j.contains("type") || !j["type"].is_string()) {
    throw ValidationError("config field 'type': scenario type string required");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "uniform") return make_uniform(j);
  if (type == "two_media") return make_two_media(j);
  if (type == "gauss_bump") return make_gauss_bump(j);
  if (type == "gauss_mixture_1d") return make_gauss_mixture_1d(j);
  throw ValidationError("config field 'type': unknown scenario '" + type + "'");
}

ManifoldScenario make_manifold(const std::string& json_text) {
  const json j = parse_object(json_text, "manifold");
  if (!j.contains("type") || !j["type"].is_string()) {
    throw ValidationError("config field 'type': manifold type string required");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "swiss_roll") return make_swiss_roll(j);
  if (type == "rotated_plane") return make_rotated_plane(j);
  if (type == "identity") return make_identity_manifold(j);
  throw ValidationError("config field 'type': unknown manifold '" + type + "'");
}

}  // namespace fermat
