#pragma once

#include <string>

#include "fermat/domain.hpp"

namespace fermat {

/// A named density + domain pair built from a JSON object like
///   {"type":"gauss_bump","center":[0.5,0.6],"sigma":0.15,"floor":0.2}
/// Types: uniform, two_media, gauss_bump, gauss_mixture_1d.
struct Scenario {
  std::string name;
  std::string params_json;  // normalized JSON actually used
  DomainSpec domain;
  DensityField density;
};

Scenario make_scenario(const std::string& json_text);

/// A named isometric manifold built from a JSON object like
///   {"type":"swiss_roll","u_min":0.5,"u_max":8.5,"v_min":0,"v_max":1}
/// Types: swiss_roll, rotated_plane, identity. The chart density is
/// uniform (normalized) on the parameter domain.
struct ManifoldScenario {
  std::string name;
  std::string params_json;
  ManifoldSpec manifold;
  DensityField chart_density;
};

ManifoldScenario make_manifold(const std::string& json_text);

}  // namespace fermat
