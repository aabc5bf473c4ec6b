#pragma once

#include <vector>

#include "fermat/geometry.hpp"

namespace fermat {

/// Polygonal curve: ordered list of D-dimensional vertices.
using Polyline = std::vector<Vec>;

struct CurveMetricValue {
  double value;
};

/// Resample a polyline at `resolution` points uniformly spaced in arc
/// length. Zero-length (or single-vertex) inputs collapse to repeated
/// copies of the first vertex.
Polyline resample_uniform(const Polyline& curve, int resolution);

/// Discrete Fréchet distance between two equal-dimension point sequences.
double discrete_frechet(const Polyline& a, const Polyline& b);

/// Distance between two curves seen as images (not parametrized paths):
/// the minimum over both orientations of the discrete Fréchet distance of
/// their arc-length-uniform resamplings at `resolution` points. Symmetric
/// by construction, zero on identical curves, and within
/// O(max segment length / resolution) of the parametrization-minimizing
/// sup-distance for polygonal inputs.
CurveMetricValue curve_distance(const Polyline& gamma1, const Polyline& gamma2,
                                int resolution = 256);

}  // namespace fermat
