#pragma once

#include <array>
#include <span>

namespace flow714::spatial {

// Direction on the sphere. Azimuth is degrees counterclockwise from front
// (+left), in (-180, 180]; elevation is degrees up from the horizon, in
// [-90, 90].
struct Direction {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

// Unit vector: x front, y left, z up.
std::array<double, 3> unit_vector(const Direction& d);

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b);

// Gains over the three nearest directions (by dot product) solving
// g1*d1 + g2*d2 + g3*d3 ∝ target, negatives clamped to zero and the result
// energy-normalized to sum(g^2) = 1. A degenerate (coplanar-through-origin)
// triplet falls back to power panning over the two nearest directions, with
// pairwise_fallback set and indices[2] = -1.
struct PanGains {
    std::array<int, 3> indices{-1, -1, -1};
    std::array<double, 3> gains{0.0, 0.0, 0.0};
    bool pairwise_fallback = false;
};

PanGains pan_gains(const Direction& target, std::span<const Direction> directions);

}  // namespace flow714::spatial
