#include "flow714/spatial/vbap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "flow714/core/errors.hpp"

namespace flow714::spatial {

namespace {
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
}

std::array<double, 3> unit_vector(const Direction& d) {
    const double az = d.azimuth_deg * kDegToRad;
    const double el = d.elevation_deg * kDegToRad;
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

PanGains pan_gains(const Direction& target, std::span<const Direction> directions) {
    if (directions.size() < 2) {
        throw DataError("pan_gains: need at least two directions");
    }
    const auto p = unit_vector(target);

    std::vector<std::array<double, 3>> vecs(directions.size());
    std::vector<int> order(directions.size());
    std::vector<int64_t> ranked_dot(directions.size());
    for (size_t i = 0; i < directions.size(); ++i) {
        vecs[i] = unit_vector(directions[i]);
        order[i] = static_cast<int>(i);
        // Quantize so that exact geometric ties (which differ by ~1 ulp
        // across mirrored configurations) compare equal.
        ranked_dot[i] = static_cast<int64_t>(std::llround(dot3(vecs[i], p) * 1e12));
    }
    // Ties resolve by |azimuth| then elevation then azimuth, keeping the
    // selection mirror-symmetric about the median plane.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (ranked_dot[a] != ranked_dot[b]) return ranked_dot[a] > ranked_dot[b];
        const double aa = std::fabs(directions[a].azimuth_deg);
        const double ab = std::fabs(directions[b].azimuth_deg);
        if (aa != ab) return aa < ab;
        if (directions[a].elevation_deg != directions[b].elevation_deg) {
            return directions[a].elevation_deg < directions[b].elevation_deg;
        }
        return directions[a].azimuth_deg > directions[b].azimuth_deg;
    });

    PanGains out;
    // Boundary case: target coincides with a measured direction.
    for (size_t i = 0; i < directions.size(); ++i) {
        if (dot3(vecs[i], p) >= 1.0 - 1e-12) {
            out.indices = {static_cast<int>(i), -1, -1};
            out.gains = {1.0, 0.0, 0.0};
            return out;
        }
    }
    if (directions.size() >= 3) {
        const int i0 = order[0], i1 = order[1], i2 = order[2];
        const auto& d0 = vecs[i0];
        const auto& d1 = vecs[i1];
        const auto& d2 = vecs[i2];
        // Solve [d0 d1 d2] g = p by Cramer's rule (columns are the triplet).
        const double det = d0[0] * (d1[1] * d2[2] - d1[2] * d2[1]) -
                           d1[0] * (d0[1] * d2[2] - d0[2] * d2[1]) +
                           d2[0] * (d0[1] * d1[2] - d0[2] * d1[1]);
        if (std::fabs(det) > 1e-9) {
            auto det3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b,
                           const std::array<double, 3>& c) {
                return a[0] * (b[1] * c[2] - b[2] * c[1]) - b[0] * (a[1] * c[2] - a[2] * c[1]) +
                       c[0] * (a[1] * b[2] - a[2] * b[1]);
            };
            double g0 = det3(p, d1, d2) / det;
            double g1 = det3(d0, p, d2) / det;
            double g2 = det3(d0, d1, p) / det;
            g0 = std::max(g0, 0.0);
            g1 = std::max(g1, 0.0);
            g2 = std::max(g2, 0.0);
            const double norm = std::sqrt(g0 * g0 + g1 * g1 + g2 * g2);
            if (norm > 1e-12) {
                out.indices = {i0, i1, i2};
                out.gains = {g0 / norm, g1 / norm, g2 / norm};
                return out;
            }
        }
    }

    // Pairwise power-panning fallback.
    const int i0 = order[0], i1 = order[1];
    double g0 = std::max(dot3(vecs[i0], p), 0.0);
    double g1 = std::max(dot3(vecs[i1], p), 0.0);
    double norm = std::sqrt(g0 * g0 + g1 * g1);
    if (norm < 1e-12) {
        g0 = 1.0;
        g1 = 0.0;
        norm = 1.0;
    }
    out.indices = {i0, i1, -1};
    out.gains = {g0 / norm, g1 / norm, 0.0};
    out.pairwise_fallback = true;
    return out;
}

}  // namespace flow714::spatial
