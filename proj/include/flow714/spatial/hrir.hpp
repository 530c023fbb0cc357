#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flow714/spatial/vbap.hpp"

namespace flow714::spatial {

// Measured (or synthesized) HRIR set: one left/right FIR pair per direction.
// All impulse responses share one length; the directions must include at
// least four that span 3-space so VBAP triplets are solvable.
struct HrirSet {
    int64_t sample_rate = 48000;
    std::vector<Direction> directions;
    std::vector<std::vector<double>> left;
    std::vector<std::vector<double>> right;

    int64_t ir_length() const;
    void validate() const;
};

// Physically plausible synthetic set on a coarse grid (rings at elevations
// -30/0/30/60 every 30 degrees azimuth, plus the zenith): direction-dependent
// interaural delay plus a first-order head-shadow low-pass. Symmetric about
// the median plane by construction. Keeps the test suite hermetic.
HrirSet synth_hrir_set(int64_t sample_rate = 48000, int64_t ir_len = 64);

// HRIR fixture file (magic "IFIR"): version, sample_rate, direction count,
// IR length, then per direction azimuth/elevation and both ear IRs as
// float64 little-endian.
void write_hrir(const HrirSet& set, const std::string& path);
HrirSet read_hrir(const std::string& path);

}  // namespace flow714::spatial
