#include "flow714/spatial/hrir.hpp"

#include <cmath>
#include <fstream>

#include "flow714/core/binio.hpp"
#include "flow714/core/errors.hpp"

namespace flow714::spatial {

namespace {
constexpr char kMagic[4] = {'I', 'F', 'I', 'R'};
constexpr uint32_t kVersion = 1;
constexpr double kHeadRadiusM = 0.0875;
constexpr double kSpeedOfSound = 343.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

int64_t HrirSet::ir_length() const {
    return left.empty() ? 0 : static_cast<int64_t>(left.front().size());
}

void HrirSet::validate() const {
    if (directions.size() < 4) {
        throw DataError("hrir: need at least 4 directions, got " +
                        std::to_string(directions.size()));
    }
    if (left.size() != directions.size() || right.size() != directions.size()) {
        throw DataError("hrir: direction/IR count mismatch");
    }
    const size_t len = left.front().size();
    if (len == 0) throw DataError("hrir: empty impulse responses");
    for (size_t i = 0; i < directions.size(); ++i) {
        if (left[i].size() != len || right[i].size() != len) {
            throw DataError("hrir: all impulse responses must share one length");
        }
    }
    // Non-coplanar through the origin: some triple must span 3-space.
    bool spans = false;
    const auto v0 = unit_vector(directions[0]);
    for (size_t i = 1; i < directions.size() && !spans; ++i) {
        const auto vi = unit_vector(directions[i]);
        const std::array<double, 3> cx{v0[1] * vi[2] - v0[2] * vi[1],
                                       v0[2] * vi[0] - v0[0] * vi[2],
                                       v0[0] * vi[1] - v0[1] * vi[0]};
        for (size_t j = i + 1; j < directions.size() && !spans; ++j) {
            if (std::fabs(dot3(cx, unit_vector(directions[j]))) > 1e-6) spans = true;
        }
    }
    if (!spans) throw DataError("hrir: directions are coplanar; triplets unsolvable");
}

namespace {

// One ear's IR: fractional-delay impulse shaped by a one-pole low-pass whose
// cutoff and gain depend on the angle to that ear.
std::vector<double> ear_ir(const Direction& dir, bool left_ear, int64_t sample_rate,
                           int64_t ir_len) {
    const auto v = unit_vector(dir);
    const double cos_gamma = left_ear ? v[1] : -v[1];  // ear axes are +/- y
    const double delay_s = kHeadRadiusM / kSpeedOfSound * (1.0 - cos_gamma);
    const double delay = delay_s * static_cast<double>(sample_rate);
    const double gain = 0.55 + 0.45 * (1.0 + cos_gamma) / 2.0;
    const double cutoff = 3000.0 + 17000.0 * (1.0 + cos_gamma) / 2.0;

    std::vector<double> ir(static_cast<size_t>(ir_len), 0.0);
    const auto i0 = static_cast<int64_t>(std::floor(delay));
    const double frac = delay - static_cast<double>(i0);
    if (i0 + 1 < ir_len) {
        ir[static_cast<size_t>(i0)] = gain * (1.0 - frac);
        ir[static_cast<size_t>(i0 + 1)] = gain * frac;
    }
    const double alpha = std::exp(-kTwoPi * cutoff / static_cast<double>(sample_rate));
    double state = 0.0;
    for (auto& x : ir) {
        state = alpha * state + (1.0 - alpha) * x;
        x = state;
    }
    return ir;
}

}  // namespace

HrirSet synth_hrir_set(int64_t sample_rate, int64_t ir_len) {
    HrirSet set;
    set.sample_rate = sample_rate;
    for (double el : {-30.0, 0.0, 30.0, 60.0}) {
        for (int k = 0; k < 12; ++k) {
            const double az = -150.0 + 30.0 * k;  // (-180, 180]
            set.directions.push_back({az, el});
        }
    }
    set.directions.push_back({0.0, 90.0});
    for (const Direction& d : set.directions) {
        set.left.push_back(ear_ir(d, true, sample_rate, ir_len));
        set.right.push_back(ear_ir(d, false, sample_rate, ir_len));
    }
    set.validate();
    return set;
}

void write_hrir(const HrirSet& set, const std::string& path) {
    set.validate();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("write_hrir: cannot open " + path);
    binio::write_magic(f, kMagic);
    binio::write_le<uint32_t>(f, kVersion);
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(set.sample_rate));
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(set.directions.size()));
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(set.ir_length()));
    for (size_t i = 0; i < set.directions.size(); ++i) {
        binio::write_le<double>(f, set.directions[i].azimuth_deg);
        binio::write_le<double>(f, set.directions[i].elevation_deg);
        for (double v : set.left[i]) binio::write_le<double>(f, v);
        for (double v : set.right[i]) binio::write_le<double>(f, v);
    }
}

HrirSet read_hrir(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("read_hrir: cannot open " + path);
    binio::expect_magic(f, kMagic, "HRIR fixture");
    const auto version = binio::read_le<uint32_t>(f, "version");
    if (version != kVersion) {
        throw DataError("read_hrir: unsupported version " + std::to_string(version));
    }
    HrirSet set;
    set.sample_rate = binio::read_le<uint32_t>(f, "sample_rate");
    const auto count = binio::read_le<uint32_t>(f, "direction count");
    const auto ir_len = binio::read_le<uint32_t>(f, "ir length");
    for (uint32_t i = 0; i < count; ++i) {
        Direction d;
        d.azimuth_deg = binio::read_le<double>(f, "azimuth");
        d.elevation_deg = binio::read_le<double>(f, "elevation");
        set.directions.push_back(d);
        std::vector<double> l(ir_len), r(ir_len);
        for (auto& v : l) v = binio::read_le<double>(f, "left IR");
        for (auto& v : r) v = binio::read_le<double>(f, "right IR");
        set.left.push_back(std::move(l));
        set.right.push_back(std::move(r));
    }
    set.validate();
    return set;
}

}  // namespace flow714::spatial
