#include "flow714/audio/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flow714/core/errors.hpp"
#include "flow714/core/rng.hpp"

namespace flow714 {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::pair<std::string, std::string> split_kv(const std::string& token, const char* where) {
    const size_t eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw DataError(std::string("scene: expected key=value in ") + where + ": '" + token +
                        "'");
    }
    return {token.substr(0, eq), token.substr(eq + 1)};
}

double to_double(const std::string& s, const std::string& key) {
    try {
        size_t idx = 0;
        const double v = std::stod(s, &idx);
        if (idx != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("scene: bad numeric value for " + key + ": '" + s + "'");
    }
}

SceneSource parse_source(const std::string& line) {
    SceneSource src;
    std::istringstream is(line);
    std::string tok;
    is >> tok;  // consume "source"
    bool have_route = false;
    double az = 0.0, el = 0.0;
    bool have_az = false, have_el = false;
    while (is >> tok) {
        auto [key, value] = split_kv(tok, "source line");
        if (key == "type") {
            if (value == "sine") {
                src.wave = SceneSource::Wave::sine;
            } else if (value == "noise") {
                src.wave = SceneSource::Wave::noise;
            } else {
                throw DataError("scene: unknown waveform type '" + value + "'");
            }
        } else if (key == "freq") {
            src.freq_hz = to_double(value, key);
        } else if (key == "amp") {
            src.amplitude = to_double(value, key);
        } else if (key == "channel") {
            src.channel = value;
            have_route = true;
        } else if (key == "az") {
            az = to_double(value, key);
            have_az = true;
        } else if (key == "el") {
            el = to_double(value, key);
            have_el = true;
        } else if (key == "onset") {
            src.onset_s = to_double(value, key);
        } else if (key == "dur") {
            src.duration_s = to_double(value, key);
        } else if (key == "lp") {
            src.lowpass_hz = to_double(value, key);
        } else {
            throw DataError("scene: unknown source key '" + key + "'");
        }
    }
    if (have_az || have_el) {
        src.direction = spatial::Direction{az, el};
        have_route = true;
    }
    if (!have_route) throw DataError("scene: source needs channel= or az=/el=");
    if (src.channel && src.direction) {
        throw DataError("scene: source cannot have both channel= and az=/el=");
    }
    return src;
}

}  // namespace

SceneSpec SceneSpec::parse(const std::string& text) {
    SceneSpec spec;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        line = line.substr(first);
        if (line.rfind("source", 0) == 0) {
            spec.sources.push_back(parse_source(line));
            continue;
        }
        std::string compact;
        for (char ch : line) {
            if (ch != ' ' && ch != '\t' && ch != '\r') compact.push_back(ch);
        }
        auto [key, value] = split_kv(compact, "scene header");
        if (key == "duration") {
            spec.duration_s = to_double(value, key);
        } else if (key == "sample_rate") {
            spec.sample_rate = static_cast<int64_t>(to_double(value, key));
        } else {
            throw DataError("scene: unknown key '" + key + "'");
        }
    }
    if (spec.duration_s <= 0.0) throw DataError("scene: duration must be positive");
    if (spec.sample_rate <= 0) throw DataError("scene: sample_rate must be positive");
    return spec;
}

SceneSpec SceneSpec::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("scene: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

std::string SceneSpec::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "duration = " << duration_s << "\n";
    os << "sample_rate = " << sample_rate << "\n";
    for (const SceneSource& s : sources) {
        os << "source type=" << (s.wave == SceneSource::Wave::sine ? "sine" : "noise");
        if (s.wave == SceneSource::Wave::sine) os << " freq=" << s.freq_hz;
        os << " amp=" << s.amplitude;
        if (s.channel) os << " channel=" << *s.channel;
        if (s.direction) {
            os << " az=" << s.direction->azimuth_deg << " el=" << s.direction->elevation_deg;
        }
        os << " onset=" << s.onset_s;
        if (s.duration_s >= 0.0) os << " dur=" << s.duration_s;
        if (s.lowpass_hz > 0.0) os << " lp=" << s.lowpass_hz;
        os << "\n";
    }
    return os.str();
}

MultichannelAudio synth_scene(const SceneSpec& spec, uint64_t seed) {
    const ChannelLayout layout = ChannelLayout::surround_7_1_4();
    const int64_t n = static_cast<int64_t>(
        std::llround(spec.duration_s * static_cast<double>(spec.sample_rate)));
    MultichannelAudio out = MultichannelAudio::silence(layout, spec.sample_rate, n);

    // Panning directions: every non-LFE speaker.
    std::vector<spatial::Direction> speaker_dirs;
    std::vector<int64_t> speaker_index;
    for (int64_t c = 0; c < layout.channel_count(); ++c) {
        if (layout.channel(c).is_lfe) continue;
        speaker_dirs.push_back({layout.channel(c).azimuth_deg, layout.channel(c).elevation_deg});
        speaker_index.push_back(c);
    }

    const double nyquist = static_cast<double>(spec.sample_rate) / 2.0;
    for (size_t si = 0; si < spec.sources.size(); ++si) {
        const SceneSource& src = spec.sources[si];
        if (src.wave == SceneSource::Wave::sine && src.freq_hz >= nyquist) {
            throw DataError("scene: frequency " + std::to_string(src.freq_hz) +
                            " Hz is at or above Nyquist");
        }
        if (src.amplitude > 1.0) {
            throw DataError("scene: amplitude " + std::to_string(src.amplitude) + " exceeds 1");
        }

        const int64_t start = static_cast<int64_t>(
            std::llround(src.onset_s * static_cast<double>(spec.sample_rate)));
        int64_t len = src.duration_s < 0.0
                          ? n - start
                          : static_cast<int64_t>(std::llround(
                                src.duration_s * static_cast<double>(spec.sample_rate)));
        len = std::min(len, n - start);
        if (start < 0 || start >= n || len <= 0) continue;

        std::vector<double> wave(static_cast<size_t>(len));
        if (src.wave == SceneSource::Wave::sine) {
            const double w = kTwoPi * src.freq_hz / static_cast<double>(spec.sample_rate);
            for (int64_t i = 0; i < len; ++i) {
                wave[static_cast<size_t>(i)] = src.amplitude * std::sin(w * static_cast<double>(i));
            }
        } else {
            Rng rng = Rng::stream(seed, si);
            for (int64_t i = 0; i < len; ++i) {
                wave[static_cast<size_t>(i)] = src.amplitude * (2.0 * rng.uniform() - 1.0);
            }
        }
        if (src.lowpass_hz > 0.0) {
            const double alpha =
                std::exp(-kTwoPi * src.lowpass_hz / static_cast<double>(spec.sample_rate));
            double state = 0.0;
            for (auto& x : wave) {
                state = alpha * state + (1.0 - alpha) * x;
                x = state;
            }
        }

        if (src.channel) {
            const int64_t c = layout.index_of(*src.channel);
            double* dst = out.channel(c) + start;
            for (int64_t i = 0; i < len; ++i) dst[i] += wave[static_cast<size_t>(i)];
        } else {
            const spatial::PanGains pan = spatial::pan_gains(*src.direction, speaker_dirs);
            for (int g = 0; g < 3; ++g) {
                if (pan.indices[static_cast<size_t>(g)] < 0) continue;
                const double gain = pan.gains[static_cast<size_t>(g)];
                if (gain == 0.0) continue;
                double* dst =
                    out.channel(speaker_index[static_cast<size_t>(
                        pan.indices[static_cast<size_t>(g)])]) +
                    start;
                for (int64_t i = 0; i < len; ++i) dst[i] += gain * wave[static_cast<size_t>(i)];
            }
        }
    }

    // Guard the [-1, 1] invariant; overlapping sources may sum past it.
    for (auto& v : out.samples) v = std::clamp(v, -1.0, 1.0);
    return out;
}

}  // namespace flow714
