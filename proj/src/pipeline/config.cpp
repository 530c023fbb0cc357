#include "flow714/pipeline/config.hpp"

#include <fstream>
#include <sstream>

#include "flow714/core/errors.hpp"

namespace flow714 {

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double num(const std::string& v, const std::string& key) {
    try {
        size_t idx = 0;
        const double x = std::stod(v, &idx);
        if (idx != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw DataError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

bool boolean(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw DataError("config: bad boolean for " + key + ": '" + v + "'");
}

}  // namespace

PipelineConfig PipelineConfig::desk() {
    PipelineConfig cfg;
    cfg.profile = "desk";
    cfg.codec.latent_dim = 8;
    cfg.net = NetConfig::desk();
    cfg.clip_seconds = 2.0;
    cfg.train.steps = 1000;
    cfg.train.batch_size = 4;
    cfg.train.lr = 1e-3;
    return cfg;
}

PipelineConfig PipelineConfig::full() {
    PipelineConfig cfg;
    cfg.profile = "full";
    cfg.codec.latent_dim = 64;
    cfg.net = NetConfig::full();
    cfg.clip_seconds = 10.0;
    cfg.train.steps = 200000;
    cfg.train.batch_size = 16;
    cfg.train.lr = 1e-4;
    cfg.train.checkpoint_every = 10000;
    return cfg;
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
    // First pass: profile only, to pick the base defaults.
    std::string profile = "desk";
    {
        std::istringstream is(text);
        std::string line, section;
        while (std::getline(is, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            if (line.front() == '[') continue;
            const size_t eq = line.find('=');
            if (eq == std::string::npos) continue;
            if (trim(line.substr(0, eq)) == "profile") profile = trim(line.substr(eq + 1));
        }
    }
    PipelineConfig cfg;
    if (profile == "desk" || profile == "custom") {
        cfg = desk();
        cfg.profile = profile;
    } else if (profile == "full") {
        cfg = full();
    } else {
        throw DataError("config: unknown profile '" + profile + "'");
    }

    std::istringstream is(text);
    std::string line, section;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw DataError("config: malformed section: " + line);
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw DataError("config: expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (section.empty()) {
            if (key == "profile") {
                // handled in the first pass
            } else if (key == "seed") {
                cfg.seed = static_cast<uint64_t>(num(value, key));
            } else {
                throw DataError("config: unknown key '" + key + "'");
            }
        } else if (section == "codec") {
            if (key == "frame_rate") cfg.codec.frame_rate = static_cast<int64_t>(num(value, key));
            else if (key == "latent_dim") cfg.codec.latent_dim = static_cast<int64_t>(num(value, key));
            else if (key == "sample_rate") cfg.codec.sample_rate = static_cast<int64_t>(num(value, key));
            else throw DataError("config: unknown [codec] key '" + key + "'");
        } else if (section == "net") {
            if (key == "num_blocks") cfg.net.num_blocks = static_cast<int64_t>(num(value, key));
            else if (key == "hidden_dim") cfg.net.hidden_dim = static_cast<int64_t>(num(value, key));
            else if (key == "num_heads") cfg.net.num_heads = static_cast<int64_t>(num(value, key));
            else if (key == "time_embed_dim") cfg.net.time_embed_dim = static_cast<int64_t>(num(value, key));
            else if (key == "max_frames") cfg.net.max_frames = static_cast<int64_t>(num(value, key));
            else if (key == "ffn_mult") cfg.net.ffn_mult = static_cast<int64_t>(num(value, key));
            else if (key == "use_film") cfg.net.use_film = boolean(value, key);
            else if (key == "use_cross_attention") cfg.net.use_cross_attention = boolean(value, key);
            else throw DataError("config: unknown [net] key '" + key + "'");
        } else if (section == "train") {
            if (key == "steps") cfg.train.steps = static_cast<int64_t>(num(value, key));
            else if (key == "batch_size") cfg.train.batch_size = static_cast<int64_t>(num(value, key));
            else if (key == "lr") cfg.train.lr = num(value, key);
            else if (key == "log_every") cfg.train.log_every = static_cast<int64_t>(num(value, key));
            else if (key == "checkpoint_every") cfg.train.checkpoint_every = static_cast<int64_t>(num(value, key));
            else if (key == "ema_decay") cfg.train.ema_decay = num(value, key);
            else throw DataError("config: unknown [train] key '" + key + "'");
        } else if (section == "solver") {
            if (key == "method") cfg.solver.method = ode_method_from_string(value);
            else if (key == "steps") cfg.solver.steps = static_cast<int64_t>(num(value, key));
            else if (key == "rtol") cfg.solver.rtol = num(value, key);
            else if (key == "atol") cfg.solver.atol = num(value, key);
            else if (key == "initial_dt") cfg.solver.initial_dt = num(value, key);
            else if (key == "max_steps") cfg.solver.max_steps = static_cast<int64_t>(num(value, key));
            else throw DataError("config: unknown [solver] key '" + key + "'");
        } else if (section == "paths") {
            if (key == "dataset_root") cfg.dataset_root = value;
            else if (key == "checkpoint_dir") cfg.checkpoint_dir = value;
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "hrir") cfg.hrir_path = value;
            else throw DataError("config: unknown [paths] key '" + key + "'");
        } else if (section == "prepare") {
            if (key == "clip_seconds") cfg.clip_seconds = num(value, key);
            else throw DataError("config: unknown [prepare] key '" + key + "'");
        } else {
            throw DataError("config: unknown section [" + section + "]");
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("config: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse(buf.str());
}

void PipelineConfig::validate() const {
    codec.validate();
    // Token features are derived from the codec latent width.
    NetConfig synced = net;
    synced.latent_dim = codec.latent_dim;
    synced.validate();
    if (clip_seconds <= 0.0) throw DataError("config: clip_seconds must be positive");
    const int64_t frames_per_clip = static_cast<int64_t>(clip_seconds *
                                                         static_cast<double>(codec.frame_rate));
    if (frames_per_clip > net.max_frames) {
        throw DataError("config: clip of " + std::to_string(frames_per_clip) +
                        " frames exceeds net max_frames " + std::to_string(net.max_frames));
    }
}

std::string PipelineConfig::serialize() const {
    std::ostringstream os;
    os.precision(17);
    os << "profile = " << profile << "\n";
    os << "seed = " << seed << "\n\n";
    os << "[codec]\n";
    os << "frame_rate = " << codec.frame_rate << "\n";
    os << "latent_dim = " << codec.latent_dim << "\n";
    os << "sample_rate = " << codec.sample_rate << "\n\n";
    os << "[net]\n";
    os << "num_blocks = " << net.num_blocks << "\n";
    os << "hidden_dim = " << net.hidden_dim << "\n";
    os << "num_heads = " << net.num_heads << "\n";
    os << "time_embed_dim = " << net.time_embed_dim << "\n";
    os << "max_frames = " << net.max_frames << "\n";
    os << "ffn_mult = " << net.ffn_mult << "\n";
    os << "use_film = " << (net.use_film ? "true" : "false") << "\n";
    os << "use_cross_attention = " << (net.use_cross_attention ? "true" : "false") << "\n\n";
    os << "[train]\n";
    os << "steps = " << train.steps << "\n";
    os << "batch_size = " << train.batch_size << "\n";
    os << "lr = " << train.lr << "\n";
    os << "log_every = " << train.log_every << "\n";
    os << "checkpoint_every = " << train.checkpoint_every << "\n";
    os << "ema_decay = " << train.ema_decay << "\n\n";
    os << "[solver]\n";
    os << "method = " << to_string(solver.method) << "\n";
    os << "steps = " << solver.steps << "\n";
    os << "rtol = " << solver.rtol << "\n";
    os << "atol = " << solver.atol << "\n";
    os << "initial_dt = " << solver.initial_dt << "\n";
    os << "max_steps = " << solver.max_steps << "\n\n";
    os << "[paths]\n";
    os << "dataset_root = " << dataset_root << "\n";
    os << "checkpoint_dir = " << checkpoint_dir << "\n";
    os << "output_dir = " << output_dir << "\n";
    if (!hrir_path.empty()) os << "hrir = " << hrir_path << "\n";
    os << "\n[prepare]\n";
    os << "clip_seconds = " << clip_seconds << "\n";
    return os.str();
}

void PipelineConfig::write_sidecar(const std::string& out_path) const {
    std::ofstream f(out_path + ".resolved.cfg", std::ios::trunc);
    if (!f) throw DataError("config: cannot write sidecar for " + out_path);
    f << serialize();
}

}  // namespace flow714
