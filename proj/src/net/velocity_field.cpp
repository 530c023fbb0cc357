#include "flow714/net/velocity_field.hpp"

#include <cmath>

#include "flow714/core/errors.hpp"
#include "flow714/core/rng.hpp"

namespace flow714 {

namespace {
constexpr double kInitStd = 0.02;

bool is_weight(const std::string& name) {
    const size_t dot = name.rfind('.');
    const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
    return leaf.size() >= 1 && leaf[0] == 'w';
}
}  // namespace

Tensor time_embed_features(double t, int64_t dim) {
    if (t < 0.0 || t > 1.0) {
        throw DataError("time_embed: t=" + std::to_string(t) + " outside [0, 1]");
    }
    if (dim < 2 || dim % 2 != 0) throw DimensionError("time_embed: dim must be even and >= 2");
    const int64_t half = dim / 2;
    // t in [0,1] is stretched to the conventional [0, 1000] timestep range so
    // the geometric frequency ladder actually sweeps its phases.
    const double tau = 1000.0 * t;
    Tensor out = Tensor::zeros({1, dim});
    for (int64_t i = 0; i < half; ++i) {
        const double freq =
            std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
        out.data[static_cast<size_t>(i)] = std::sin(freq * tau);
        out.data[static_cast<size_t>(half + i)] = std::cos(freq * tau);
    }
    return out;
}

Tensor latent_to_tokens(const LatentTensor& z) {
    Tensor tokens = Tensor::zeros({z.frames, z.channels * z.dim});
    for (int64_t c = 0; c < z.channels; ++c)
        for (int64_t d = 0; d < z.dim; ++d)
            for (int64_t t = 0; t < z.frames; ++t)
                tokens.at2(t, c * z.dim + d) = z.at(c, d, t);
    return tokens;
}

LatentTensor tokens_to_latent(const Tensor& tokens, int64_t channels, int64_t dim,
                              int64_t frame_rate) {
    if (tokens.rank() != 2 || tokens.cols() != channels * dim) {
        throw DimensionError("tokens_to_latent: token shape " + tokens.shape_str() +
                             " does not match C*D");
    }
    LatentTensor z = LatentTensor::zeros(channels, dim, tokens.rows(), frame_rate);
    for (int64_t c = 0; c < channels; ++c)
        for (int64_t d = 0; d < dim; ++d)
            for (int64_t t = 0; t < z.frames; ++t)
                z.at(c, d, t) = tokens.at2(t, c * dim + d);
    return z;
}

VelocityField VelocityField::init(const NetConfig& cfg, uint64_t seed) {
    cfg.validate();
    VelocityField net;
    net.config = cfg;
    Rng rng = Rng::stream(seed, 0x6e6574);  // dedicated init stream
    int64_t total = 0;
    for (const auto& [name, shape] : parameter_specs(cfg)) {
        Tensor t = Tensor::zeros(shape);
        const bool zero_init = name.rfind("out_proj.", 0) == 0;
        const bool ln_gain = name.size() > 2 && name.compare(name.size() - 2, 2, ".g") == 0;
        if (ln_gain) {
            for (auto& v : t.data) v = 1.0;
        } else if (!zero_init && (is_weight(name) || name == "pos_embed")) {
            for (auto& v : t.data) v = kInitStd * rng.normal();
        }
        total += t.numel();
        net.params.emplace(name, std::move(t));
    }
    if (total != cfg.parameter_count()) {
        throw NumericalError("net init: parameter count mismatch vs closed form");
    }
    return net;
}

std::map<std::string, Tape::Id> VelocityField::register_params(Tape& tape,
                                                               bool requires_grad) const {
    std::map<std::string, Tape::Id> ids;
    for (const auto& [name, tensor] : params) {
        Tensor copy = tensor;
        copy.requires_grad = requires_grad;
        ids.emplace(name, tape.leaf(std::move(copy)));
    }
    return ids;
}

Tape::Id VelocityField::build_forward(Tape& tape,
                                      const std::map<std::string, Tape::Id>& param_ids,
                                      const LatentTensor& z_t, double t,
                                      const LatentTensor& z_cond) const {
    const NetConfig& cfg = config;
    if (z_t.channels != cfg.target_channels || z_t.dim != cfg.latent_dim) {
        throw DimensionError("forward: target latent " + z_t.shape_str() +
                             " does not match config");
    }
    if (z_cond.channels != cfg.cond_channels || z_cond.dim != cfg.latent_dim) {
        throw DimensionError("forward: condition latent " + z_cond.shape_str() +
                             " does not match config");
    }
    if (z_t.frames != z_cond.frames) {
        throw DimensionError("forward: frame count mismatch, target " + z_t.shape_str() +
                             " vs condition " + z_cond.shape_str());
    }
    if (z_t.frames > cfg.max_frames) {
        throw DimensionError("forward: " + std::to_string(z_t.frames) +
                             " frames exceed max_frames " + std::to_string(cfg.max_frames));
    }

    const auto P = [&](const std::string& name) -> Tape::Id {
        const auto it = param_ids.find(name);
        if (it == param_ids.end()) throw DataError("forward: missing parameter " + name);
        return it->second;
    };
    const auto linear = [&](Tape::Id x, const std::string& w, const std::string& b) {
        return tape.add_rowvec(tape.matmul(x, P(w)), P(b));
    };

    const int64_t frames = z_t.frames;
    const int64_t h = cfg.hidden_dim;
    const int64_t dh = h / cfg.num_heads;
    const double attn_scale = 1.0 / std::sqrt(static_cast<double>(dh));

    const auto attention = [&](Tape::Id queries, Tape::Id keys_values,
                               const std::string& prefix) {
        const Tape::Id q = linear(queries, prefix + ".wq", prefix + ".bq");
        const Tape::Id k = linear(keys_values, prefix + ".wk", prefix + ".bk");
        const Tape::Id v = linear(keys_values, prefix + ".wv", prefix + ".bv");
        std::vector<Tape::Id> heads;
        heads.reserve(static_cast<size_t>(cfg.num_heads));
        for (int64_t head = 0; head < cfg.num_heads; ++head) {
            const Tape::Id qh = tape.slice_cols(q, head * dh, dh);
            const Tape::Id kh = tape.slice_cols(k, head * dh, dh);
            const Tape::Id vh = tape.slice_cols(v, head * dh, dh);
            const Tape::Id weights = tape.softmax(tape.scale(tape.matmul_nt(qh, kh), attn_scale));
            heads.push_back(tape.matmul(weights, vh));
        }
        return linear(tape.concat_cols(heads), prefix + ".wo", prefix + ".bo");
    };

    // Token embeddings with shared learned positions.
    const Tape::Id pos = tape.slice_rows(P("pos_embed"), 0, frames);
    Tape::Id x = tape.add(linear(tape.leaf(latent_to_tokens(z_t)), "in_proj.w", "in_proj.b"),
                          pos);
    const Tape::Id cond = tape.add(
        linear(tape.leaf(latent_to_tokens(z_cond)), "cond_proj.w", "cond_proj.b"), pos);

    // FiLM context: time embedding plus mean-pooled condition.
    const Tape::Id t_feat = tape.leaf(time_embed_features(t, cfg.time_embed_dim));
    const Tape::Id t_emb = tape.add_rowvec(
        tape.matmul(tape.gelu(tape.add_rowvec(tape.matmul(t_feat, P("time_mlp.w1")),
                                              P("time_mlp.b1"))),
                    P("time_mlp.w2")),
        P("time_mlp.b2"));
    const Tape::Id ctx = tape.add(t_emb, tape.mean_rows(cond));

    for (int64_t b = 0; b < cfg.num_blocks; ++b) {
        const std::string p = "block" + std::to_string(b) + ".";
        if (cfg.use_film) {
            const Tape::Id f = tape.add_rowvec(
                tape.matmul(tape.gelu(tape.add_rowvec(tape.matmul(ctx, P(p + "film.w1")),
                                                      P(p + "film.b1"))),
                            P(p + "film.w2")),
                P(p + "film.b2"));
            x = tape.film(x, tape.slice_cols(f, 0, h), tape.slice_cols(f, h, h));
        }
        const Tape::Id n1 = tape.layer_norm(x, P(p + "ln1.g"), P(p + "ln1.b"), 1e-5);
        x = tape.add(x, attention(n1, n1, p + "attn"));
        if (cfg.use_cross_attention) {
            x = tape.add(x, attention(tape.layer_norm(x, P(p + "ln2.g"), P(p + "ln2.b"), 1e-5),
                                      cond, p + "cross"));
        }
        const Tape::Id ff_in = tape.layer_norm(x, P(p + "ln3.g"), P(p + "ln3.b"), 1e-5);
        const Tape::Id ff =
            linear(tape.gelu(linear(ff_in, p + "ffn.w1", p + "ffn.b1")), p + "ffn.w2",
                   p + "ffn.b2");
        x = tape.add(x, ff);
    }

    const Tape::Id out = linear(tape.layer_norm(x, P("final_ln.g"), P("final_ln.b"), 1e-5),
                                "out_proj.w", "out_proj.b");
    return out;
}

LatentTensor VelocityField::forward(const LatentTensor& z_t, double t,
                                    const LatentTensor& z_cond) const {
    Tape tape;
    const auto ids = register_params(tape, /*requires_grad=*/false);
    const Tape::Id out = build_forward(tape, ids, z_t, t, z_cond);
    return tokens_to_latent(tape.value(out), config.target_channels, config.latent_dim,
                            z_t.frame_rate);
}

}  // namespace flow714
