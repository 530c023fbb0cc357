#include "flow714/net/config.hpp"

#include "flow714/core/errors.hpp"
#include "flow714/tensor/tensor.hpp"

namespace flow714 {

NetConfig NetConfig::desk() { return NetConfig{}; }

NetConfig NetConfig::full() {
    NetConfig cfg;
    cfg.num_blocks = 12;
    cfg.hidden_dim = 1024;
    cfg.num_heads = 16;
    cfg.latent_dim = 64;
    cfg.time_embed_dim = 256;
    cfg.max_frames = 250;
    return cfg;
}

void NetConfig::validate() const {
    if (num_blocks < 1 || hidden_dim < 1 || num_heads < 1 || latent_dim < 1 ||
        target_channels < 1 || cond_channels < 1 || time_embed_dim < 1 || max_frames < 1 ||
        ffn_mult < 1) {
        throw DataError("net config: all sizes must be positive");
    }
    if (hidden_dim % num_heads != 0) {
        throw DataError("net config: hidden_dim " + std::to_string(hidden_dim) +
                        " not divisible by num_heads " + std::to_string(num_heads));
    }
    if (time_embed_dim % 2 != 0) {
        throw DataError("net config: time_embed_dim must be even");
    }
}

std::vector<std::pair<std::string, std::vector<int64_t>>> parameter_specs(const NetConfig& cfg) {
    cfg.validate();
    const int64_t h = cfg.hidden_dim;
    const int64_t in_feat = cfg.target_channels * cfg.latent_dim;
    const int64_t cond_feat = cfg.cond_channels * cfg.latent_dim;
    const int64_t ffn = cfg.ffn_mult * h;

    std::vector<std::pair<std::string, std::vector<int64_t>>> specs;
    specs.emplace_back("in_proj.w", std::vector<int64_t>{in_feat, h});
    specs.emplace_back("in_proj.b", std::vector<int64_t>{h});
    specs.emplace_back("cond_proj.w", std::vector<int64_t>{cond_feat, h});
    specs.emplace_back("cond_proj.b", std::vector<int64_t>{h});
    specs.emplace_back("pos_embed", std::vector<int64_t>{cfg.max_frames, h});
    specs.emplace_back("time_mlp.w1", std::vector<int64_t>{cfg.time_embed_dim, h});
    specs.emplace_back("time_mlp.b1", std::vector<int64_t>{h});
    specs.emplace_back("time_mlp.w2", std::vector<int64_t>{h, h});
    specs.emplace_back("time_mlp.b2", std::vector<int64_t>{h});
    for (int64_t b = 0; b < cfg.num_blocks; ++b) {
        const std::string p = "block" + std::to_string(b) + ".";
        specs.emplace_back(p + "film.w1", std::vector<int64_t>{h, h});
        specs.emplace_back(p + "film.b1", std::vector<int64_t>{h});
        specs.emplace_back(p + "film.w2", std::vector<int64_t>{h, 2 * h});
        specs.emplace_back(p + "film.b2", std::vector<int64_t>{2 * h});
        specs.emplace_back(p + "ln1.g", std::vector<int64_t>{h});
        specs.emplace_back(p + "ln1.b", std::vector<int64_t>{h});
        for (const char* w : {"wq", "wk", "wv", "wo"}) {
            specs.emplace_back(p + "attn." + w, std::vector<int64_t>{h, h});
            specs.emplace_back(p + "attn.b" + std::string(w + 1), std::vector<int64_t>{h});
        }
        specs.emplace_back(p + "ln2.g", std::vector<int64_t>{h});
        specs.emplace_back(p + "ln2.b", std::vector<int64_t>{h});
        for (const char* w : {"wq", "wk", "wv", "wo"}) {
            specs.emplace_back(p + "cross." + w, std::vector<int64_t>{h, h});
            specs.emplace_back(p + "cross.b" + std::string(w + 1), std::vector<int64_t>{h});
        }
        specs.emplace_back(p + "ln3.g", std::vector<int64_t>{h});
        specs.emplace_back(p + "ln3.b", std::vector<int64_t>{h});
        specs.emplace_back(p + "ffn.w1", std::vector<int64_t>{h, ffn});
        specs.emplace_back(p + "ffn.b1", std::vector<int64_t>{ffn});
        specs.emplace_back(p + "ffn.w2", std::vector<int64_t>{ffn, h});
        specs.emplace_back(p + "ffn.b2", std::vector<int64_t>{h});
    }
    specs.emplace_back("final_ln.g", std::vector<int64_t>{h});
    specs.emplace_back("final_ln.b", std::vector<int64_t>{h});
    specs.emplace_back("out_proj.w", std::vector<int64_t>{h, in_feat});
    specs.emplace_back("out_proj.b", std::vector<int64_t>{in_feat});
    return specs;
}

int64_t NetConfig::parameter_count() const {
    validate();
    const int64_t h = hidden_dim;
    const int64_t in_feat = target_channels * latent_dim;
    const int64_t cond_feat = cond_channels * latent_dim;
    const int64_t ffn = ffn_mult * h;
    const int64_t proj = in_feat * h + h + cond_feat * h + h;
    const int64_t pos = max_frames * h;
    const int64_t time_mlp = time_embed_dim * h + h + h * h + h;
    const int64_t film = h * h + h + h * 2 * h + 2 * h;
    const int64_t attn = 4 * (h * h + h);
    const int64_t norms = 3 * 2 * h;
    const int64_t ffn_params = h * ffn + ffn + ffn * h + h;
    const int64_t per_block = film + 2 * attn + norms + ffn_params;
    const int64_t head = 2 * h + h * in_feat + in_feat;
    return proj + pos + time_mlp + num_blocks * per_block + head;
}

}  // namespace flow714
