#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace flow714 {

// Velocity network hyperparameters. `desk` is the small profile used by the
// test suite and default pipeline; `full` matches the large training recipe
// (12 blocks, 16 heads, hidden 1024, D = 64).
struct NetConfig {
    int64_t num_blocks = 2;
    int64_t hidden_dim = 64;
    int64_t num_heads = 4;
    int64_t latent_dim = 8;
    int64_t target_channels = 12;
    int64_t cond_channels = 2;
    int64_t time_embed_dim = 64;
    int64_t max_frames = 250;
    int64_t ffn_mult = 4;
    bool use_film = true;             // ablation switch
    bool use_cross_attention = true;  // ablation switch

    static NetConfig desk();
    static NetConfig full();

    void validate() const;

    // Closed-form total parameter count; init() asserts against it.
    int64_t parameter_count() const;

    bool operator==(const NetConfig&) const = default;
};

// Ordered (name, shape) list of every parameter tensor; the single source of
// truth for initialization, counting, and checkpoint layout.
std::vector<std::pair<std::string, std::vector<int64_t>>> parameter_specs(const NetConfig& cfg);

}  // namespace flow714
