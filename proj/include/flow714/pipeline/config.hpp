#pragma once

#include <string>

#include "flow714/codec/codec.hpp"
#include "flow714/flow/train.hpp"
#include "flow714/net/config.hpp"
#include "flow714/ode/solver.hpp"

namespace flow714 {

// End-to-end pipeline settings, parsed from a line-based `key = value` file
// with [section] headers. The `profile` key picks the base defaults (desk or
// full); explicit keys override. Every command writes the fully-resolved
// config next to its outputs.
struct PipelineConfig {
    std::string profile = "desk";
    uint64_t seed = 0;

    CodecConfig codec;
    NetConfig net;
    TrainConfig train;
    SolveConfig solver;

    double clip_seconds = 2.0;
    std::string dataset_root = "data";
    std::string checkpoint_dir = "ckpt";
    std::string output_dir = "out";
    std::string hrir_path;

    static PipelineConfig desk();
    static PipelineConfig full();
    static PipelineConfig parse(const std::string& text);
    static PipelineConfig from_file(const std::string& path);

    void validate() const;
    std::string serialize() const;
    // Writes `<out_path>.resolved.cfg`.
    void write_sidecar(const std::string& out_path) const;
};

}  // namespace flow714
