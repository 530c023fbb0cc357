#pragma once

#include "flow714/ode/solver.hpp"
#include "flow714/pipeline/config.hpp"
#include "flow714/pipeline/manifest.hpp"

namespace flow714 {

// Library-level implementations of the CLI subcommands. Each writes its
// outputs plus a resolved-config sidecar and returns a small summary.

struct PrepareSummary {
    std::string manifest_path;
    int64_t clips = 0;
    int64_t train_clips = 0;
    int64_t test_clips = 0;
};

// Scans input_dir for 7.1.4 WAVs (*.wav) and scene specs (*.scene), segments
// them into clips, builds stereo pairs with the fixed downmix, pre-extracts
// latents for both sides, and writes the manifest. Deterministic and
// idempotent for unchanged inputs.
PrepareSummary cmd_prepare(const PipelineConfig& cfg, const std::string& input_dir);

struct TrainSummary {
    int64_t trained_steps = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::string final_checkpoint;
    bool resumed = false;
};

// Trains on the manifest's train split, standardizing latents with pooled
// train-split statistics (stored in every checkpoint). Resumes from the
// newest step checkpoint in checkpoint_dir when one exists.
TrainSummary cmd_train(const PipelineConfig& cfg);

struct InferSummary {
    std::string output_path;
    int64_t accepted = 0;
    int64_t rejected = 0;
    int64_t evaluations = 0;
    size_t clipped_samples = 0;
};

// stereo WAV -> encode -> ODE from seeded noise -> decode -> 7.1.4 WAV.
InferSummary cmd_infer(const PipelineConfig& cfg, const std::string& checkpoint_path,
                       const std::string& wav_in, const std::string& wav_out);

void cmd_binauralize(const PipelineConfig& cfg, const std::string& wav_in,
                     const std::string& hrir_path, const std::string& wav_out);

void cmd_eval(const PipelineConfig& cfg, const std::string& ref_wav, const std::string& gen_wav,
              const std::string& out_tsv);

void cmd_downmix(const PipelineConfig& cfg, const std::string& wav_in,
                 const std::string& wav_out);

// Writes the synthetic HRIR fixture set.
void cmd_synth_hrir(const PipelineConfig& cfg, const std::string& out_path);

}  // namespace flow714
