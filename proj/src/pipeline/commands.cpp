#include "flow714/pipeline/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "flow714/audio/downmix.hpp"
#include "flow714/audio/scene.hpp"
#include "flow714/audio/wav.hpp"
#include "flow714/core/errors.hpp"
#include "flow714/flow/flow.hpp"
#include "flow714/flow/train.hpp"
#include "flow714/metrics/report.hpp"
#include "flow714/net/checkpoint.hpp"
#include "flow714/spatial/binaural.hpp"

namespace flow714 {

namespace fs = std::filesystem;

namespace {

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
}

NetConfig effective_net_config(const PipelineConfig& cfg) {
    NetConfig net = cfg.net;
    net.latent_dim = cfg.codec.latent_dim;
    return net;
}

MultichannelAudio load_714_wav(const PipelineConfig& cfg, const std::string& path) {
    MultichannelAudio a = read_wav(path);
    if (a.sample_rate != cfg.codec.sample_rate) {
        throw DataError("input '" + path + "' is " + std::to_string(a.sample_rate) +
                        " Hz; this pipeline requires " + std::to_string(cfg.codec.sample_rate) +
                        " Hz (resampling is out of scope)");
    }
    if (!a.layout.is_714()) {
        throw DataError("input '" + path + "' must be 12-channel 7.1.4, got " +
                        std::to_string(a.channel_count()) + " channels");
    }
    return a;
}

std::map<std::string, Tensor> stats_extras(const LatentStats& target, const LatentStats& cond) {
    return {{"stats.target.mean", target.mean},
            {"stats.target.var", target.variance},
            {"stats.cond.mean", cond.mean},
            {"stats.cond.var", cond.variance}};
}

std::pair<LatentStats, LatentStats> stats_from_extras(const std::map<std::string, Tensor>& ex) {
    const auto need = [&](const std::string& name) -> const Tensor& {
        const auto it = ex.find(name);
        if (it == ex.end()) throw DataError("checkpoint: missing " + name);
        return it->second;
    };
    return {{need("stats.target.mean"), need("stats.target.var")},
            {need("stats.cond.mean"), need("stats.cond.var")}};
}

int64_t latest_checkpoint_step(const std::string& dir, std::string* path_out) {
    int64_t best = -1;
    if (!fs::is_directory(dir)) return -1;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        int64_t step = 0;
        if (std::sscanf(name.c_str(), "checkpoint_step_%ld.ifck", &step) == 1) {
            if (step > best) {
                best = step;
                if (path_out != nullptr) *path_out = entry.path().string();
            }
        }
    }
    return best;
}

}  // namespace

PrepareSummary cmd_prepare(const PipelineConfig& cfg, const std::string& input_dir) {
    cfg.validate();
    if (!fs::is_directory(input_dir)) {
        throw DataError("prepare: input directory '" + input_dir + "' does not exist");
    }
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
        const std::string ext = entry.path().extension().string();
        if (ext == ".wav" || ext == ".scene") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        throw DataError("prepare: no .wav or .scene inputs in '" + input_dir +
                        "'; refusing to write an empty manifest");
    }

    const fs::path root(cfg.dataset_root);
    fs::create_directories(root / "clips");
    fs::create_directories(root / "latents");
    const DownmixMatrix matrix = DownmixMatrix::ac3_default();

    CodecConfig stereo_codec = cfg.codec;  // same geometry for both sides

    DatasetManifest manifest;
    PrepareSummary summary;
    for (const fs::path& input : inputs) {
        const std::string stem = input.stem().string();
        MultichannelAudio full_audio =
            input.extension() == ".scene"
                ? synth_scene(SceneSpec::load(input.string()),
                              splitmix64(cfg.seed ^ fnv1a64(stem)))
                : load_714_wav(cfg, input.string());
        if (input.extension() == ".scene" && full_audio.sample_rate != cfg.codec.sample_rate) {
            throw DataError("prepare: scene '" + stem + "' is not at " +
                            std::to_string(cfg.codec.sample_rate) + " Hz");
        }

        const std::vector<MultichannelAudio> clips = segment(full_audio, cfg.clip_seconds);
        for (size_t k = 0; k < clips.size(); ++k) {
            const std::string id = stem + "_c" + std::to_string(k);
            ManifestEntry e;
            e.id = id;
            e.path_714 = "clips/" + id + "_714.wav";
            e.path_stereo = "clips/" + id + "_st.wav";
            e.path_latent_714 = "latents/" + id + "_714.iflt";
            e.path_latent_stereo = "latents/" + id + "_st.iflt";
            e.duration_s = clips[k].duration_seconds();

            const MultichannelAudio stereo = downmix(clips[k], matrix);
            write_wav(clips[k], (root / e.path_714).string(), WavBitDepth::float32);
            write_wav(stereo, (root / e.path_stereo).string(), WavBitDepth::float32);
            write_latent(encode(clips[k], cfg.codec), (root / e.path_latent_714).string());
            write_latent(encode(stereo, stereo_codec), (root / e.path_latent_stereo).string());
            e.checksum = entry_checksum(root.string(), e);

            summary.clips += 1;
            if (is_test_clip(id)) {
                summary.test_clips += 1;
            } else {
                summary.train_clips += 1;
            }
            manifest.entries.push_back(std::move(e));
        }
    }

    summary.manifest_path = (root / "manifest.tsv").string();
    manifest.save(summary.manifest_path);
    cfg.write_sidecar(summary.manifest_path);
    return summary;
}

TrainSummary cmd_train(const PipelineConfig& cfg) {
    cfg.validate();
    const fs::path root(cfg.dataset_root);
    const DatasetManifest manifest = DatasetManifest::load((root / "manifest.tsv").string());

    // Train split, latents loaded from the caches.
    std::vector<FlowPair> dataset;
    std::vector<LatentTensor> targets, conds;
    for (const ManifestEntry& e : manifest.entries) {
        if (is_test_clip(e.id)) continue;
        targets.push_back(read_latent((root / e.path_latent_714).string()));
        conds.push_back(read_latent((root / e.path_latent_stereo).string()));
    }
    if (targets.empty()) throw DataError("train: manifest train split is empty");

    const LatentStats target_stats = pooled_latent_stats(targets);
    const LatentStats cond_stats = pooled_latent_stats(conds);
    for (size_t i = 0; i < targets.size(); ++i) {
        dataset.push_back(
            {standardize(conds[i], cond_stats), standardize(targets[i], target_stats)});
    }

    const NetConfig net_cfg = effective_net_config(cfg);
    fs::create_directories(cfg.checkpoint_dir);

    TrainSummary summary;
    VelocityField net;
    AdamState optimizer;
    int64_t start_step = 0;
    std::string resume_path;
    const int64_t resume_step = latest_checkpoint_step(cfg.checkpoint_dir, &resume_path);
    if (resume_step > 0) {
        const Checkpoint ckpt = load_checkpoint(resume_path);
        net = net_from_checkpoint(ckpt, &net_cfg);
        optimizer = ckpt.optimizer;
        start_step = ckpt.step;
        summary.resumed = true;
    } else {
        net = VelocityField::init(net_cfg, cfg.seed);
    }
    if (start_step >= cfg.train.steps) {
        throw DataError("train: checkpoint already at step " + std::to_string(start_step) +
                        " >= configured steps " + std::to_string(cfg.train.steps));
    }

    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    const auto extras = stats_extras(target_stats, cond_stats);
    const std::string history_path =
        (fs::path(cfg.checkpoint_dir) / "loss_history.tsv").string();

    const TrainCallback checkpoint_cb = [&](int64_t step, double, const VelocityField& n,
                                            const AdamState& opt) {
        char name[64];
        std::snprintf(name, sizeof(name), "checkpoint_step_%ld.ifck", step);
        save_checkpoint((fs::path(cfg.checkpoint_dir) / name).string(), n, opt, step, extras);
    };
    const TrainResult result = train(dataset, net, optimizer, tc, start_step, checkpoint_cb);

    append_loss_history(history_path, result.loss_history);
    auto all_extras = extras;
    if (!result.ema_params.empty()) {
        for (const auto& [name, t] : result.ema_params) all_extras.emplace("ema." + name, t);
    }
    summary.final_checkpoint = (fs::path(cfg.checkpoint_dir) / "checkpoint_final.ifck").string();
    save_checkpoint(summary.final_checkpoint, net, optimizer, cfg.train.steps, all_extras);
    cfg.write_sidecar(summary.final_checkpoint);

    summary.trained_steps = cfg.train.steps - start_step;
    summary.initial_loss = result.loss_history.front().second;
    summary.final_loss = result.loss_history.back().second;
    return summary;
}

InferSummary cmd_infer(const PipelineConfig& cfg, const std::string& checkpoint_path,
                       const std::string& wav_in, const std::string& wav_out) {
    cfg.validate();
    const Checkpoint ckpt = load_checkpoint(checkpoint_path);
    const VelocityField net = net_from_checkpoint(ckpt);
    if (net.config.latent_dim != cfg.codec.latent_dim) {
        throw DataError("infer: checkpoint latent_dim " +
                        std::to_string(net.config.latent_dim) + " != codec latent_dim " +
                        std::to_string(cfg.codec.latent_dim));
    }
    const auto [target_stats, cond_stats] = stats_from_extras(ckpt.extras);

    MultichannelAudio stereo = read_wav(wav_in);
    if (stereo.sample_rate != cfg.codec.sample_rate) {
        throw DataError("infer: input rate " + std::to_string(stereo.sample_rate) +
                        " != configured rate " + std::to_string(cfg.codec.sample_rate));
    }
    if (stereo.channel_count() != 2) {
        throw DataError("infer: input must be stereo, got " +
                        std::to_string(stereo.channel_count()) + " channels");
    }

    const LatentTensor cond = standardize(encode(stereo, cfg.codec), cond_stats);

    LatentTensor z0 = LatentTensor::zeros(net.config.target_channels, net.config.latent_dim,
                                          cond.frames, cond.frame_rate);
    Rng rng = Rng::stream(cfg.seed, 0x696e666572ULL);  // per-run inference stream
    for (auto& v : z0.data) v = rng.normal();

    const SolveReport report = integrate(z0.data, velocity_ode_field(net, cond), cfg.solver);

    LatentTensor z1 = z0;
    z1.data = report.final_state;
    const MultichannelAudio out = decode(destandardize(z1, target_stats), cfg.codec);

    ensure_parent_dir(wav_out);
    InferSummary summary;
    summary.output_path = wav_out;
    summary.accepted = report.accepted;
    summary.rejected = report.rejected;
    summary.evaluations = report.evaluations;
    summary.clipped_samples = write_wav(out, wav_out, WavBitDepth::float32);
    cfg.write_sidecar(wav_out);
    return summary;
}

void cmd_binauralize(const PipelineConfig& cfg, const std::string& wav_in,
                     const std::string& hrir_path, const std::string& wav_out) {
    const spatial::HrirSet set = spatial::read_hrir(hrir_path);
    const MultichannelAudio audio = read_wav(wav_in);
    if (!audio.layout.is_714()) {
        throw DataError("binauralize: input must be 12-channel 7.1.4");
    }
    const MultichannelAudio out =
        spatial::binauralize(audio, set, ChannelLayout::surround_7_1_4());
    ensure_parent_dir(wav_out);
    write_wav(out, wav_out, WavBitDepth::float32);
    cfg.write_sidecar(wav_out);
}

void cmd_eval(const PipelineConfig& cfg, const std::string& ref_wav, const std::string& gen_wav,
              const std::string& out_tsv) {
    const MultichannelAudio ref = read_wav(ref_wav);
    const MultichannelAudio gen = read_wav(gen_wav);
    const metrics::DspEmbedding provider;
    const metrics::ChannelReport report = metrics::channel_report(ref, gen, provider);
    ensure_parent_dir(out_tsv);
    metrics::write_report_tsv(report, out_tsv);
    cfg.write_sidecar(out_tsv);
}

void cmd_downmix(const PipelineConfig& cfg, const std::string& wav_in,
                 const std::string& wav_out) {
    const MultichannelAudio audio = load_714_wav(cfg, wav_in);
    ensure_parent_dir(wav_out);
    write_wav(downmix(audio, DownmixMatrix::ac3_default()), wav_out, WavBitDepth::float32);
    cfg.write_sidecar(wav_out);
}

void cmd_synth_hrir(const PipelineConfig& cfg, const std::string& out_path) {
    ensure_parent_dir(out_path);
    spatial::write_hrir(spatial::synth_hrir_set(cfg.codec.sample_rate), out_path);
    cfg.write_sidecar(out_path);
}

}  // namespace flow714
