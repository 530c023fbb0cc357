#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "flow714/core/errors.hpp"
#include "flow714/pipeline/commands.hpp"

namespace {

using flow714::PipelineConfig;

struct CommonArgs {
    std::string config_path;
    int64_t seed = -1;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config file");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--out", args.out, "output path");
}

PipelineConfig load_config(const CommonArgs& args) {
    PipelineConfig cfg = args.config_path.empty() ? PipelineConfig::desk()
                                                  : PipelineConfig::from_file(args.config_path);
    if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
    return cfg;
}

std::string default_out(const PipelineConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flow714: stereo to 7.1.4 upmixing via conditional flow matching"};
    app.require_subcommand(1);

    CommonArgs prep_args, train_args, infer_args, bin_args, eval_args, down_args, hrir_args;
    std::string prep_input, infer_ckpt, infer_in, bin_in, bin_hrir, eval_ref, eval_gen, down_in;

    CLI::App* prepare = app.add_subcommand("prepare", "build paired clips, latents, manifest");
    prepare->add_option("input_dir", prep_input, "directory of 7.1.4 WAVs / scene specs")
        ->required();
    add_common(prepare, prep_args);

    CLI::App* train = app.add_subcommand("train", "train the velocity field");
    add_common(train, train_args);

    CLI::App* infer = app.add_subcommand("infer", "stereo WAV -> 7.1.4 WAV");
    infer->add_option("--checkpoint", infer_ckpt, "checkpoint file")->required();
    infer->add_option("input", infer_in, "stereo WAV")->required();
    add_common(infer, infer_args);

    CLI::App* binaural = app.add_subcommand("binauralize", "7.1.4 WAV -> binaural stereo WAV");
    binaural->add_option("input", bin_in, "7.1.4 WAV")->required();
    binaural->add_option("--hrir", bin_hrir, "HRIR fixture file");
    add_common(binaural, bin_args);

    CLI::App* eval = app.add_subcommand("eval", "per-channel report: reference vs generated");
    eval->add_option("reference", eval_ref, "reference 7.1.4 WAV")->required();
    eval->add_option("generated", eval_gen, "generated 7.1.4 WAV")->required();
    add_common(eval, eval_args);

    CLI::App* down = app.add_subcommand("downmix", "7.1.4 WAV -> stereo WAV (fixed matrix)");
    down->add_option("input", down_in, "7.1.4 WAV")->required();
    add_common(down, down_args);

    CLI::App* hrir = app.add_subcommand("synth-hrir", "write the synthetic HRIR fixture set");
    add_common(hrir, hrir_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (prepare->parsed()) {
            PipelineConfig cfg = load_config(prep_args);
            if (!prep_args.out.empty()) cfg.dataset_root = prep_args.out;
            const auto s = flow714::cmd_prepare(cfg, prep_input);
            std::printf("prepared %lld clips (%lld train / %lld test) -> %s\n",
                        static_cast<long long>(s.clips), static_cast<long long>(s.train_clips),
                        static_cast<long long>(s.test_clips), s.manifest_path.c_str());
        } else if (train->parsed()) {
            PipelineConfig cfg = load_config(train_args);
            if (!train_args.out.empty()) cfg.checkpoint_dir = train_args.out;
            const auto s = flow714::cmd_train(cfg);
            std::printf("trained %lld steps%s, loss %.6f -> %.6f, final %s\n",
                        static_cast<long long>(s.trained_steps), s.resumed ? " (resumed)" : "",
                        s.initial_loss, s.final_loss, s.final_checkpoint.c_str());
        } else if (infer->parsed()) {
            PipelineConfig cfg = load_config(infer_args);
            const std::string out =
                infer_args.out.empty() ? default_out(cfg, "upmixed_714.wav") : infer_args.out;
            const auto s = flow714::cmd_infer(cfg, infer_ckpt, infer_in, out);
            std::printf("wrote %s (solver: %lld accepted, %lld rejected, %lld evals",
                        s.output_path.c_str(), static_cast<long long>(s.accepted),
                        static_cast<long long>(s.rejected),
                        static_cast<long long>(s.evaluations));
            if (s.clipped_samples > 0) std::printf("; clipped %zu samples", s.clipped_samples);
            std::printf(")\n");
        } else if (binaural->parsed()) {
            PipelineConfig cfg = load_config(bin_args);
            const std::string hrir_path = !bin_hrir.empty() ? bin_hrir : cfg.hrir_path;
            if (hrir_path.empty()) {
                throw flow714::DataError(
                    "binauralize: no HRIR set; pass --hrir or set [paths] hrir "
                    "(generate one with `flow714 synth-hrir`)");
            }
            const std::string out =
                bin_args.out.empty() ? default_out(cfg, "binaural.wav") : bin_args.out;
            flow714::cmd_binauralize(cfg, bin_in, hrir_path, out);
            std::printf("wrote %s\n", out.c_str());
        } else if (eval->parsed()) {
            PipelineConfig cfg = load_config(eval_args);
            const std::string out =
                eval_args.out.empty() ? default_out(cfg, "report.tsv") : eval_args.out;
            flow714::cmd_eval(cfg, eval_ref, eval_gen, out);
            std::printf("wrote %s\n", out.c_str());
        } else if (down->parsed()) {
            PipelineConfig cfg = load_config(down_args);
            const std::string out =
                down_args.out.empty() ? default_out(cfg, "downmix_st.wav") : down_args.out;
            flow714::cmd_downmix(cfg, down_in, out);
            std::printf("wrote %s\n", out.c_str());
        } else if (hrir->parsed()) {
            PipelineConfig cfg = load_config(hrir_args);
            const std::string out =
                hrir_args.out.empty() ? default_out(cfg, "hrir.ifir") : hrir_args.out;
            flow714::cmd_synth_hrir(cfg, out);
            std::printf("wrote %s\n", out.c_str());
        }
    } catch (const flow714::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const flow714::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
