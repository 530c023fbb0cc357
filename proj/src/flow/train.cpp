#include "flow714/flow/train.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "flow714/core/errors.hpp"

namespace flow714 {

TrainResult train(const std::vector<FlowPair>& dataset, VelocityField& net,
                  AdamState& optimizer, const TrainConfig& cfg, int64_t start_step,
                  const TrainCallback& on_checkpoint) {
    if (dataset.empty()) throw DataError("train: empty dataset");
    if (cfg.steps < 1 || cfg.batch_size < 1 || cfg.lr < 0.0) {
        throw DataError("train: steps >= 1, batch_size >= 1, lr >= 0 required");
    }

    TrainResult result;
    if (cfg.ema_decay > 0.0) result.ema_params = net.params;

    std::vector<std::map<std::string, Tensor>> item_grads(
        static_cast<size_t>(cfg.batch_size));
    std::vector<double> item_loss(static_cast<size_t>(cfg.batch_size), 0.0);
    std::vector<std::string> item_error(static_cast<size_t>(cfg.batch_size));

    for (int64_t step = start_step + 1; step <= cfg.steps; ++step) {
        for (auto& e : item_error) e.clear();
#pragma omp parallel for schedule(static)
        for (int64_t item = 0; item < cfg.batch_size; ++item) {
            try {
                Rng rng = Rng::stream(cfg.seed, static_cast<uint64_t>(step),
                                      static_cast<uint64_t>(item));
                const size_t idx = static_cast<size_t>(rng.below(dataset.size()));
                const FlowBatch batch =
                    sample_path(dataset[idx].target, dataset[idx].cond, rng);
                Tape tape;
                const auto ids = net.register_params(tape, /*requires_grad=*/true);
                const Tape::Id loss_id = flow_loss_on_tape(tape, net, ids, batch);
                item_loss[static_cast<size_t>(item)] = tape.value(loss_id).data[0];
                auto grads = tape.backward(loss_id);
                std::map<std::string, Tensor> named;
                for (const auto& [name, id] : ids) named.emplace(name, std::move(grads.at(id)));
                item_grads[static_cast<size_t>(item)] = std::move(named);
            } catch (const std::exception& e) {
                item_error[static_cast<size_t>(item)] = e.what();
            }
        }
        for (const std::string& err : item_error) {
            if (!err.empty()) {
                throw NumericalError("train: aborted at step " + std::to_string(step) + ": " +
                                     err);
            }
        }

        // Average gradients in item order (deterministic for any thread count).
        std::map<std::string, Tensor> grads = std::move(item_grads[0]);
        for (int64_t item = 1; item < cfg.batch_size; ++item) {
            for (auto& [name, acc] : grads) {
                const Tensor& g = item_grads[static_cast<size_t>(item)].at(name);
                for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += g.data[i];
            }
        }
        const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
        for (auto& [name, acc] : grads) {
            for (auto& v : acc.data) v *= inv_batch;
        }
        double mean_loss = 0.0;
        for (double l : item_loss) mean_loss += l;
        mean_loss *= inv_batch;
        if (!std::isfinite(mean_loss)) {
            throw NumericalError("train: non-finite loss at step " + std::to_string(step));
        }

        adam_step(net.params, grads, optimizer, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);

        if (cfg.ema_decay > 0.0) {
            for (auto& [name, shadow] : result.ema_params) {
                const Tensor& p = net.params.at(name);
                for (size_t i = 0; i < shadow.data.size(); ++i) {
                    shadow.data[i] =
                        cfg.ema_decay * shadow.data[i] + (1.0 - cfg.ema_decay) * p.data[i];
                }
            }
        }

        result.loss_history.emplace_back(step, mean_loss);
        if (on_checkpoint && cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) {
            on_checkpoint(step, mean_loss, net, optimizer);
        }
    }
    return result;
}

void append_loss_history(const std::string& path,
                         const std::vector<std::pair<int64_t, double>>& history) {
    std::ofstream f(path, std::ios::app);
    if (!f) throw DataError("loss history: cannot open " + path);
    std::ostringstream os;
    os.precision(17);
    for (const auto& [step, loss] : history) os << step << '\t' << loss << '\n';
    f << os.str();
    if (!f) throw DataError("loss history: write failed: " + path);
}

}  // namespace flow714
