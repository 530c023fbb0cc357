#pragma once

#include <memory>
#include <span>
#include <string>

#include "flow714/tensor/tensor.hpp"

namespace flow714::metrics {

// Pluggable audio embedding. The default DSP provider keeps evaluation
// hermetic; externally computed embedding matrices can be imported from
// file instead (see embedding_set.hpp).
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual int64_t dim() const = 0;
    virtual std::vector<double> embed(std::span<const double> samples,
                                      int64_t sample_rate) const = 0;
};

// Deterministic signal-statistics embedding, 37 dims:
//   [0..31]  log-mel band energies (dB, floor -80)
//   [32]     spectral centroid (Hz)
//   [33]     spectral rolloff at 85% energy (Hz)
//   [34]     spectral flatness (geometric/arithmetic power ratio)
//   [35]     frame-energy mean (dB, floor -80)
//   [36]     frame-energy variance (dB^2)
// Frames: 1024 samples, hop 512, Hann window.
class DspEmbedding : public EmbeddingProvider {
public:
    static constexpr int64_t kMelBands = 32;
    static constexpr double kFloorDb = -80.0;

    std::string id() const override { return "dsp-stats-v1"; }
    int64_t dim() const override { return kMelBands + 5; }
    std::vector<double> embed(std::span<const double> samples,
                              int64_t sample_rate) const override;
};

}  // namespace flow714::metrics
