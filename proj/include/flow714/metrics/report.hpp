#pragma once

#include <ostream>

#include "flow714/audio/audio.hpp"
#include "flow714/metrics/frechet.hpp"

namespace flow714::metrics {

struct ChannelReportRow {
    std::string channel;
    double rms_db_error = 0.0;
    double spectral_correlation = 0.0;
    double frechet = 0.0;  // NaN when the clip is too short for a covariance
};

struct ChannelReport {
    std::vector<ChannelReportRow> rows;  // layout order
    bool length_adjusted = false;        // gen was trimmed/padded to ref length
};

// Per-channel diagnostics between a reference and a generated 7.1.4 buffer:
// RMS error in dB (floor -80 dBFS), Pearson correlation of the time-averaged
// power spectra, and the Fréchet distance between Gaussians fitted to
// windowed embeddings (0.2 s windows, 0.04 s hop).
ChannelReport channel_report(const MultichannelAudio& ref, const MultichannelAudio& gen,
                             const EmbeddingProvider& provider);

// Tab-separated table, fixed header row, one row per channel.
void write_report_tsv(const ChannelReport& report, std::ostream& os);
void write_report_tsv(const ChannelReport& report, const std::string& path);

}  // namespace flow714::metrics
