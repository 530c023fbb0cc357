#include "flow714/metrics/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "flow714/core/errors.hpp"
#include "flow714/core/fft.hpp"

namespace flow714::metrics {

namespace {

constexpr double kRmsFloor = 1e-4;  // -80 dBFS

double rms_db(const double* x, int64_t n) {
    double acc = 0.0;
    for (int64_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return 20.0 * std::log10(std::max(std::sqrt(acc / static_cast<double>(n)), kRmsFloor));
}

// Time-averaged power spectrum over 1024-sample frames, hop 512.
std::vector<double> mean_spectrum(const double* x, int64_t n) {
    constexpr int64_t kFrame = 1024, kHop = 512;
    const int64_t frames = n <= kFrame ? 1 : 1 + (n - kFrame) / kHop;
    std::vector<double> acc(kFrame / 2 + 1, 0.0);
    std::vector<double> frame(kFrame, 0.0);
    for (int64_t f = 0; f < frames; ++f) {
        for (int64_t i = 0; i < kFrame; ++i) {
            const int64_t src = f * kHop + i;
            frame[static_cast<size_t>(i)] = src < n ? x[src] : 0.0;
        }
        const std::vector<double> p = power_spectrum(frame);
        for (size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
    }
    for (auto& v : acc) v /= static_cast<double>(frames);
    return acc;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) {
        // Degenerate (constant) spectra: identical -> 1, otherwise 0.
        return a == b ? 1.0 : 0.0;
    }
    return sab / std::sqrt(saa * sbb);
}

// Gaussian fit over sliding-window embeddings; nullopt when too short.
bool windowed_gaussian(const double* x, int64_t n, int64_t rate,
                       const EmbeddingProvider& provider, GaussianStats& out) {
    const int64_t win = rate / 5;    // 0.2 s
    const int64_t hop = rate / 25;   // 0.04 s
    if (n < win) return false;
    const int64_t count = 1 + (n - win) / hop;
    if (count < provider.dim() + 1) return false;
    EmbeddingSet set;
    set.provider_id = provider.id();
    set.vectors = Tensor::zeros({count, provider.dim()});
    for (int64_t w = 0; w < count; ++w) {
        const auto e = provider.embed({x + w * hop, static_cast<size_t>(win)}, rate);
        for (int64_t j = 0; j < provider.dim(); ++j) {
            set.vectors.at2(w, j) = e[static_cast<size_t>(j)];
        }
    }
    out = fit_gaussian(set);
    return true;
}

}  // namespace

ChannelReport channel_report(const MultichannelAudio& ref, const MultichannelAudio& gen,
                             const EmbeddingProvider& provider) {
    if (!(ref.layout == gen.layout)) {
        throw DataError("channel_report: layouts differ");
    }
    if (ref.sample_rate != gen.sample_rate) {
        throw DataError("channel_report: sample rates differ");
    }

    ChannelReport report;
    MultichannelAudio aligned = gen;
    if (gen.num_samples != ref.num_samples) {
        report.length_adjusted = true;
        aligned = MultichannelAudio::silence(gen.layout, gen.sample_rate, ref.num_samples);
        const int64_t copy = std::min(ref.num_samples, gen.num_samples);
        for (int64_t c = 0; c < gen.channel_count(); ++c) {
            for (int64_t i = 0; i < copy; ++i) aligned.at(c, i) = gen.at(c, i);
        }
    }

    const int64_t n = ref.num_samples;
    for (int64_t c = 0; c < ref.channel_count(); ++c) {
        ChannelReportRow row;
        row.channel = ref.layout.channel(c).name;
        row.rms_db_error =
            std::fabs(rms_db(ref.channel(c), n) - rms_db(aligned.channel(c), n));
        row.spectral_correlation =
            pearson(mean_spectrum(ref.channel(c), n), mean_spectrum(aligned.channel(c), n));
        GaussianStats gr, gg;
        if (windowed_gaussian(ref.channel(c), n, ref.sample_rate, provider, gr) &&
            windowed_gaussian(aligned.channel(c), n, ref.sample_rate, provider, gg)) {
            row.frechet = frechet_distance(gr, gg);
        } else {
            row.frechet = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_report_tsv(const ChannelReport& report, std::ostream& os) {
    os << "channel\trms_db_error\tspectral_correlation\tfrechet\n";
    os.precision(10);
    for (const ChannelReportRow& row : report.rows) {
        os << row.channel << '\t' << row.rms_db_error << '\t' << row.spectral_correlation
           << '\t' << row.frechet << '\n';
    }
}

void write_report_tsv(const ChannelReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("report: cannot open " + path);
    write_report_tsv(report, f);
    if (!f) throw DataError("report: write failed: " + path);
}

}  // namespace flow714::metrics
