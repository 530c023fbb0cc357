#include "flow714/metrics/frechet.hpp"

#include <cmath>
#include <fstream>

#include "flow714/core/binio.hpp"
#include "flow714/core/errors.hpp"
#include "flow714/core/kernels.hpp"

namespace flow714::metrics {

namespace {
constexpr char kMagic[4] = {'I', 'F', 'E', 'M'};
}

void write_embeddings(const EmbeddingSet& set, const std::string& path) {
    if (set.vectors.rank() != 2) throw DimensionError("write_embeddings: vectors must be [n,d]");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("write_embeddings: cannot open " + path);
    binio::write_magic(f, kMagic);
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(set.vectors.cols()));
    binio::write_le<uint32_t>(f, static_cast<uint32_t>(set.vectors.rows()));
    for (double v : set.vectors.data) binio::write_le<double>(f, v);
}

EmbeddingSet read_embeddings(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("read_embeddings: cannot open " + path);
    binio::expect_magic(f, kMagic, "embedding import");
    const auto d = binio::read_le<uint32_t>(f, "d");
    const auto n = binio::read_le<uint32_t>(f, "n");
    if (d == 0 || n == 0) throw DataError("read_embeddings: empty matrix");
    EmbeddingSet set;
    set.provider_id = "imported";
    set.vectors = Tensor::zeros({static_cast<int64_t>(n), static_cast<int64_t>(d)});
    for (auto& v : set.vectors.data) v = binio::read_le<double>(f, "embedding data");
    return set;
}

GaussianStats fit_gaussian(const EmbeddingSet& set) {
    if (set.vectors.rank() != 2) throw DimensionError("fit_gaussian: vectors must be [n,d]");
    const int64_t n = set.vectors.rows();
    const int64_t d = set.vectors.cols();
    if (n < d + 1) {
        throw DataError("fit_gaussian: need at least d+1 = " + std::to_string(d + 1) +
                        " samples, got " + std::to_string(n));
    }
    check_finite(set.vectors, "fit_gaussian");
    GaussianStats g{Tensor::zeros({d}), Tensor::zeros({d, d})};
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < d; ++j) g.mean.data[j] += set.vectors.at2(i, j);
    for (auto& v : g.mean.data) v /= static_cast<double>(n);
    for (int64_t i = 0; i < n; ++i) {
        for (int64_t a = 0; a < d; ++a) {
            const double da = set.vectors.at2(i, a) - g.mean.data[a];
            for (int64_t b = a; b < d; ++b) {
                const double db = set.vectors.at2(i, b) - g.mean.data[b];
                g.covariance.at2(a, b) += da * db;
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (int64_t a = 0; a < d; ++a) {
        for (int64_t b = a; b < d; ++b) {
            const double v = g.covariance.at2(a, b) * inv;
            g.covariance.at2(a, b) = v;
            g.covariance.at2(b, a) = v;
        }
    }
    return g;
}

void jacobi_eigensymm(const Tensor& matrix, Tensor& eigenvalues, Tensor& eigenvectors) {
    if (matrix.rank() != 2 || matrix.rows() != matrix.cols()) {
        throw DimensionError("jacobi: matrix must be square, got " + matrix.shape_str());
    }
    const int64_t n = matrix.rows();
    Tensor a = matrix;
    // Symmetrize against representation noise.
    for (int64_t i = 0; i < n; ++i)
        for (int64_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a.at2(i, j) + a.at2(j, i));
            a.at2(i, j) = v;
            a.at2(j, i) = v;
        }
    Tensor v = Tensor::zeros({n, n});
    for (int64_t i = 0; i < n; ++i) v.at2(i, i) = 1.0;

    double scale = 0.0;
    for (double x : a.data) scale = std::max(scale, std::fabs(x));
    const double tol = scale > 0.0 ? 1e-14 * scale : 0.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int64_t p = 0; p < n; ++p)
            for (int64_t q = p + 1; q < n; ++q) off = std::max(off, std::fabs(a.at2(p, q)));
        if (off <= tol) break;
        for (int64_t p = 0; p < n; ++p) {
            for (int64_t q = p + 1; q < n; ++q) {
                const double apq = a.at2(p, q);
                if (std::fabs(apq) <= tol) continue;
                const double app = a.at2(p, p), aqq = a.at2(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int64_t k = 0; k < n; ++k) {
                    const double akp = a.at2(k, p), akq = a.at2(k, q);
                    a.at2(k, p) = c * akp - s * akq;
                    a.at2(k, q) = s * akp + c * akq;
                }
                for (int64_t k = 0; k < n; ++k) {
                    const double apk = a.at2(p, k), aqk = a.at2(q, k);
                    a.at2(p, k) = c * apk - s * aqk;
                    a.at2(q, k) = s * apk + c * aqk;
                }
                for (int64_t k = 0; k < n; ++k) {
                    const double vkp = v.at2(k, p), vkq = v.at2(k, q);
                    v.at2(k, p) = c * vkp - s * vkq;
                    v.at2(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues = Tensor::zeros({n});
    for (int64_t i = 0; i < n; ++i) eigenvalues.data[static_cast<size_t>(i)] = a.at2(i, i);
    eigenvectors = std::move(v);
}

Tensor sqrt_psd(const Tensor& matrix) {
    Tensor evals, evecs;
    jacobi_eigensymm(matrix, evals, evecs);
    const int64_t n = matrix.rows();
    double max_ev = 0.0;
    for (double l : evals.data) max_ev = std::max(max_ev, std::fabs(l));
    for (double l : evals.data) {
        if (l < -1e-8 * std::max(1.0, max_ev)) {
            throw NumericalError("sqrt_psd: matrix is not PSD beyond tolerance");
        }
    }
    // V * diag(sqrt(max(l, 0))) * V^T
    Tensor scaled = evecs;  // columns scaled by sqrt(eigenvalue)
    for (int64_t j = 0; j < n; ++j) {
        const double s = std::sqrt(std::max(evals.data[static_cast<size_t>(j)], 0.0));
        for (int64_t i = 0; i < n; ++i) scaled.at2(i, j) *= s;
    }
    Tensor out = Tensor::zeros({n, n});
    kernels::matmul_nt(scaled.data.data(), evecs.data.data(), out.data.data(), n, n, n);
    return out;
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
    const int64_t d = a.mean.numel();
    if (b.mean.numel() != d || a.covariance.rows() != d || b.covariance.rows() != d) {
        throw DimensionError("frechet_distance: dimension mismatch");
    }
    double mean_term = 0.0;
    for (int64_t i = 0; i < d; ++i) {
        const double diff = a.mean.data[static_cast<size_t>(i)] -
                            b.mean.data[static_cast<size_t>(i)];
        mean_term += diff * diff;
    }
    double tr_a = 0.0, tr_b = 0.0;
    for (int64_t i = 0; i < d; ++i) {
        tr_a += a.covariance.at2(i, i);
        tr_b += b.covariance.at2(i, i);
    }
    // Tr((Sa Sb)^(1/2)) via the symmetrized product Sa^(1/2) Sb Sa^(1/2).
    const Tensor root_a = sqrt_psd(a.covariance);
    Tensor tmp = Tensor::zeros({d, d});
    kernels::matmul(root_a.data.data(), b.covariance.data.data(), tmp.data.data(), d, d, d);
    Tensor prod = Tensor::zeros({d, d});
    kernels::matmul(tmp.data.data(), root_a.data.data(), prod.data.data(), d, d, d);
    Tensor evals, evecs;
    jacobi_eigensymm(prod, evals, evecs);
    double tr_sqrt = 0.0;
    for (double l : evals.data) tr_sqrt += std::sqrt(std::max(l, 0.0));

    return std::max(0.0, mean_term + tr_a + tr_b - 2.0 * tr_sqrt);
}

}  // namespace flow714::metrics
