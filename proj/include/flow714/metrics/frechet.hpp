#pragma once

#include <string>

#include "flow714/metrics/embed.hpp"
#include "flow714/tensor/tensor.hpp"

namespace flow714::metrics {

// n x d embedding matrix plus provenance.
struct EmbeddingSet {
    Tensor vectors;  // [n, d]
    std::string provider_id;
    std::string source_channel;
};

// Embedding import/export (magic "IFEM"): d, n, then row-major float64.
void write_embeddings(const EmbeddingSet& set, const std::string& path);
EmbeddingSet read_embeddings(const std::string& path);

// Sample mean and unbiased (n-1) covariance. Requires n >= d + 1.
struct GaussianStats {
    Tensor mean;        // [d]
    Tensor covariance;  // [d, d], symmetric PSD
};

GaussianStats fit_gaussian(const EmbeddingSet& set);

// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix
// by cyclic Jacobi rotations.
void jacobi_eigensymm(const Tensor& matrix, Tensor& eigenvalues, Tensor& eigenvectors);

// Symmetric PSD square root via eigendecomposition; tiny negative
// eigenvalues are clamped to zero.
Tensor sqrt_psd(const Tensor& matrix);

// ||mu_a - mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^(1/2)), the square-root term
// computed on the symmetrized product Sa^(1/2) Sb Sa^(1/2). Clamped at 0.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

}  // namespace flow714::metrics
