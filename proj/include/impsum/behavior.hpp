#pragma once

#include "impsum/corpus.hpp"

#include <string>
#include <vector>

namespace impsum::behavior {

/// Symmetric pairwise distance matrix with zero diagonal.
struct DistanceMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;

    std::size_t size() const { return labels.size(); }
};

enum class PairDistance {
    SpearmanDist, // d = 1 - rho
    Ndcg10Dist,   // d = 1 - (ndcg(a->b) + ndcg(b->a)) / 2
};

/// Per-document distance between every pair of sources, averaged over the
/// common documents. Every source must provide a distribution for every
/// document id.
DistanceMatrix pairwise_distance_matrix(const std::vector<std::string>& sources,
                                        const std::vector<std::string>& doc_ids,
                                        const std::vector<ImportanceDistribution>& dists,
                                        PairDistance distance, int jobs = 1);

struct MdsResult {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> coordinates; // labels x dim
    std::vector<double> eigenvalues;              // all n, descending
};

/// Classical (Torgerson) MDS: double-centers the squared distances and takes
/// the top eigenpairs of a cyclic Jacobi eigendecomposition. Negative
/// eigenvalues clamp to zero. Axes carry a deterministic sign: the first
/// nonzero coordinate of each axis is non-negative.
MdsResult classical_mds(const DistanceMatrix& distances, std::size_t dim = 2);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and matching unit eigenvectors as rows.
struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
EigenResult jacobi_eigen(std::vector<std::vector<double>> a, double tol = 1e-10,
                         std::size_t max_sweeps = 100);

/// Importance-weighted mean normalized position, in (0, 1]; lower values mean
/// the distribution prefers early content. Repeated words enter at their
/// average position.
double positional_bias(const Document& doc, const ImportanceDistribution& dist);

/// Shannon entropy in bits of the normalized distribution.
double entropy(const ImportanceDistribution& dist);

} // namespace impsum::behavior
