#include "impsum/behavior.hpp"

#include "impsum/importance.hpp"
#include "impsum/metrics.hpp"
#include "impsum/parallel.hpp"
#include "impsum/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace impsum::behavior {

DistanceMatrix pairwise_distance_matrix(const std::vector<std::string>& sources,
                                        const std::vector<std::string>& doc_ids,
                                        const std::vector<ImportanceDistribution>& dists,
                                        PairDistance distance, int jobs) {
    if (sources.size() < 2) {
        throw DataError("pairwise_distance_matrix needs at least two sources");
    }
    if (doc_ids.empty()) {
        throw DataError("pairwise_distance_matrix needs at least one document");
    }
    std::map<std::pair<std::string, std::string>, const ImportanceDistribution*> lookup;
    for (const auto& dist : dists) {
        lookup[{dist.source_id, dist.doc_id}] = &dist;
    }
    for (const auto& source : sources) {
        for (const auto& doc_id : doc_ids) {
            if (!lookup.count({source, doc_id})) {
                throw DataError("missing distribution for (" + source + ", " + doc_id + ")");
            }
        }
    }

    const std::size_t n = sources.size();
    DistanceMatrix out;
    out.labels = sources;
    out.values.assign(n, std::vector<double>(n, 0.0));

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    // Each pair averages its per-document distances in fixed doc order, so
    // results do not depend on the job count.
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        double acc = 0.0;
        for (const auto& doc_id : doc_ids) {
            const auto* a = lookup.at({sources[i], doc_id});
            const auto* b = lookup.at({sources[j], doc_id});
            const Alignment aligned = union_align(*a, *b);
            double d = 0.0;
            switch (distance) {
                case PairDistance::SpearmanDist:
                    d = 1.0 - metrics::spearman(aligned.rows[0], aligned.rows[1]).value;
                    break;
                case PairDistance::Ndcg10Dist:
                    d = 1.0 - 0.5 * (metrics::ndcg_at_k(aligned.rows[0], aligned.rows[1], 10) +
                                     metrics::ndcg_at_k(aligned.rows[1], aligned.rows[0], 10));
                    break;
            }
            acc += d;
        }
        const double mean = acc / static_cast<double>(doc_ids.size());
        out.values[i][j] = mean;
        out.values[j][i] = mean;
    });
    return out;
}

EigenResult jacobi_eigen(std::vector<std::vector<double>> a, double tol, std::size_t max_sweeps) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        v[i][i] = 1.0;
    }
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            scale = std::max(scale, std::abs(a[i][j]));
        }
    }
    const double threshold = tol * scale;

    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off = std::max(off, std::abs(a[p][q]));
            }
        }
        if (off <= threshold) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) <= threshold * 1e-2) {
                    continue;
                }
                const double app = a[p][p];
                const double aqq = a[q][q];
                const double apq = a[p][q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p][i];
                    const double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i][p];
                    const double viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (a[x][x] != a[y][y]) return a[x][x] > a[y][y];
        return x < y;
    });
    EigenResult out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (const std::size_t idx : order) {
        out.values.push_back(a[idx][idx]);
        std::vector<double> vec(n);
        for (std::size_t i = 0; i < n; ++i) {
            vec[i] = v[i][idx];
        }
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

MdsResult classical_mds(const DistanceMatrix& distances, std::size_t dim) {
    const std::size_t n = distances.size();
    if (n < 3) {
        throw DataError("classical_mds needs at least 3 points");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (distances.values[i].size() != n) {
            throw DataError("distance matrix is not square");
        }
    }

    // B = -1/2 * J * (D o D) * J via the centering identity.
    std::vector<std::vector<double>> sq(n, std::vector<double>(n, 0.0));
    std::vector<double> row_mean(n, 0.0);
    double grand_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sq[i][j] = distances.values[i][j] * distances.values[i][j];
            row_mean[i] += sq[i][j];
        }
        row_mean[i] /= static_cast<double>(n);
        grand_mean += row_mean[i];
    }
    grand_mean /= static_cast<double>(n);
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            b[i][j] = -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + grand_mean);
        }
    }

    const EigenResult eig = jacobi_eigen(std::move(b));

    MdsResult out;
    out.labels = distances.labels;
    out.eigenvalues = eig.values;
    out.coordinates.assign(n, std::vector<double>(dim, 0.0));
    for (std::size_t axis = 0; axis < dim && axis < n; ++axis) {
        const double lambda = std::max(eig.values[axis], 0.0);
        const double factor = std::sqrt(lambda);
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = eig.vectors[axis][i] * factor;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(column[i]) > 1e-12) {
                if (column[i] < 0.0) {
                    for (auto& x : column) {
                        x = -x;
                    }
                }
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.coordinates[i][axis] = column[i];
        }
    }
    return out;
}

double positional_bias(const Document& doc, const ImportanceDistribution& dist) {
    const auto positions = doc.average_positions();
    const double length = static_cast<double>(doc.length());
    double total = 0.0;
    double weighted = 0.0;
    for (const auto& [word, position] : positions) {
        const auto it = dist.scores.find(word);
        const double score = it == dist.scores.end() ? 0.0 : it->second;
        total += score;
        weighted += score * (position / length);
    }
    if (total <= 0.0) {
        throw DataError("positional_bias needs a nonzero importance mass for doc '" +
                        doc.doc_id + "'");
    }
    return weighted / total;
}

double entropy(const ImportanceDistribution& dist) {
    double sum = 0.0;
    for (const auto& [word, score] : dist.scores) {
        if (score < 0.0) {
            throw DataError("entropy saw a negative score");
        }
        sum += score;
    }
    if (sum <= 0.0) {
        throw DataError("entropy needs a nonzero importance mass for doc '" + dist.doc_id + "'");
    }
    double h = 0.0;
    for (const auto& [word, score] : dist.scores) {
        if (score > 0.0) {
            const double p = score / sum;
            h -= p * std::log2(p);
        }
    }
    return h;
}

} // namespace impsum::behavior
