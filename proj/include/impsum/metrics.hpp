#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace impsum::metrics {

/// Correlation result; `degenerate` is set when either input is constant, in
/// which case the value is 0 by convention.
struct Correlation {
    double value = 0.0;
    bool degenerate = false;
};

/// Spearman's rho: Pearson correlation of average fractional ranks.
Correlation spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Kendall's tau-b with tie correction (pair-counting, O(n^2)).
Correlation kendall(const std::vector<double>& x, const std::vector<double>& y);

/// NDCG@k with the reference scores as graded relevance and linear gain.
/// Candidate ties break toward the lower index; aligned vectors produced by
/// union_align carry a lexicographically sorted vocabulary, so this is the
/// ascending-word-order rule. Returns 0 when IDCG is 0.
double ndcg_at_k(const std::vector<double>& reference, const std::vector<double>& candidate,
                 std::size_t k);

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    bool recall_defined = true; // false when the relevant set is empty
};

/// Relevant set = words with reference score > 0.
PrecisionRecall precision_recall_at_k(const std::vector<double>& reference,
                                      const std::vector<double>& candidate, std::size_t k);

/// KL divergence in nats; q is epsilon-smoothed and renormalized.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

/// Jensen-Shannon divergence in bits (base-2 halves), bounded by [0, 1].
double jsd(const std::vector<double>& p, const std::vector<double>& q);

/// Renyi divergence of order alpha (nats); alpha != 1.
double renyi(const std::vector<double>& p, const std::vector<double>& q, double alpha);

/// |top-k(ref) ∩ top-k(cand)| / |top-k(ref) ∪ top-k(cand)|.
double jaccard_at_k(const std::vector<double>& reference, const std::vector<double>& candidate,
                    std::size_t k);

/// Indices of the top-k entries by descending score, ties toward lower index.
std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k);

// ---------------------------------------------------------------------------
// Metric registry: the names accepted by the compare CLI and the theoretical
// ranges the meta-evaluation uses.

struct MetricSpec {
    std::string name;   // canonical form, e.g. "ndcg@10", "renyi@2"
    double lo = 0.0;
    double hi = 1.0;
    bool bounded = true;
    bool needs_normalized = false; // divergences require probability inputs
};

/// Parses "spearman", "kendall", "ndcg@K", "p@K", "r@K", "jaccard@K", "kl",
/// "jsd", "renyi@ALPHA". Throws DataError on unknown names.
MetricSpec parse_metric(const std::string& name);

/// Evaluates one parsed metric on an aligned pair (reference, candidate).
/// Degenerate correlation inputs yield 0 per the convention above.
double evaluate_metric(const MetricSpec& spec, const std::vector<double>& reference,
                       const std::vector<double>& candidate);

// ---------------------------------------------------------------------------
// Metric meta-evaluation.

struct MetaRow {
    std::string metric;
    double discrimination = 0.0; // population std-dev across model means
    double sensitivity = 0.0;    // observed range / theoretical range
    double norm_discrimination = 0.0;
    double norm_sensitivity = 0.0;
    double composite = 0.0;
    bool unbounded_range = false; // sensitivity defaulted to 1 and flagged
};

/// Ranks metrics by the average of min-max-normalized discrimination and
/// sensitivity, descending. Input: metric name -> (model -> mean score).
std::vector<MetaRow> meta_evaluate(
    const std::map<std::string, std::map<std::string, double>>& scores);

} // namespace impsum::metrics
