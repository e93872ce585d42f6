#pragma once

#include "impsum/corpus.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace impsum {

/// Importance distribution plus diagnostics from one estimation pass.
struct EstimateOutcome {
    ImportanceDistribution distribution;
    /// Distinct summary words with no matching source unit; excluded from the
    /// distribution and reported for diagnostics.
    std::size_t abstractive_words = 0;
};

/// Empirical selection frequency: for each word unit of the document, the
/// fraction of summaries whose tokenization contains it. Raw scores are exact
/// multiples of 1/k; words absent from every summary score 0.
EstimateOutcome estimate(const Document& doc, const SummarySet& set);
ImportanceDistribution estimate_importance(const Document& doc, const SummarySet& set);

/// Batched estimation over a corpus; sets must carry one entry per document
/// in `docs` order-independently. Results follow `docs` order for any job
/// count.
std::vector<EstimateOutcome> estimate_batch(const std::vector<Document>& docs,
                                            const std::vector<SummarySet>& sets,
                                            int jobs = 1);

/// Rescales scores to sum to one. All-zero distributions are rejected.
ImportanceDistribution normalize(const ImportanceDistribution& dist);

/// Distributions for one document stacked over the sorted union vocabulary;
/// words absent from a distribution get score 0.
struct Alignment {
    std::vector<std::string> vocabulary; // sorted lexicographically
    std::vector<std::vector<double>> rows; // one row per input, input order
};

Alignment union_align(const std::vector<const ImportanceDistribution*>& dists);
Alignment union_align(const std::vector<ImportanceDistribution>& dists);
Alignment union_align(const ImportanceDistribution& a, const ImportanceDistribution& b);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts; // per bin [edges[i], edges[i+1])
    std::vector<double> fractions;
    std::size_t total = 0;
};

/// Bins all (word, score) pairs of the given distributions. Edges must be
/// strictly increasing and cover [0, 1]; a value lands in the last bin whose
/// lower edge does not exceed it.
Histogram score_histogram(const std::vector<ImportanceDistribution>& dists,
                          const std::vector<double>& bin_edges);

// importance.jsonl: {"doc_id", "source", "normalized", "scores": [[word, s], ...]}
// with words sorted lexicographically.
std::vector<ImportanceDistribution> load_importance(const std::filesystem::path& path);
void save_importance(const std::filesystem::path& path,
                     const std::vector<ImportanceDistribution>& dists);

} // namespace impsum
