#pragma once

#include "impsum/corpus.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace impsum::baselines {

/// Lead-bias proxy: word frequency across the ten truncations to the first
/// 10, 20, ..., 100 words. Words first appearing after position 100 score 0.
ImportanceDistribution first_n_frequency(const Document& doc);

/// Occurrence counts normalized by the document's maximum word frequency.
ImportanceDistribution token_frequency(const Document& doc);

struct TextRankParams {
    std::size_t window = 2;
    double damping = 0.85;
    double tol = 1e-6;
    std::size_t max_iter = 100;
};

struct PageRankResult {
    std::vector<double> scores;
    std::size_t iterations = 0;
};

/// Damped PageRank on an undirected graph given as adjacency lists (degree-
/// normalized neighbor contributions, uniform 1/|V| start, teleport
/// (1-d)/|V|). Iterates until the max absolute score change drops below tol.
PageRankResult pagerank(const std::vector<std::vector<std::size_t>>& adjacency, double damping,
                        double tol, std::size_t max_iter);

/// TextRank keyword scores: co-occurrence graph over word units (edge when
/// two units appear within `window` positions), damped PageRank, then
/// min-max normalization to [0, 1]. A degenerate spread (max == min) maps
/// every word to 1.
ImportanceDistribution textrank(const Document& doc, const TextRankParams& params = {});

/// Build the co-occurrence graph used by textrank; exposed for direct
/// inspection. Vertices follow the sorted distinct-word order.
std::vector<std::vector<std::size_t>> cooccurrence_graph(const Document& doc,
                                                         std::size_t window);

/// Human-frequency proxy: the fraction of reference summaries containing
/// each document word.
ImportanceDistribution human_frequency(const Document& doc,
                                       const std::vector<std::string>& references);

/// Batched baseline over a corpus; method is one of "first_n", "token_freq",
/// "textrank", "human". Output follows docs order for any job count.
std::vector<ImportanceDistribution> baseline_batch(const std::string& method,
                                                   const std::vector<Document>& docs,
                                                   const TextRankParams& params = {},
                                                   int jobs = 1);

} // namespace impsum::baselines
