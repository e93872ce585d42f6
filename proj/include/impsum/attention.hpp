#pragma once

#include "impsum/behavior.hpp"
#include "impsum/corpus.hpp"
#include "impsum/tensor.hpp"

#include <map>
#include <string>
#include <vector>

namespace impsum::attention {

/// Column sums of a square attention matrix (incoming attention per token),
/// normalized to sum to one. Rows must be attention distributions: each row
/// sum within 1e-3 of 1 (causal masks leave a zero upper triangle).
std::vector<double> attention_received(const TensorDump& matrix);

/// Folds per-token scores into per-word scores: tokens grouped by word
/// occurrence (mean over subword tokens), occurrences averaged into one score
/// per surface form, result normalized. Tokens without a word index (prompt
/// scaffolding, specials) are dropped.
std::map<std::string, double> token_to_word(const std::vector<double>& token_scores,
                                            const TokenMap& tmap, const Document& doc);

struct AttentionSample {
    int layer = 0;
    int head = 0;
    std::string doc_id;
    TensorDump matrix;
};

struct HeadStats {
    int layer = 0;
    int head = 0;
    // metric name -> per-document values (sorted by doc_id) and moments
    std::map<std::string, std::vector<double>> samples;
    std::map<std::string, double> mean;
    std::map<std::string, double> stddev; // population
    std::size_t sample_count = 0;
};

/// Scores one attention matrix against the normalized importance
/// distribution for its document over the union vocabulary.
std::map<std::string, double> score_sample(const TensorDump& matrix, const TokenMap& tmap,
                                           const Document& doc,
                                           const ImportanceDistribution& importance,
                                           const std::vector<std::string>& metric_names);

/// Per-head metric aggregation over the provided samples. Every sample needs
/// a token map and an importance record for its document. Output is sorted by
/// (layer, head); per-head sample vectors follow ascending doc_id.
std::vector<HeadStats> head_alignment(const std::vector<AttentionSample>& samples,
                                      const std::vector<TokenMap>& token_maps,
                                      const std::vector<Document>& docs,
                                      const std::vector<ImportanceDistribution>& importance,
                                      const std::vector<std::string>& metric_names,
                                      int jobs = 1);

struct LayerSummary {
    int layer = 0;
    std::map<std::string, double> mean_of_head_means;
    std::size_t head_count = 0;
};

std::vector<LayerSummary> layer_summary(const std::vector<HeadStats>& stats);

struct HeadProfile {
    std::string label;
    std::vector<double> values; // per-sample metric values, shared doc order
};

/// Embeds heads by the Euclidean distances between their per-sample score
/// profiles, with an appended ideal profile of all ones. Labels must be
/// unique and every profile must cover the same sample set.
behavior::MdsResult head_profile_mds(const std::vector<HeadProfile>& profiles,
                                     const std::string& ideal_label = "ideal");

} // namespace impsum::attention
