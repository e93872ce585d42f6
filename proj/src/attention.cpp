#include "impsum/attention.hpp"

#include "impsum/importance.hpp"
#include "impsum/metrics.hpp"
#include "impsum/parallel.hpp"
#include "impsum/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace impsum::attention {

std::vector<double> attention_received(const TensorDump& matrix) {
    if (matrix.shape.size() != 2 || matrix.shape[0] != matrix.shape[1]) {
        throw DataError("attention matrix must be square");
    }
    const std::size_t n = matrix.shape[0];
    std::vector<double> received(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = matrix.at2(i, j);
            row_sum += a;
            received[j] += a;
        }
        if (std::abs(row_sum - 1.0) > 1e-3) {
            throw DataError("attention row " + std::to_string(i) + " sums to " +
                            format_g9(row_sum) + ", expected 1");
        }
    }
    double total = 0.0;
    for (const double x : received) {
        total += x;
    }
    for (double& x : received) {
        x /= total;
    }
    return received;
}

std::map<std::string, double> token_to_word(const std::vector<double>& token_scores,
                                            const TokenMap& tmap, const Document& doc) {
    if (token_scores.size() != tmap.tokens.size()) {
        throw DataError("token scores (" + std::to_string(token_scores.size()) +
                        ") do not match token map (" + std::to_string(tmap.tokens.size()) + ")");
    }
    // word occurrence -> mean over its subword tokens
    std::map<std::size_t, std::pair<double, std::size_t>> per_occurrence;
    for (std::size_t t = 0; t < tmap.tokens.size(); ++t) {
        const auto& entry = tmap.tokens[t];
        if (!entry.word_index) {
            continue;
        }
        if (*entry.word_index >= doc.words.size()) {
            throw DataError("token map for doc '" + doc.doc_id + "' points past word " +
                            std::to_string(doc.words.size() - 1));
        }
        auto& [sum, count] = per_occurrence[*entry.word_index];
        sum += token_scores[t];
        ++count;
    }
    if (per_occurrence.empty()) {
        throw DataError("token map for doc '" + doc.doc_id + "' has no content tokens");
    }
    // surface form -> mean over its occurrences
    std::map<std::string, std::pair<double, std::size_t>> per_word;
    for (const auto& [index, sc] : per_occurrence) {
        auto& [sum, count] = per_word[doc.words[index].word];
        sum += sc.first / static_cast<double>(sc.second);
        ++count;
    }
    double total = 0.0;
    std::map<std::string, double> out;
    for (const auto& [word, sc] : per_word) {
        const double score = sc.first / static_cast<double>(sc.second);
        out[word] = score;
        total += score;
    }
    if (total <= 0.0) {
        throw DataError("attention mass over content words is zero for doc '" + doc.doc_id + "'");
    }
    for (auto& [word, score] : out) {
        score /= total;
    }
    return out;
}

std::map<std::string, double> score_sample(const TensorDump& matrix, const TokenMap& tmap,
                                           const Document& doc,
                                           const ImportanceDistribution& importance,
                                           const std::vector<std::string>& metric_names) {
    const auto received = attention_received(matrix);
    ImportanceDistribution attn_dist;
    attn_dist.doc_id = doc.doc_id;
    attn_dist.source_id = "attention";
    attn_dist.scores = token_to_word(received, tmap, doc);
    attn_dist.normalized = true;

    const ImportanceDistribution ref = normalize(importance);
    const Alignment aligned = union_align(ref, attn_dist);

    std::map<std::string, double> out;
    for (const auto& name : metric_names) {
        const auto spec = metrics::parse_metric(name);
        out[spec.name] = metrics::evaluate_metric(spec, aligned.rows[0], aligned.rows[1]);
    }
    return out;
}

std::vector<HeadStats> head_alignment(const std::vector<AttentionSample>& samples,
                                      const std::vector<TokenMap>& token_maps,
                                      const std::vector<Document>& docs,
                                      const std::vector<ImportanceDistribution>& importance,
                                      const std::vector<std::string>& metric_names,
                                      int jobs) {
    std::map<std::string, const Document*> doc_index;
    for (const auto& doc : docs) {
        doc_index[doc.doc_id] = &doc;
    }
    std::map<std::string, const TokenMap*> tmap_index;
    for (const auto& tmap : token_maps) {
        tmap_index[tmap.doc_id] = &tmap;
    }
    std::map<std::string, const ImportanceDistribution*> imp_index;
    for (const auto& dist : importance) {
        imp_index[dist.doc_id] = &dist;
    }
    for (const auto& sample : samples) {
        if (!doc_index.count(sample.doc_id)) {
            throw DataError("no document for attention sample doc '" + sample.doc_id + "'");
        }
        if (!tmap_index.count(sample.doc_id)) {
            throw DataError("no token map for doc '" + sample.doc_id + "'");
        }
        if (!imp_index.count(sample.doc_id)) {
            throw DataError("no importance record for doc '" + sample.doc_id + "'");
        }
    }

    std::vector<std::map<std::string, double>> per_sample(samples.size());
    parallel_for(samples.size(), jobs, [&](std::size_t i) {
        const auto& s = samples[i];
        per_sample[i] = score_sample(s.matrix, *tmap_index.at(s.doc_id), *doc_index.at(s.doc_id),
                                     *imp_index.at(s.doc_id), metric_names);
    });

    // (layer, head) -> doc_id -> metric values; doc order then fixed by the map.
    std::map<std::pair<int, int>, std::map<std::string, std::map<std::string, double>>> grouped;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto& per_doc = grouped[{samples[i].layer, samples[i].head}];
        if (!per_doc.emplace(samples[i].doc_id, per_sample[i]).second) {
            throw DataError("duplicate attention sample for (L" + std::to_string(samples[i].layer) +
                            ", H" + std::to_string(samples[i].head) + ", " + samples[i].doc_id +
                            ")");
        }
    }

    std::vector<HeadStats> out;
    for (const auto& [key, per_doc] : grouped) {
        HeadStats stats;
        stats.layer = key.first;
        stats.head = key.second;
        stats.sample_count = per_doc.size();
        for (const auto& [doc_id, values] : per_doc) {
            for (const auto& [metric, value] : values) {
                stats.samples[metric].push_back(value);
            }
        }
        for (const auto& [metric, values] : stats.samples) {
            double mean = 0.0;
            for (const double v : values) {
                mean += v;
            }
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (const double v : values) {
                var += (v - mean) * (v - mean);
            }
            var /= static_cast<double>(values.size());
            stats.mean[metric] = mean;
            stats.stddev[metric] = std::sqrt(var);
        }
        out.push_back(std::move(stats));
    }
    return out;
}

std::vector<LayerSummary> layer_summary(const std::vector<HeadStats>& stats) {
    std::map<int, LayerSummary> by_layer;
    for (const auto& head : stats) {
        auto& layer = by_layer[head.layer];
        layer.layer = head.layer;
        ++layer.head_count;
        for (const auto& [metric, mean] : head.mean) {
            layer.mean_of_head_means[metric] += mean;
        }
    }
    std::vector<LayerSummary> out;
    for (auto& [index, layer] : by_layer) {
        for (auto& [metric, sum] : layer.mean_of_head_means) {
            sum /= static_cast<double>(layer.head_count);
        }
        out.push_back(std::move(layer));
    }
    return out;
}

behavior::MdsResult head_profile_mds(const std::vector<HeadProfile>& profiles,
                                     const std::string& ideal_label) {
    if (profiles.size() < 2) {
        throw DataError("head_profile_mds needs at least two head profiles");
    }
    const std::size_t dim = profiles.front().values.size();
    std::set<std::string> labels;
    for (const auto& profile : profiles) {
        if (profile.values.size() != dim) {
            throw DataError("head profile '" + profile.label + "' covers " +
                            std::to_string(profile.values.size()) + " samples, expected " +
                            std::to_string(dim));
        }
        if (!labels.insert(profile.label).second) {
            throw DataError("duplicate head profile label '" + profile.label + "'");
        }
    }
    if (labels.count(ideal_label)) {
        throw DataError("head profile label collides with ideal label '" + ideal_label + "'");
    }

    std::vector<const std::vector<double>*> vectors;
    behavior::DistanceMatrix distances;
    for (const auto& profile : profiles) {
        distances.labels.push_back(profile.label);
        vectors.push_back(&profile.values);
    }
    const std::vector<double> ideal(dim, 1.0);
    distances.labels.push_back(ideal_label);
    vectors.push_back(&ideal);

    const std::size_t n = vectors.size();
    distances.values.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < dim; ++t) {
                const double d = (*vectors[i])[t] - (*vectors[j])[t];
                acc += d * d;
            }
            distances.values[i][j] = distances.values[j][i] = std::sqrt(acc);
        }
    }
    return behavior::classical_mds(distances, 2);
}

} // namespace impsum::attention
