#include "impsum/baselines.hpp"

#include "impsum/parallel.hpp"
#include "impsum/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace impsum::baselines {

ImportanceDistribution first_n_frequency(const Document& doc) {
    ImportanceDistribution dist;
    dist.doc_id = doc.doc_id;
    dist.source_id = "first_n";
    std::map<std::string, std::size_t> counts;
    for (const auto& word : doc.distinct_words()) {
        counts[word] = 0;
    }
    for (std::size_t n = 10; n <= 100; n += 10) {
        std::set<std::string> truncation;
        for (const auto& token : doc.words) {
            if (token.position > n) break;
            truncation.insert(token.word);
        }
        for (const auto& word : truncation) {
            ++counts[word];
        }
    }
    for (const auto& [word, count] : counts) {
        dist.scores[word] = static_cast<double>(count) / 10.0;
    }
    return dist;
}

ImportanceDistribution token_frequency(const Document& doc) {
    std::map<std::string, std::size_t> counts;
    for (const auto& token : doc.words) {
        ++counts[token.word];
    }
    std::size_t max_count = 0;
    for (const auto& [word, count] : counts) {
        max_count = std::max(max_count, count);
    }
    ImportanceDistribution dist;
    dist.doc_id = doc.doc_id;
    dist.source_id = "token_freq";
    for (const auto& [word, count] : counts) {
        dist.scores[word] = static_cast<double>(count) / static_cast<double>(max_count);
    }
    return dist;
}

PageRankResult pagerank(const std::vector<std::vector<std::size_t>>& adjacency, double damping,
                        double tol, std::size_t max_iter) {
    const std::size_t n = adjacency.size();
    if (n == 0) {
        throw DataError("pagerank needs at least one vertex");
    }
    PageRankResult result;
    result.scores.assign(n, 1.0 / static_cast<double>(n));
    const double teleport = (1.0 - damping) / static_cast<double>(n);
    std::vector<double> next(n, 0.0);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double max_delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (const std::size_t j : adjacency[i]) {
                acc += result.scores[j] / static_cast<double>(adjacency[j].size());
            }
            next[i] = teleport + damping * acc;
            max_delta = std::max(max_delta, std::abs(next[i] - result.scores[i]));
        }
        std::swap(next, result.scores);
        ++result.iterations;
        if (max_delta < tol) {
            break;
        }
    }
    return result;
}

std::vector<std::vector<std::size_t>> cooccurrence_graph(const Document& doc,
                                                         std::size_t window) {
    const std::vector<std::string> vocab = doc.distinct_words();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        index[vocab[i]] = i;
    }
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < doc.words.size(); ++i) {
        for (std::size_t j = i + 1; j < doc.words.size() && j < i + window; ++j) {
            const std::size_t a = index[doc.words[i].word];
            const std::size_t b = index[doc.words[j].word];
            if (a != b) {
                edges.insert({std::min(a, b), std::max(a, b)});
            }
        }
    }
    std::vector<std::vector<std::size_t>> adjacency(vocab.size());
    for (const auto& [a, b] : edges) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    return adjacency;
}

ImportanceDistribution textrank(const Document& doc, const TextRankParams& params) {
    const std::vector<std::string> vocab = doc.distinct_words();
    const auto adjacency = cooccurrence_graph(doc, params.window);
    const PageRankResult pr = pagerank(adjacency, params.damping, params.tol, params.max_iter);

    double lo = pr.scores.front(), hi = pr.scores.front();
    for (const double s : pr.scores) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    ImportanceDistribution dist;
    dist.doc_id = doc.doc_id;
    dist.source_id = "textrank";
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        dist.scores[vocab[i]] = hi > lo ? (pr.scores[i] - lo) / (hi - lo) : 1.0;
    }
    return dist;
}

ImportanceDistribution human_frequency(const Document& doc,
                                       const std::vector<std::string>& references) {
    if (references.empty()) {
        throw DataError("human_frequency needs at least one reference for doc '" + doc.doc_id +
                        "'");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& word : doc.distinct_words()) {
        counts[word] = 0;
    }
    for (const auto& reference : references) {
        std::set<std::string> ref_words;
        for (const auto& token : tokenize(reference)) {
            ref_words.insert(token.word);
        }
        for (const auto& word : ref_words) {
            const auto it = counts.find(word);
            if (it != counts.end()) {
                ++it->second;
            }
        }
    }
    ImportanceDistribution dist;
    dist.doc_id = doc.doc_id;
    dist.source_id = "human";
    for (const auto& [word, count] : counts) {
        dist.scores[word] = static_cast<double>(count) / static_cast<double>(references.size());
    }
    return dist;
}

std::vector<ImportanceDistribution> baseline_batch(const std::string& method,
                                                   const std::vector<Document>& docs,
                                                   const TextRankParams& params, int jobs) {
    std::vector<ImportanceDistribution> out(docs.size());
    if (method == "first_n") {
        parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = first_n_frequency(docs[i]); });
    } else if (method == "token_freq") {
        parallel_for(docs.size(), jobs, [&](std::size_t i) { out[i] = token_frequency(docs[i]); });
    } else if (method == "textrank") {
        parallel_for(docs.size(), jobs,
                     [&](std::size_t i) { out[i] = textrank(docs[i], params); });
    } else if (method == "human") {
        parallel_for(docs.size(), jobs,
                     [&](std::size_t i) { out[i] = human_frequency(docs[i], docs[i].references); });
    } else {
        throw DataError("unknown baseline method '" + method +
                        "' (expected first_n, token_freq, textrank or human)");
    }
    return out;
}

} // namespace impsum::baselines
