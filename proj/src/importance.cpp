#include "impsum/importance.hpp"

#include "impsum/parallel.hpp"
#include "impsum/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace impsum {

namespace {
using json = nlohmann::json;
}

EstimateOutcome estimate(const Document& doc, const SummarySet& set) {
    if (doc.doc_id != set.doc_id) {
        throw DataError("summary set for doc '" + set.doc_id + "' applied to doc '" +
                        doc.doc_id + "'");
    }
    if (set.entries.empty()) {
        throw DataError("summary set for doc '" + set.doc_id + "' is empty");
    }
    const double k = static_cast<double>(set.k());

    // Integer membership counts divided once at the end, so scores are exact
    // multiples of 1/k.
    std::map<std::string, std::size_t> counts;
    for (const auto& word : doc.distinct_words()) {
        counts[word] = 0;
    }
    std::set<std::string> abstractive;
    for (const auto& entry : set.entries) {
        std::set<std::string> summary_words;
        for (const auto& token : tokenize(entry.summary)) {
            summary_words.insert(token.word);
        }
        for (const auto& word : summary_words) {
            const auto it = counts.find(word);
            if (it != counts.end()) {
                ++it->second;
            } else {
                abstractive.insert(word);
            }
        }
    }

    EstimateOutcome out;
    out.distribution.doc_id = doc.doc_id;
    out.distribution.source_id = set.model_id;
    for (const auto& [word, count] : counts) {
        out.distribution.scores[word] = static_cast<double>(count) / k;
    }
    out.abstractive_words = abstractive.size();
    return out;
}

ImportanceDistribution estimate_importance(const Document& doc, const SummarySet& set) {
    return estimate(doc, set).distribution;
}

std::vector<EstimateOutcome> estimate_batch(const std::vector<Document>& docs,
                                            const std::vector<SummarySet>& sets,
                                            int jobs) {
    std::map<std::string, const SummarySet*> by_doc;
    for (const auto& set : sets) {
        by_doc[set.doc_id] = &set;
    }
    std::vector<const SummarySet*> matched(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto it = by_doc.find(docs[i].doc_id);
        if (it == by_doc.end()) {
            throw DataError("no summary set for doc '" + docs[i].doc_id + "'");
        }
        matched[i] = it->second;
    }
    std::vector<EstimateOutcome> out(docs.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) {
        out[i] = estimate(docs[i], *matched[i]);
    });
    return out;
}

ImportanceDistribution normalize(const ImportanceDistribution& dist) {
    double sum = 0.0;
    for (const auto& [word, score] : dist.scores) {
        sum += score;
    }
    if (sum <= 0.0) {
        throw DataError("cannot normalize all-zero distribution for doc '" + dist.doc_id + "'");
    }
    ImportanceDistribution out = dist;
    for (auto& [word, score] : out.scores) {
        score /= sum;
    }
    out.normalized = true;
    return out;
}

Alignment union_align(const std::vector<const ImportanceDistribution*>& dists) {
    if (dists.empty()) {
        throw DataError("union_align needs at least one distribution");
    }
    const std::string& doc_id = dists.front()->doc_id;
    std::set<std::string> vocab;
    for (const auto* dist : dists) {
        if (dist->doc_id != doc_id) {
            throw DataError("union_align over mixed doc_ids: '" + doc_id + "' vs '" +
                            dist->doc_id + "'");
        }
        for (const auto& [word, score] : dist->scores) {
            vocab.insert(word);
        }
    }
    Alignment out;
    out.vocabulary.assign(vocab.begin(), vocab.end());
    out.rows.reserve(dists.size());
    for (const auto* dist : dists) {
        std::vector<double> row;
        row.reserve(out.vocabulary.size());
        for (const auto& word : out.vocabulary) {
            const auto it = dist->scores.find(word);
            row.push_back(it == dist->scores.end() ? 0.0 : it->second);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

Alignment union_align(const std::vector<ImportanceDistribution>& dists) {
    std::vector<const ImportanceDistribution*> ptrs;
    ptrs.reserve(dists.size());
    for (const auto& dist : dists) {
        ptrs.push_back(&dist);
    }
    return union_align(ptrs);
}

Alignment union_align(const ImportanceDistribution& a, const ImportanceDistribution& b) {
    return union_align(std::vector<const ImportanceDistribution*>{&a, &b});
}

Histogram score_histogram(const std::vector<ImportanceDistribution>& dists,
                          const std::vector<double>& bin_edges) {
    if (dists.empty()) {
        throw DataError("score_histogram needs at least one distribution");
    }
    if (bin_edges.size() < 2) {
        throw DataError("score_histogram needs at least two bin edges");
    }
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (bin_edges[i] <= bin_edges[i - 1]) {
            throw DataError("bin edges must be strictly increasing");
        }
    }
    if (bin_edges.front() > 0.0 || bin_edges.back() < 1.0) {
        throw DataError("bin edges must cover [0, 1]");
    }
    Histogram hist;
    hist.edges = bin_edges;
    hist.counts.assign(bin_edges.size() - 1, 0);
    for (const auto& dist : dists) {
        for (const auto& [word, score] : dist.scores) {
            const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), score);
            std::size_t bin = it == bin_edges.begin()
                                  ? 0
                                  : static_cast<std::size_t>(it - bin_edges.begin()) - 1;
            bin = std::min(bin, hist.counts.size() - 1);
            ++hist.counts[bin];
            ++hist.total;
        }
    }
    if (hist.total == 0) {
        throw DataError("score_histogram saw no (word, score) pairs");
    }
    hist.fractions.reserve(hist.counts.size());
    for (const auto count : hist.counts) {
        hist.fractions.push_back(static_cast<double>(count) / static_cast<double>(hist.total));
    }
    return hist;
}

std::vector<ImportanceDistribution> load_importance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open file: " + path.string());
    }
    std::vector<ImportanceDistribution> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
            ImportanceDistribution dist;
            dist.doc_id = record.at("doc_id").get<std::string>();
            dist.source_id = record.at("source").get<std::string>();
            dist.normalized = record.at("normalized").get<bool>();
            for (const auto& pair : record.at("scores")) {
                const auto word = pair.at(0).get<std::string>();
                const auto score = pair.at(1).get<double>();
                if (!dist.scores.emplace(word, score).second) {
                    throw DataError("duplicate word '" + word + "'");
                }
            }
            out.push_back(std::move(dist));
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void save_importance(const std::filesystem::path& path,
                     const std::vector<ImportanceDistribution>& dists) {
    std::string out;
    for (const auto& dist : dists) {
        json scores = json::array();
        for (const auto& [word, score] : dist.scores) { // std::map: sorted keys
            scores.push_back({word, score});
        }
        json record{{"doc_id", dist.doc_id},
                    {"source", dist.source_id},
                    {"normalized", dist.normalized},
                    {"scores", scores}};
        out += record.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace impsum
