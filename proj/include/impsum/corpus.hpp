#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impsum {

/// One word occurrence in a document: the normalized surface form plus its
/// 1-based position in the token sequence.
struct WordToken {
    std::string word;
    std::size_t position = 0;

    bool operator==(const WordToken&) const = default;
};

struct Document {
    std::string doc_id;
    std::string text;
    std::vector<WordToken> words; // always tokenize(text)
    std::vector<std::string> references;

    /// L: document length in word tokens (occurrences, not distinct forms).
    std::size_t length() const { return words.size(); }

    /// Distinct normalized forms in first-occurrence-independent sorted order.
    std::vector<std::string> distinct_words() const;

    /// Mean 1-based position of each distinct form over its occurrences.
    std::map<std::string, double> average_positions() const;
};

struct SummaryEntry {
    int target_words = 0;
    std::string summary;

    bool operator==(const SummaryEntry&) const = default;
};

/// The k length-targeted summaries one model produced for one document.
struct SummarySet {
    std::string doc_id;
    std::string model_id;
    std::vector<SummaryEntry> entries; // target_words distinct within a set

    std::size_t k() const { return entries.size(); }

    bool operator==(const SummarySet&) const = default;
};

/// Per-word scores for one (document, source) pair. Raw scores are selection
/// frequencies in [0,1]; normalized scores form a probability distribution.
struct ImportanceDistribution {
    std::string doc_id;
    std::string source_id;
    std::map<std::string, double> scores; // keyed by normalized word
    bool normalized = false;
};

struct TokenEntry {
    std::string text;
    std::optional<std::size_t> word_index; // 0-based into Document::words
};

/// Subword-token to word-occurrence mapping for one (document, model) pair.
/// Token order matches the row order of the corresponding tensor dumps.
struct TokenMap {
    std::string doc_id;
    std::string model_id;
    std::vector<TokenEntry> tokens;
};

struct CoverageStats {
    std::size_t doc_count = 0;
    std::size_t total_words = 0;
    std::size_t zero_score_words = 0;
    std::size_t annotated_words = 0;
    double zero_pct = 0.0;
    double annotated_pct = 0.0;
    double words_per_article = 0.0;
};

/// Canonical word form: compatibility-folds a small NFKC subset (fullwidth
/// forms, fi/fl ligatures, combining accents composed), lower-cases Latin,
/// and strips punctuation from both ends. Interior characters are kept
/// verbatim, which retains internal apostrophes and hyphens. Returns "" when
/// nothing remains (pure punctuation).
std::string normalize_word(std::string_view raw);

/// Splits on Unicode whitespace and normalizes each piece; empty results are
/// dropped and positions are 1-based over the retained words.
std::vector<WordToken> tokenize(std::string_view text);

Document make_document(std::string doc_id, std::string text,
                       std::vector<std::string> references = {});

// Line-delimited JSON ingestion. Malformed lines raise DataError naming the
// line number; duplicate doc_ids (documents) and duplicate target lengths
// within a (doc, model) group (summaries) are rejected.
std::vector<Document> load_documents(const std::filesystem::path& path);
std::vector<SummarySet> load_summary_sets(const std::filesystem::path& path);
std::vector<TokenMap> load_token_maps(const std::filesystem::path& path);

void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs);
void save_summary_sets(const std::filesystem::path& path, const std::vector<SummarySet>& sets);
void save_token_maps(const std::filesystem::path& path, const std::vector<TokenMap>& maps);

/// Zero-score vs annotated word counts over a corpus; a word is annotated
/// iff its score is > 0. Expects exactly one distribution per document.
CoverageStats annotation_stats(const std::vector<Document>& docs,
                               const std::vector<ImportanceDistribution>& dists);

} // namespace impsum
