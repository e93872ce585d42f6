#pragma once

#include "impsum/corpus.hpp"
#include "impsum/util.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace impsum::genclient {

struct GenConfig {
    /// Chat-completions endpoint, e.g. "http://host:port/v1/chat/completions".
    /// The scheme "mock://lead" selects the built-in deterministic lead
    /// extractor (first N words of the document), which needs no network.
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env; // name of the env var holding the key
    std::vector<int> lengths = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::string language = "en"; // "en" | "fr"
    std::string genre = "text";  // "text" | "dialogue"
    double temperature = 0.0;
    int max_retries = 2;
    int concurrency_limit = 4;
    std::filesystem::path cache_dir;

    void validate() const;
};

/// Length-variant summarization prompt. Supported (language, genre) pairs:
/// en/text, en/dialogue, fr/dialogue.
std::string build_prompt(const Document& doc, int n_words, const std::string& language,
                         const std::string& genre);

struct GenFailure {
    int target_words = 0;
    std::string message;
};

struct GenOutcome {
    SummarySet set; // entries in ascending target_words; failed lengths absent
    std::vector<GenFailure> failures;
    std::size_t http_calls = 0;
    std::size_t cache_hits = 0;
};

/// One summary per configured length. Responses are cached by
/// (doc_id, model, N, prompt hash); a warm cache performs zero network calls.
/// Exhausted retries mark the entry failed and the run continues; HTTP
/// 401/403 aborts.
GenOutcome generate_summaries(const Document& doc, const GenConfig& cfg);

/// Error that aborts a generation run (bad credentials or unusable endpoint).
struct AuthError : DataError {
    using DataError::DataError;
};

} // namespace impsum::genclient
