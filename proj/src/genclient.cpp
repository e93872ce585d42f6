#include "impsum/genclient.hpp"

#include <nlohmann/json.hpp>

#include <httplib.h> // CPPHTTPLIB_OPENSSL_SUPPORT comes from the build when OpenSSL is present

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

namespace impsum::genclient {

namespace {

using json = nlohmann::json;

std::string sanitize_for_filename(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                        (c >= 'A' && c <= 'Z') || c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out.substr(0, 64);
}

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw DataError("endpoint url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

/// First N whitespace-separated pieces of the raw text; the deterministic
/// lead-biased stand-in for a summarization model.
std::string lead_summary(const std::string& text, int n_words) {
    std::string out;
    int taken = 0;
    std::size_t i = 0;
    while (i < text.size() && taken < n_words) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) {
            if (taken > 0) out += ' ';
            out.append(text, i, j - i);
            ++taken;
        }
        i = j;
    }
    return out;
}

struct FetchResult {
    bool ok = false;
    std::string summary;
    std::string error;
    std::size_t http_calls = 0;
    bool cache_hit = false;
};

std::filesystem::path cache_path(const GenConfig& cfg, const Document& doc, int n,
                                 const std::string& prompt) {
    const std::uint64_t h = fnv1a64(prompt, fnv1a64(cfg.model_name, fnv1a64(doc.doc_id)));
    return cfg.cache_dir / (sanitize_for_filename(doc.doc_id) + "." +
                            sanitize_for_filename(cfg.model_name) + "." + std::to_string(n) +
                            "." + to_hex(h) + ".json");
}

FetchResult fetch_one(const GenConfig& cfg, const Document& doc, int n,
                      const std::string& api_key) {
    const std::string prompt = build_prompt(doc, n, cfg.language, cfg.genre);
    FetchResult result;

    std::filesystem::path cached;
    if (!cfg.cache_dir.empty()) {
        cached = cache_path(cfg, doc, n, prompt);
        if (std::filesystem::exists(cached)) {
            try {
                const json entry = json::parse(slurp_file(cached));
                result.ok = true;
                result.summary = entry.at("summary").get<std::string>();
                result.cache_hit = true;
                return result;
            } catch (const std::exception&) {
                // unreadable cache entry: refetch and overwrite
            }
        }
    }

    const ParsedUrl url = parse_url(cfg.endpoint_url);
    const json body{{"model", cfg.model_name},
                    {"temperature", cfg.temperature},
                    {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    httplib::Client client(url.base);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    httplib::Headers headers;
    if (!api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key);
    }

    const int attempts = 1 + std::max(cfg.max_retries, 0);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        ++result.http_calls;
        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        if (!res) {
            result.error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthError("endpoint rejected credentials (HTTP " +
                            std::to_string(res->status) + ")");
        }
        if (res->status >= 500 || res->status == 429) {
            result.error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            result.error = "HTTP " + std::to_string(res->status);
            break; // other 4xx: not retryable
        }
        try {
            const json reply = json::parse(res->body);
            result.summary = reply.at("choices").at(0).at("message").at("content")
                                 .get<std::string>();
            result.ok = true;
            break;
        } catch (const json::exception& e) {
            result.error = std::string("unparsable response: ") + e.what();
            continue;
        }
    }

    if (result.ok && !cached.empty()) {
        std::filesystem::create_directories(cfg.cache_dir);
        write_file_atomic(cached, json{{"summary", result.summary}}.dump());
    }
    return result;
}

} // namespace

void GenConfig::validate() const {
    if (lengths.empty()) {
        throw DataError("gen config needs at least one target length");
    }
    std::set<int> seen;
    for (const int n : lengths) {
        if (n < 1) {
            throw DataError("target lengths must be >= 1");
        }
        if (!seen.insert(n).second) {
            throw DataError("duplicate target length " + std::to_string(n));
        }
    }
    if (concurrency_limit < 1) {
        throw DataError("concurrency_limit must be >= 1");
    }
    if (endpoint_url.empty()) {
        throw DataError("gen config needs an endpoint_url");
    }
}

std::string build_prompt(const Document& doc, int n_words, const std::string& language,
                         const std::string& genre) {
    if (n_words < 1) {
        throw DataError("prompt needs a target length >= 1");
    }
    const std::string n = std::to_string(n_words);
    if (language == "en" && genre == "text") {
        return "Summarize the following text in exactly " + n + " words: " + doc.text;
    }
    if (language == "en" && genre == "dialogue") {
        return "Summarize the following dialogue in exactly " + n + " words: " + doc.text;
    }
    if (language == "fr" && genre == "dialogue") {
        return "Résumez le dialogue suivant en exactement " + n + " mots: " + doc.text;
    }
    throw DataError("unsupported (language, genre) pair: (" + language + ", " + genre + ")");
}

GenOutcome generate_summaries(const Document& doc, const GenConfig& cfg) {
    cfg.validate();

    std::vector<int> lengths = cfg.lengths;
    std::sort(lengths.begin(), lengths.end());

    GenOutcome outcome;
    outcome.set.doc_id = doc.doc_id;
    outcome.set.model_id = cfg.model_name;

    if (cfg.endpoint_url == "mock://lead") {
        for (const int n : lengths) {
            build_prompt(doc, n, cfg.language, cfg.genre); // validates (language, genre)
            outcome.set.entries.push_back({n, lead_summary(doc.text, n)});
        }
        return outcome;
    }

    std::string api_key;
    if (!cfg.api_key_env.empty()) {
        const char* value = std::getenv(cfg.api_key_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw AuthError("environment variable '" + cfg.api_key_env + "' is not set");
        }
        api_key = value;
    }

    std::vector<FetchResult> results(lengths.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.concurrency_limit), lengths.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= lengths.size()) {
                    return;
                }
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (error) return; // an abort is pending; stop picking up work
                }
                try {
                    results[i] = fetch_one(cfg, doc, lengths[i], api_key);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const FetchResult& r = results[i];
        outcome.http_calls += r.http_calls;
        if (r.cache_hit) {
            ++outcome.cache_hits;
        }
        if (r.ok) {
            outcome.set.entries.push_back({lengths[i], r.summary});
        } else {
            outcome.failures.push_back({lengths[i], r.error});
        }
    }
    return outcome;
}

} // namespace impsum::genclient
