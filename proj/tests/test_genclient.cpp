#include "impsum/genclient.hpp"
#include "impsum/util.hpp"

#include "support.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <thread>

using namespace impsum;
using namespace impsum::genclient;
using json = nlohmann::json;

namespace {

/// Local chat-completions stub with scriptable behavior per test.
class StubServer {
public:
    explicit StubServer(httplib::Server::Handler handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string completion_body(const std::string& content) {
    return json{{"choices", json::array({{{"message", {{"role", "assistant"},
                                                        {"content", content}}}}})}}
        .dump();
}

GenConfig base_config(const std::string& url) {
    GenConfig cfg;
    cfg.endpoint_url = url;
    cfg.model_name = "stub-model";
    cfg.api_key_env = ""; // no auth header
    cfg.lengths = {10, 20};
    return cfg;
}

} // namespace

TEST_CASE("build_prompt emits the exact templates") {
    const Document doc = make_document("d", "X");
    CHECK(build_prompt(doc, 10, "en", "text") ==
          "Summarize the following text in exactly 10 words: X");
    CHECK(build_prompt(doc, 25, "en", "dialogue") ==
          "Summarize the following dialogue in exactly 25 words: X");
    const Document dialogue = make_document("d", "Y");
    CHECK(build_prompt(dialogue, 30, "fr", "dialogue") ==
          "Résumez le dialogue suivant en exactement 30 mots: Y");
}

TEST_CASE("build_prompt rejects bad lengths and unsupported pairs") {
    const Document doc = make_document("d", "X");
    CHECK_THROWS_AS(build_prompt(doc, 0, "en", "text"), DataError);
    CHECK_THROWS_AS(build_prompt(doc, 10, "fr", "text"), DataError);
    CHECK_THROWS_AS(build_prompt(doc, 10, "de", "text"), DataError);
}

TEST_CASE("config validation") {
    GenConfig cfg = base_config("http://x/y");
    cfg.lengths = {};
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg.lengths = {10, 10};
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg.lengths = {0};
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg.lengths = {10};
    cfg.concurrency_limit = 0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
}

TEST_CASE("generate_summaries collects one entry per length from a mock endpoint") {
    StubServer server([](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        const std::string prompt = body["messages"][0]["content"];
        res.set_content(completion_body("echo: " + prompt.substr(0, 40)), "application/json");
    });
    const Document doc = make_document("d", "alpha beta gamma");
    const auto outcome = generate_summaries(doc, base_config(server.url()));
    REQUIRE(outcome.set.entries.size() == 2);
    CHECK(outcome.set.entries[0].target_words == 10);
    CHECK(outcome.set.entries[1].target_words == 20);
    CHECK(outcome.set.entries[0].summary.substr(0, 5) == "echo:");
    CHECK(outcome.failures.empty());
    CHECK(outcome.http_calls == 2);
}

TEST_CASE("warm cache reruns make zero network calls and identical output") {
    testsupport::TempDir tmp("gencache");
    std::atomic<int> hits{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.set_content(completion_body("summary " + std::to_string(hits.load())),
                        "application/json");
    });
    GenConfig cfg = base_config(server.url());
    cfg.cache_dir = tmp.path() / "cache";
    const Document doc = make_document("d", "alpha beta gamma");

    const auto first = generate_summaries(doc, cfg);
    CHECK(first.http_calls == 2);
    CHECK(first.cache_hits == 0);

    const auto second = generate_summaries(doc, cfg);
    CHECK(second.http_calls == 0);
    CHECK(second.cache_hits == 2);
    CHECK(second.set == first.set);
    CHECK(hits.load() == 2);
}

TEST_CASE("persistent 500s exhaust retries and mark the entry failed") {
    std::atomic<int> calls{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
    });
    GenConfig cfg = base_config(server.url());
    cfg.lengths = {10};
    cfg.max_retries = 2;
    const auto outcome = generate_summaries(make_document("d", "text"), cfg);
    CHECK(outcome.set.entries.empty());
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].target_words == 10);
    CHECK(outcome.failures[0].message == "HTTP 500");
    CHECK(calls.load() == 3); // 1 + max_retries
}

TEST_CASE("a failing length does not stop the others") {
    StubServer server([](const httplib::Request& req, httplib::Response& res) {
        const auto body = json::parse(req.body);
        const std::string prompt = body["messages"][0]["content"];
        if (prompt.find("exactly 10 words") != std::string::npos) {
            res.status = 503;
        } else {
            res.set_content(completion_body("fine"), "application/json");
        }
    });
    GenConfig cfg = base_config(server.url());
    cfg.max_retries = 1;
    const auto outcome = generate_summaries(make_document("d", "text"), cfg);
    REQUIRE(outcome.set.entries.size() == 1);
    CHECK(outcome.set.entries[0].target_words == 20);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].target_words == 10);
}

TEST_CASE("auth failures abort the run") {
    StubServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
    });
    CHECK_THROWS_AS(generate_summaries(make_document("d", "text"), base_config(server.url())),
                    AuthError);
}

TEST_CASE("a configured api key env var must exist") {
    GenConfig cfg = base_config("http://127.0.0.1:1/v1/chat/completions");
    cfg.api_key_env = "IMPSUM_TEST_KEY_THAT_DOES_NOT_EXIST";
    CHECK_THROWS_AS(generate_summaries(make_document("d", "text"), cfg), AuthError);
}

TEST_CASE("the api key travels as a bearer header") {
    std::string seen_auth;
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content(completion_body("ok"), "application/json");
    });
    setenv("IMPSUM_TEST_KEY", "sk-test-123", 1);
    GenConfig cfg = base_config(server.url());
    cfg.api_key_env = "IMPSUM_TEST_KEY";
    cfg.lengths = {10};
    generate_summaries(make_document("d", "text"), cfg);
    CHECK(seen_auth == "Bearer sk-test-123");
    unsetenv("IMPSUM_TEST_KEY");
}

TEST_CASE("at most concurrency_limit requests are in flight") {
    std::atomic<int> in_flight{0};
    std::atomic<int> peak{0};
    StubServer server([&](const httplib::Request&, httplib::Response& res) {
        const int now = ++in_flight;
        int expected = peak.load();
        while (now > expected && !peak.compare_exchange_weak(expected, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(40));
        --in_flight;
        res.set_content(completion_body("ok"), "application/json");
    });
    GenConfig cfg = base_config(server.url());
    cfg.lengths = {10, 20, 30, 40, 50, 60};
    cfg.concurrency_limit = 2;
    generate_summaries(make_document("d", "text"), cfg);
    CHECK(peak.load() <= 2);
    CHECK(peak.load() >= 1);
}

TEST_CASE("the mock lead backend extracts leading words deterministically") {
    GenConfig cfg;
    cfg.endpoint_url = "mock://lead";
    cfg.model_name = "mock-lead";
    cfg.lengths = {2, 4, 100};
    const Document doc = make_document("d", "One two three four five.");
    const auto outcome = generate_summaries(doc, cfg);
    REQUIRE(outcome.set.entries.size() == 3);
    CHECK(outcome.set.entries[0].summary == "One two");
    CHECK(outcome.set.entries[1].summary == "One two three four");
    CHECK(outcome.set.entries[2].summary == "One two three four five.");
    CHECK(outcome.http_calls == 0);

    const auto rerun = generate_summaries(doc, cfg);
    CHECK(rerun.set == outcome.set);
}
