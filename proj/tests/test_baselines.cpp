#include "impsum/baselines.hpp"
#include "impsum/util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

using namespace impsum;
using namespace impsum::baselines;

namespace {

// Dense linear-solve oracle for the damped PageRank stationary point:
// (I - d * M) s = ((1 - d)/n) 1 with M[i][j] = 1/deg(j) for j ~ i.
std::vector<double> stationary_pagerank(const std::vector<std::vector<std::size_t>>& adjacency,
                                        double damping) {
    const std::size_t n = adjacency.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = 1.0;
        for (const std::size_t j : adjacency[i]) {
            a[i][j] -= damping / static_cast<double>(adjacency[j].size());
        }
        a[i][n] = (1.0 - damping) / static_cast<double>(n);
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0.0) continue;
            const double f = a[row][col] / a[col][col];
            for (std::size_t k = col; k <= n; ++k) {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = a[i][n] / a[i][i];
    }
    return s;
}

// Random undirected graph with no isolated vertices (random tree + extras).
std::vector<std::vector<std::size_t>> random_graph(std::mt19937& gen, std::size_t n) {
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 1; v < n; ++v) {
        const std::size_t u = gen() % v;
        edges.insert({u, v});
    }
    const std::size_t extras = gen() % (n + 1);
    for (std::size_t e = 0; e < extras; ++e) {
        const std::size_t u = gen() % n;
        const std::size_t v = gen() % n;
        if (u != v) edges.insert({std::min(u, v), std::max(u, v)});
    }
    std::vector<std::vector<std::size_t>> adjacency(n);
    for (const auto& [u, v] : edges) {
        adjacency[u].push_back(v);
        adjacency[v].push_back(u);
    }
    return adjacency;
}

std::string spread_doc_text(std::size_t n) {
    std::string text;
    for (std::size_t i = 1; i <= n; ++i) {
        text += "w" + std::to_string(i) + " ";
    }
    return text;
}

} // namespace

TEST_CASE("first_n_frequency scores by truncation membership") {
    const Document doc = make_document("d", spread_doc_text(150));
    const auto dist = first_n_frequency(doc);
    CHECK(dist.scores.at("w5") == doctest::Approx(1.0));   // in all 10 truncations
    CHECK(dist.scores.at("w95") == doctest::Approx(0.1));  // only in the 100-word one
    CHECK(dist.scores.at("w150") == 0.0);                  // beyond position 100
    CHECK(dist.scores.at("w15") == doctest::Approx(0.9));  // misses only the 10-word one
}

TEST_CASE("first_n_frequency depends only on the first 100 words") {
    const Document head = make_document("d", spread_doc_text(100));
    const Document extended = make_document("d", spread_doc_text(100) + " tail junk words here");
    const auto a = first_n_frequency(head);
    const auto b = first_n_frequency(extended);
    for (const auto& [word, score] : a.scores) {
        CHECK(b.scores.at(word) == score);
    }
    CHECK(b.scores.at("tail") == 0.0);
}

TEST_CASE("first_n scores are multiples of one tenth") {
    const Document doc = make_document("d", spread_doc_text(120));
    for (const auto& [word, score] : first_n_frequency(doc).scores) {
        CHECK(score * 10.0 == doctest::Approx(std::round(score * 10.0)));
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
    }
}

TEST_CASE("token_frequency normalizes by the max count") {
    const auto dist = token_frequency(make_document("d", "a a b"));
    CHECK(dist.scores.at("a") == doctest::Approx(1.0));
    CHECK(dist.scores.at("b") == doctest::Approx(0.5));

    const auto counts = token_frequency(make_document("d", "x x x x y y z"));
    CHECK(counts.scores.at("x") == doctest::Approx(1.0));
    CHECK(counts.scores.at("y") == doctest::Approx(0.5));
    CHECK(counts.scores.at("z") == doctest::Approx(0.25));
}

TEST_CASE("token_frequency is all ones when words are unique") {
    const auto dist = token_frequency(make_document("d", "one two three"));
    for (const auto& [word, score] : dist.scores) {
        CHECK(score == 1.0);
    }
}

TEST_CASE("pagerank matches the dense stationary solve on random graphs") {
    std::mt19937 gen(2024);
    for (int round = 0; round < 20; ++round) {
        const std::size_t n = 2 + gen() % 7;
        const auto adjacency = random_graph(gen, n);
        const auto pr = pagerank(adjacency, 0.85, 1e-12, 2000);
        const auto exact = stationary_pagerank(adjacency, 0.85);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(pr.scores[i] == doctest::Approx(exact[i]).epsilon(1e-6));
            sum += pr.scores[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("pagerank ranks the chain middle highest") {
    // a-b-c: textrank over "a b c" with window 2
    const Document doc = make_document("d", "a b c");
    const auto dist = textrank(doc);
    CHECK(dist.scores.at("b") == doctest::Approx(1.0)); // max after min-max
    CHECK(dist.scores.at("a") == doctest::Approx(dist.scores.at("c")).epsilon(1e-9));
    CHECK(dist.scores.at("a") < dist.scores.at("b"));

    // oracle: stationary solve of the 3-node chain
    const auto exact = stationary_pagerank({{1}, {0, 2}, {1}}, 0.85);
    CHECK(exact[1] > exact[0]);
    const auto pr = pagerank({{1}, {0, 2}, {1}}, 0.85, 1e-12, 2000);
    for (int i = 0; i < 3; ++i) {
        CHECK(pr.scores[i] == doctest::Approx(exact[i]).epsilon(1e-9));
    }
}

TEST_CASE("pagerank on a star matches the closed form") {
    // center 0 with m leaves; closed form s_center = (1 + d m) / (n (1 + d))
    const std::size_t m = 5;
    std::vector<std::vector<std::size_t>> adjacency(m + 1);
    for (std::size_t leaf = 1; leaf <= m; ++leaf) {
        adjacency[0].push_back(leaf);
        adjacency[leaf].push_back(0);
    }
    const double d = 0.85;
    const double n = static_cast<double>(m + 1);
    const double center = (1.0 + d * static_cast<double>(m)) / (n * (1.0 + d));
    const auto pr = pagerank(adjacency, d, 1e-12, 5000);
    CHECK(pr.scores[0] == doctest::Approx(center).epsilon(1e-9));
    for (std::size_t leaf = 1; leaf <= m; ++leaf) {
        CHECK(pr.scores[leaf] < pr.scores[0]);
    }
}

TEST_CASE("textrank min-max puts equal scores at 1") {
    const auto dist = textrank(make_document("d", "alpha beta"));
    CHECK(dist.scores.at("alpha") == 1.0);
    CHECK(dist.scores.at("beta") == 1.0);
}

TEST_CASE("textrank scores a single-word doc 1") {
    const auto dist = textrank(make_document("d", "lonely"));
    CHECK(dist.scores.at("lonely") == 1.0);
}

TEST_CASE("textrank output lies in [0, 1]") {
    const Document doc = make_document(
        "d", "the cat sat on the mat while the dog barked at the cat in the yard");
    const auto dist = textrank(doc);
    for (const auto& [word, score] : dist.scores) {
        CHECK(score >= 0.0);
        CHECK(score <= 1.0);
    }
}

TEST_CASE("duplicated disconnected components rank identically") {
    // two copies of the same chain inside one graph
    const std::vector<std::vector<std::size_t>> adjacency{{1}, {0, 2}, {1},
                                                          {4}, {3, 5}, {4}};
    const auto pr = pagerank(adjacency, 0.85, 1e-12, 2000);
    for (int i = 0; i < 3; ++i) {
        CHECK(pr.scores[i] == doctest::Approx(pr.scores[i + 3]).epsilon(1e-10));
    }
}

TEST_CASE("cooccurrence window connects only adjacent units at window 2") {
    const Document doc = make_document("d", "a b c");
    const auto adjacency = cooccurrence_graph(doc, 2);
    // vocab sorted: a, b, c
    CHECK(adjacency[0] == std::vector<std::size_t>{1});
    CHECK(adjacency[1] == std::vector<std::size_t>{0, 2});
    CHECK(adjacency[2] == std::vector<std::size_t>{1});

    const auto wide = cooccurrence_graph(doc, 3);
    CHECK(wide[0] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("repeated adjacent words do not create self loops") {
    const Document doc = make_document("d", "echo echo valley");
    const auto adjacency = cooccurrence_graph(doc, 2);
    for (std::size_t v = 0; v < adjacency.size(); ++v) {
        for (const auto u : adjacency[v]) {
            CHECK(u != v);
        }
    }
}

TEST_CASE("human_frequency counts reference membership") {
    const Document doc = make_document("d", "alpha beta gamma");
    CHECK(human_frequency(doc, {"alpha things"}).scores.at("alpha") == doctest::Approx(1.0));
    const auto two = human_frequency(doc, {"alpha", "beta"});
    CHECK(two.scores.at("alpha") == doctest::Approx(0.5));
    CHECK(two.scores.at("beta") == doctest::Approx(0.5));
    CHECK(two.scores.at("gamma") == 0.0);
}

TEST_CASE("human_frequency matches a manual membership table") {
    const Document doc = make_document("d", "sun moon star cloud");
    const std::vector<std::string> refs{"the sun and the moon", "sun star", "cloud sun moon"};
    const auto dist = human_frequency(doc, refs);
    CHECK(dist.scores.at("sun") == doctest::Approx(1.0));
    CHECK(dist.scores.at("moon") == doctest::Approx(2.0 / 3.0));
    CHECK(dist.scores.at("star") == doctest::Approx(1.0 / 3.0));
    CHECK(dist.scores.at("cloud") == doctest::Approx(1.0 / 3.0));
    for (const auto& [word, score] : dist.scores) {
        const double scaled = score * 3.0;
        CHECK(scaled == doctest::Approx(std::round(scaled)));
    }
}

TEST_CASE("human_frequency requires references") {
    const Document doc = make_document("d", "alpha");
    CHECK_THROWS_AS(human_frequency(doc, {}), DataError);
}

TEST_CASE("baseline_batch dispatches and rejects unknown methods") {
    std::vector<Document> docs;
    docs.push_back(make_document("a", "one two three two"));
    docs.push_back(make_document("b", "four five"));
    const auto out = baseline_batch("token_freq", docs);
    REQUIRE(out.size() == 2);
    CHECK(out[0].doc_id == "a");
    CHECK(out[1].source_id == "token_freq");
    CHECK_THROWS_AS(baseline_batch("lexrank", docs), DataError);
}
