#include "impsum/corpus.hpp"
#include "impsum/util.hpp"

#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <random>

using namespace impsum;

TEST_CASE("normalize_word strips surrounding punctuation and lower-cases") {
    CHECK(normalize_word("Palestinian,") == "palestinian");
    CHECK(normalize_word("\"Hello!\"") == "hello");
    CHECK(normalize_word("(state)") == "state");
    CHECK(normalize_word("DOG.") == "dog");
}

TEST_CASE("normalize_word keeps internal apostrophes and hyphens") {
    CHECK(normalize_word("l'agent") == "l'agent");
    CHECK(normalize_word("state-of-the-art") == "state-of-the-art");
    CHECK(normalize_word("'quoted'") == "quoted");
    CHECK(normalize_word("3.5") == "3.5");
}

TEST_CASE("normalize_word maps pure punctuation to empty") {
    CHECK(normalize_word("—") == ""); // em dash
    CHECK(normalize_word("...") == "");
    CHECK(normalize_word("?!") == "");
}

TEST_CASE("normalize_word retains accents and lower-cases Latin-1") {
    CHECK(normalize_word("Été") == "été");          // Été -> été
    CHECK(normalize_word("état—civil") == "état—civil"); // internal em dash kept
    CHECK(normalize_word("Ça") == "ça");                      // Ça -> ça
}

TEST_CASE("normalize_word folds NFKC compatibility cases") {
    CHECK(normalize_word("Ｈｉ") == "hi");    // fullwidth
    CHECK(normalize_word("ﬁsh") == "fish");      // fi ligature
    CHECK(normalize_word("état") == "état"); // combining accent composed
}

TEST_CASE("tokenize splits on whitespace with 1-based positions") {
    const auto words = tokenize("The dog barked.");
    REQUIRE(words.size() == 3);
    CHECK(words[0] == WordToken{"the", 1});
    CHECK(words[1] == WordToken{"dog", 2});
    CHECK(words[2] == WordToken{"barked", 3});
}

TEST_CASE("tokenize drops whitespace-only and punctuation-only pieces") {
    CHECK(tokenize("  ").empty());
    const auto words = tokenize("one — two three");
    REQUIRE(words.size() == 3);
    CHECK(words[0].word == "one");
    CHECK(words[1] == WordToken{"two", 2});
    CHECK(words[2] == WordToken{"three", 3});
}

TEST_CASE("tokenize handles the mixed French example") {
    const auto words = tokenize("état—civil Été");
    REQUIRE(words.size() == 2);
    CHECK(words[0] == WordToken{"état—civil", 1});
    CHECK(words[1] == WordToken{"été", 2});
}

TEST_CASE("tokenize is idempotent on its own output") {
    std::mt19937 gen(7);
    const std::string pieces[] = {"Hello,",  "l'agent", "—",    "ÉTAT",   "ﬁne",
                                  "a-b-c.",  "¡Hola!",  "x",    "2024,",  "«quote»",
                                  "dog...", "？Ｗhat", "día",  "co—op",  "'s"};
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const int n = 1 + static_cast<int>(gen() % 8);
        for (int i = 0; i < n; ++i) {
            text += pieces[gen() % std::size(pieces)];
            text += (gen() % 2) ? " " : "\t";
        }
        for (const auto& token : tokenize(text)) {
            CAPTURE(token.word);
            CHECK(normalize_word(token.word) == token.word);
        }
    }
}

TEST_CASE("make_document rejects empty content") {
    CHECK_THROWS_AS(make_document("d", "  —  "), DataError);
    CHECK_THROWS_AS(make_document("d", ""), DataError);
}

TEST_CASE("document average positions use occurrence means") {
    const Document doc = make_document("d", "a b a c a");
    const auto pos = doc.average_positions();
    CHECK(pos.at("a") == doctest::Approx(3.0)); // positions 1, 3, 5
    CHECK(pos.at("b") == doctest::Approx(2.0));
    CHECK(pos.at("c") == doctest::Approx(4.0));
}

TEST_CASE("load_documents reads one record per line") {
    testsupport::TempDir tmp("docs");
    {
        std::ofstream out(tmp.file("documents.jsonl"));
        out << R"({"doc_id":"a","text":"alpha beta","references":["alpha"]})" << "\n";
        out << R"({"doc_id":"b","text":"gamma"})" << "\n";
    }
    const auto docs = load_documents(tmp.file("documents.jsonl"));
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].doc_id == "a");
    CHECK(docs[0].references.size() == 1);
    CHECK(docs[1].words.size() == 1);
}

TEST_CASE("load_documents names the offending line") {
    testsupport::TempDir tmp("docs-bad");
    {
        std::ofstream out(tmp.file("bad.jsonl"));
        out << R"({"text":"no id"})" << "\n";
    }
    try {
        load_documents(tmp.file("bad.jsonl"));
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
}

TEST_CASE("load_documents rejects duplicate ids") {
    testsupport::TempDir tmp("docs-dup");
    {
        std::ofstream out(tmp.file("dup.jsonl"));
        out << R"({"doc_id":"a","text":"one"})" << "\n";
        out << R"({"doc_id":"b","text":"two"})" << "\n";
        out << R"({"doc_id":"a","text":"three"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_documents(tmp.file("dup.jsonl")),
                         doctest::Contains("duplicate doc_id"), DataError);
}

TEST_CASE("documents round-trip through jsonl") {
    testsupport::TempDir tmp("docs-rt");
    std::vector<Document> docs;
    docs.push_back(make_document("x", "Été à Paris, l'agent dort.", {"ref one", "ref two"}));
    docs.push_back(make_document("y", "short text"));
    save_documents(tmp.file("d.jsonl"), docs);
    const auto loaded = load_documents(tmp.file("d.jsonl"));
    REQUIRE(loaded.size() == docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        CHECK(loaded[i].doc_id == docs[i].doc_id);
        CHECK(loaded[i].text == docs[i].text);
        CHECK(loaded[i].words == docs[i].words);
        CHECK(loaded[i].references == docs[i].references);
    }
}

TEST_CASE("summary sets group by (doc, model) and round-trip") {
    testsupport::TempDir tmp("sums");
    std::vector<SummarySet> sets;
    sets.push_back({"a", "m1", {{10, "alpha beta"}, {20, "alpha beta gamma"}}});
    sets.push_back({"a", "m2", {{10, "delta"}}});
    save_summary_sets(tmp.file("s.jsonl"), sets);
    const auto loaded = load_summary_sets(tmp.file("s.jsonl"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == sets[0]);
    CHECK(loaded[1] == sets[1]);
}

TEST_CASE("summary sets reject duplicate target lengths") {
    testsupport::TempDir tmp("sums-dup");
    {
        std::ofstream out(tmp.file("s.jsonl"));
        out << R"({"doc_id":"a","model":"m","target_words":10,"summary":"x"})" << "\n";
        out << R"({"doc_id":"a","model":"m","target_words":10,"summary":"y"})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_summary_sets(tmp.file("s.jsonl")),
                         doctest::Contains("duplicate target_words"), DataError);
}

TEST_CASE("token maps parse null and integer word indices") {
    testsupport::TempDir tmp("tmaps");
    {
        std::ofstream out(tmp.file("t.jsonl"));
        out << R"({"doc_id":"a","model":"m","tokens":[{"t":"<s>","w":null},{"t":"he","w":0},{"t":"llo","w":0}]})"
            << "\n";
    }
    const auto maps = load_token_maps(tmp.file("t.jsonl"));
    REQUIRE(maps.size() == 1);
    REQUIRE(maps[0].tokens.size() == 3);
    CHECK(!maps[0].tokens[0].word_index.has_value());
    CHECK(maps[0].tokens[1].word_index == 0);
    const auto redone = [&] {
        save_token_maps(tmp.file("t2.jsonl"), maps);
        return load_token_maps(tmp.file("t2.jsonl"));
    }();
    CHECK(redone[0].tokens[2].text == "llo");
    CHECK(redone[0].tokens[2].word_index == 0);
}

TEST_CASE("annotation_stats counts zero vs annotated words") {
    const Document doc = make_document("d", "a b c d e f g h i j");
    ImportanceDistribution dist;
    dist.doc_id = "d";
    dist.source_id = "m";
    for (const auto& word : doc.distinct_words()) {
        dist.scores[word] = 0.0;
    }
    dist.scores["a"] = 0.4;
    dist.scores["b"] = 0.1;
    dist.scores["c"] = 0.9;
    dist.scores["d"] = 0.2;
    const auto stats = annotation_stats({doc}, {dist});
    CHECK(stats.total_words == 10);
    CHECK(stats.annotated_words == 4);
    CHECK(stats.annotated_pct == doctest::Approx(40.0));
    CHECK(stats.zero_pct + stats.annotated_pct == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("annotation_stats aggregates per the two-document example") {
    // 10-word and 90-word docs with 7 and 33 annotated words.
    std::string small_text, big_text;
    for (int i = 0; i < 10; ++i) small_text += "s" + std::to_string(i) + " ";
    for (int i = 0; i < 90; ++i) big_text += "b" + std::to_string(i) + " ";
    const Document small = make_document("small", small_text);
    const Document big = make_document("big", big_text);
    auto dist_for = [](const Document& doc, std::size_t annotated) {
        ImportanceDistribution dist;
        dist.doc_id = doc.doc_id;
        dist.source_id = "m";
        std::size_t i = 0;
        for (const auto& word : doc.distinct_words()) {
            dist.scores[word] = i++ < annotated ? 0.5 : 0.0;
        }
        return dist;
    };
    const auto stats = annotation_stats({small, big}, {dist_for(small, 7), dist_for(big, 33)});
    CHECK(stats.annotated_pct == doctest::Approx(40.0));
    CHECK(stats.words_per_article == doctest::Approx(50.0));

    // permutation invariance over document order
    const auto flipped = annotation_stats({big, small}, {dist_for(small, 7), dist_for(big, 33)});
    CHECK(flipped.annotated_pct == stats.annotated_pct);
    CHECK(flipped.words_per_article == stats.words_per_article);
}

TEST_CASE("annotation_stats requires a distribution per document") {
    const Document doc = make_document("d", "a b");
    CHECK_THROWS_WITH_AS(annotation_stats({doc}, {}), doctest::Contains("missing distribution"),
                         DataError);
}

TEST_CASE("all-zero scores give zero annotated percent") {
    const Document doc = make_document("d", "a b c");
    ImportanceDistribution dist;
    dist.doc_id = "d";
    for (const auto& word : doc.distinct_words()) dist.scores[word] = 0.0;
    const auto stats = annotation_stats({doc}, {dist});
    CHECK(stats.annotated_pct == 0.0);
    CHECK(stats.zero_pct == doctest::Approx(100.0));
}
