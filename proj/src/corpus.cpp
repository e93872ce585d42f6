#include "impsum/corpus.hpp"

#include "impsum/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace impsum {

namespace {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// UTF-8 plumbing. Inputs are news articles and chat dialogues in English and
// French; the folding tables below cover the Latin repertoire those need.

std::u32string utf8_decode(std::string_view bytes) {
    std::u32string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    const auto n = bytes.size();
    while (i < n) {
        const unsigned char b0 = static_cast<unsigned char>(bytes[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0 && i + 1 < n) {
            const unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            if ((b1 & 0xC0) == 0x80) {
                cp = (char32_t(b0 & 0x1F) << 6) | (b1 & 0x3F);
                len = 2;
                if (cp < 0x80) cp = 0xFFFD; // overlong
            }
        } else if ((b0 & 0xF0) == 0xE0 && i + 2 < n) {
            const unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            const unsigned char b2 = static_cast<unsigned char>(bytes[i + 2]);
            if ((b1 & 0xC0) == 0x80 && (b2 & 0xC0) == 0x80) {
                cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(b1 & 0x3F) << 6) | (b2 & 0x3F);
                len = 3;
                if (cp < 0x800) cp = 0xFFFD;
            }
        } else if ((b0 & 0xF8) == 0xF0 && i + 3 < n) {
            const unsigned char b1 = static_cast<unsigned char>(bytes[i + 1]);
            const unsigned char b2 = static_cast<unsigned char>(bytes[i + 2]);
            const unsigned char b3 = static_cast<unsigned char>(bytes[i + 3]);
            if ((b1 & 0xC0) == 0x80 && (b2 & 0xC0) == 0x80 && (b3 & 0xC0) == 0x80) {
                cp = (char32_t(b0 & 0x07) << 18) | (char32_t(b1 & 0x3F) << 12) |
                     (char32_t(b2 & 0x3F) << 6) | (b3 & 0x3F);
                len = 4;
                if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
            }
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space_cp(char32_t cp) {
    switch (cp) {
        case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
        case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Punctuation stripped from word edges: all non-alphanumeric ASCII plus the
// common Unicode punctuation blocks. Interior characters are never stripped.
bool is_edge_punct(char32_t cp) {
    if (cp < 0x80) {
        const bool alnum = (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
                           (cp >= U'A' && cp <= U'Z');
        return !alnum;
    }
    switch (cp) {
        case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6: case 0x00B7:
        case 0x00BB: case 0x00BF: case 0xFFFD:
            return true;
        default:
            return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
                   (cp >= 0x2E00 && cp <= 0x2E7F) || (cp >= 0x3001 && cp <= 0x303F);
    }
}

// Composes a base letter with a combining diacritic (U+0300..U+036F) into the
// precomposed Latin form where one exists; French needs this when inputs
// arrive in NFD. Returns 0 when the pair has no entry.
char32_t compose_latin(char32_t base, char32_t mark) {
    struct Entry { char32_t base, mark, composed; };
    static constexpr Entry kTable[] = {
        {U'a', 0x0300, 0x00E0}, {U'a', 0x0301, 0x00E1}, {U'a', 0x0302, 0x00E2}, {U'a', 0x0308, 0x00E4},
        {U'c', 0x0327, 0x00E7},
        {U'e', 0x0300, 0x00E8}, {U'e', 0x0301, 0x00E9}, {U'e', 0x0302, 0x00EA}, {U'e', 0x0308, 0x00EB},
        {U'i', 0x0302, 0x00EE}, {U'i', 0x0308, 0x00EF}, {U'i', 0x0301, 0x00ED}, {U'i', 0x0300, 0x00EC},
        {U'n', 0x0303, 0x00F1},
        {U'o', 0x0300, 0x00F2}, {U'o', 0x0301, 0x00F3}, {U'o', 0x0302, 0x00F4}, {U'o', 0x0308, 0x00F6},
        {U'u', 0x0300, 0x00F9}, {U'u', 0x0301, 0x00FA}, {U'u', 0x0302, 0x00FB}, {U'u', 0x0308, 0x00FC},
        {U'y', 0x0308, 0x00FF},
        {U'A', 0x0300, 0x00C0}, {U'A', 0x0301, 0x00C1}, {U'A', 0x0302, 0x00C2}, {U'A', 0x0308, 0x00C4},
        {U'C', 0x0327, 0x00C7},
        {U'E', 0x0300, 0x00C8}, {U'E', 0x0301, 0x00C9}, {U'E', 0x0302, 0x00CA}, {U'E', 0x0308, 0x00CB},
        {U'I', 0x0302, 0x00CE}, {U'I', 0x0308, 0x00CF}, {U'I', 0x0301, 0x00CD}, {U'I', 0x0300, 0x00CC},
        {U'N', 0x0303, 0x00D1},
        {U'O', 0x0300, 0x00D2}, {U'O', 0x0301, 0x00D3}, {U'O', 0x0302, 0x00D4}, {U'O', 0x0308, 0x00D6},
        {U'U', 0x0300, 0x00D9}, {U'U', 0x0301, 0x00DA}, {U'U', 0x0302, 0x00DB}, {U'U', 0x0308, 0x00DC},
        {U'Y', 0x0308, 0x0178},
    };
    for (const auto& e : kTable) {
        if (e.base == base && e.mark == mark) return e.composed;
    }
    return 0;
}

// Compatibility folding (NFKC subset): fullwidth forms, Latin ligatures,
// superscript digits, ordinal indicators.
void fold_append(std::u32string& out, char32_t cp) {
    if (cp >= 0xFF01 && cp <= 0xFF5E) {
        out.push_back(cp - 0xFEE0);
        return;
    }
    switch (cp) {
        case 0xFB00: out.append(U"ff"); return;
        case 0xFB01: out.append(U"fi"); return;
        case 0xFB02: out.append(U"fl"); return;
        case 0xFB03: out.append(U"ffi"); return;
        case 0xFB04: out.append(U"ffl"); return;
        case 0xFB05: case 0xFB06: out.append(U"st"); return;
        case 0x00B9: out.push_back(U'1'); return;
        case 0x00B2: out.push_back(U'2'); return;
        case 0x00B3: out.push_back(U'3'); return;
        case 0x00AA: out.push_back(U'a'); return;
        case 0x00BA: out.push_back(U'o'); return;
        case 0x0132: out.append(U"IJ"); return;
        case 0x0133: out.append(U"ij"); return;
        case 0x017F: out.push_back(U's'); return;
        default: break;
    }
    if (cp >= 0x0300 && cp <= 0x036F && !out.empty()) {
        if (const char32_t composed = compose_latin(out.back(), cp)) {
            out.back() = composed;
            return;
        }
    }
    out.push_back(cp);
}

char32_t lower_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
    if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 0x20;
    if (cp == 0x0130) return U'i'; // dotted capital I
    if (cp == 0x0178) return 0x00FF; // Y diaeresis
    if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
    if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
}

std::string normalize_piece(const std::u32string& piece) {
    std::u32string folded;
    folded.reserve(piece.size());
    for (char32_t cp : piece) {
        fold_append(folded, cp);
    }
    for (char32_t& cp : folded) {
        cp = lower_cp(cp);
    }
    std::size_t begin = 0;
    std::size_t end = folded.size();
    while (begin < end && is_edge_punct(folded[begin])) ++begin;
    while (end > begin && is_edge_punct(folded[end - 1])) --end;
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        utf8_append(out, folded[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSONL helpers.

template <typename Fn>
void for_each_jsonl_record(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open file: " + path.string());
    }
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
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed JSON (" + e.what() + ")");
        }
        try {
            fn(record, line_no);
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

[[noreturn]] void record_error(const std::filesystem::path& path, std::size_t line_no,
                               const std::string& message) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + message);
}

} // namespace

std::string normalize_word(std::string_view raw) {
    return normalize_piece(utf8_decode(raw));
}

std::vector<WordToken> tokenize(std::string_view text) {
    std::vector<WordToken> out;
    const std::u32string cps = utf8_decode(text);
    std::size_t i = 0;
    std::size_t position = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_space_cp(cps[i])) ++i;
        std::size_t j = i;
        while (j < cps.size() && !is_space_cp(cps[j])) ++j;
        if (j > i) {
            std::string word = normalize_piece(cps.substr(i, j - i));
            if (!word.empty()) {
                out.push_back({std::move(word), ++position});
            }
        }
        i = j;
    }
    return out;
}

Document make_document(std::string doc_id, std::string text, std::vector<std::string> references) {
    Document doc;
    doc.doc_id = std::move(doc_id);
    doc.text = std::move(text);
    doc.references = std::move(references);
    doc.words = tokenize(doc.text);
    if (doc.words.empty()) {
        throw DataError("document '" + doc.doc_id + "' has no word units");
    }
    return doc;
}

std::vector<std::string> Document::distinct_words() const {
    std::set<std::string> forms;
    for (const auto& token : words) {
        forms.insert(token.word);
    }
    return {forms.begin(), forms.end()};
}

std::map<std::string, double> Document::average_positions() const {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& token : words) {
        auto& [sum, count] = acc[token.word];
        sum += static_cast<double>(token.position);
        ++count;
    }
    std::map<std::string, double> out;
    for (const auto& [word, sc] : acc) {
        out[word] = sc.first / static_cast<double>(sc.second);
    }
    return out;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
    std::vector<Document> docs;
    std::set<std::string> seen;
    for_each_jsonl_record(path, [&](const json& record, std::size_t line_no) {
        if (!record.contains("doc_id") || !record["doc_id"].is_string()) {
            record_error(path, line_no, "missing doc_id");
        }
        if (!record.contains("text") || !record["text"].is_string()) {
            record_error(path, line_no, "missing text");
        }
        std::string doc_id = record["doc_id"].get<std::string>();
        if (!seen.insert(doc_id).second) {
            record_error(path, line_no, "duplicate doc_id '" + doc_id + "'");
        }
        std::vector<std::string> references;
        if (record.contains("references")) {
            references = record["references"].get<std::vector<std::string>>();
        }
        try {
            docs.push_back(make_document(std::move(doc_id), record["text"].get<std::string>(),
                                         std::move(references)));
        } catch (const DataError& e) {
            record_error(path, line_no, e.what());
        }
    });
    return docs;
}

std::vector<SummarySet> load_summary_sets(const std::filesystem::path& path) {
    std::vector<SummarySet> sets;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for_each_jsonl_record(path, [&](const json& record, std::size_t line_no) {
        for (const char* key : {"doc_id", "model", "summary"}) {
            if (!record.contains(key) || !record[key].is_string()) {
                record_error(path, line_no, std::string("missing ") + key);
            }
        }
        if (!record.contains("target_words") || !record["target_words"].is_number_integer()) {
            record_error(path, line_no, "missing target_words");
        }
        const int target = record["target_words"].get<int>();
        if (target < 1) {
            record_error(path, line_no, "target_words must be >= 1");
        }
        const auto key = std::make_pair(record["doc_id"].get<std::string>(),
                                        record["model"].get<std::string>());
        auto [it, inserted] = index.try_emplace(key, sets.size());
        if (inserted) {
            sets.push_back({key.first, key.second, {}});
        }
        SummarySet& set = sets[it->second];
        for (const auto& entry : set.entries) {
            if (entry.target_words == target) {
                record_error(path, line_no,
                             "duplicate target_words " + std::to_string(target) + " for (" +
                                 key.first + ", " + key.second + ")");
            }
        }
        set.entries.push_back({target, record["summary"].get<std::string>()});
    });
    for (const auto& set : sets) {
        if (set.entries.empty()) {
            throw DataError("empty summary set for doc '" + set.doc_id + "'");
        }
    }
    return sets;
}

std::vector<TokenMap> load_token_maps(const std::filesystem::path& path) {
    std::vector<TokenMap> maps;
    std::set<std::pair<std::string, std::string>> seen;
    for_each_jsonl_record(path, [&](const json& record, std::size_t line_no) {
        for (const char* key : {"doc_id", "model"}) {
            if (!record.contains(key) || !record[key].is_string()) {
                record_error(path, line_no, std::string("missing ") + key);
            }
        }
        if (!record.contains("tokens") || !record["tokens"].is_array()) {
            record_error(path, line_no, "missing tokens array");
        }
        TokenMap map;
        map.doc_id = record["doc_id"].get<std::string>();
        map.model_id = record["model"].get<std::string>();
        if (!seen.insert({map.doc_id, map.model_id}).second) {
            record_error(path, line_no,
                         "duplicate token map for (" + map.doc_id + ", " + map.model_id + ")");
        }
        for (const auto& tok : record["tokens"]) {
            if (!tok.contains("t") || !tok["t"].is_string() || !tok.contains("w")) {
                record_error(path, line_no, "token entries need fields t and w");
            }
            TokenEntry entry;
            entry.text = tok["t"].get<std::string>();
            if (!tok["w"].is_null()) {
                const auto w = tok["w"].get<long long>();
                if (w < 0) {
                    record_error(path, line_no, "word index must be >= 0 or null");
                }
                entry.word_index = static_cast<std::size_t>(w);
            }
            map.tokens.push_back(std::move(entry));
        }
        maps.push_back(std::move(map));
    });
    return maps;
}

void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::string out;
    for (const auto& doc : docs) {
        json record{{"doc_id", doc.doc_id}, {"text", doc.text}, {"references", doc.references}};
        out += record.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

void save_summary_sets(const std::filesystem::path& path, const std::vector<SummarySet>& sets) {
    std::string out;
    for (const auto& set : sets) {
        for (const auto& entry : set.entries) {
            json record{{"doc_id", set.doc_id},
                        {"model", set.model_id},
                        {"target_words", entry.target_words},
                        {"summary", entry.summary}};
            out += record.dump();
            out += '\n';
        }
    }
    write_file_atomic(path, out);
}

void save_token_maps(const std::filesystem::path& path, const std::vector<TokenMap>& maps) {
    std::string out;
    for (const auto& map : maps) {
        json tokens = json::array();
        for (const auto& tok : map.tokens) {
            json w;
            if (tok.word_index) {
                w = *tok.word_index;
            }
            tokens.push_back({{"t", tok.text}, {"w", w}});
        }
        json record{{"doc_id", map.doc_id}, {"model", map.model_id}, {"tokens", tokens}};
        out += record.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

CoverageStats annotation_stats(const std::vector<Document>& docs,
                               const std::vector<ImportanceDistribution>& dists) {
    std::map<std::string, const ImportanceDistribution*> by_doc;
    for (const auto& dist : dists) {
        if (!by_doc.emplace(dist.doc_id, &dist).second) {
            throw DataError("multiple distributions for doc '" + dist.doc_id + "'");
        }
    }
    CoverageStats stats;
    for (const auto& doc : docs) {
        const auto it = by_doc.find(doc.doc_id);
        if (it == by_doc.end()) {
            throw DataError("missing distribution for doc '" + doc.doc_id + "'");
        }
        const auto& scores = it->second->scores;
        for (const auto& word : doc.distinct_words()) {
            const auto sit = scores.find(word);
            const double score = sit == scores.end() ? 0.0 : sit->second;
            ++stats.total_words;
            if (score > 0.0) {
                ++stats.annotated_words;
            } else {
                ++stats.zero_score_words;
            }
        }
        ++stats.doc_count;
    }
    if (stats.doc_count == 0 || stats.total_words == 0) {
        throw DataError("annotation_stats needs at least one non-empty document");
    }
    stats.zero_pct = 100.0 * static_cast<double>(stats.zero_score_words) /
                     static_cast<double>(stats.total_words);
    stats.annotated_pct = 100.0 * static_cast<double>(stats.annotated_words) /
                          static_cast<double>(stats.total_words);
    stats.words_per_article = static_cast<double>(stats.total_words) /
                              static_cast<double>(stats.doc_count);
    return stats;
}

} // namespace impsum
