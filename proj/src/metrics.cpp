#include "impsum/metrics.hpp"

#include "impsum/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace impsum::metrics {

namespace {

constexpr double kSmoothEps = 1e-12;
constexpr double kNormalizedTol = 1e-6;

void check_lengths(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) {
        throw DataError("metric inputs differ in length: " + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()));
    }
}

bool is_constant(const std::vector<double>& v) {
    for (const double x : v) {
        if (x != v.front()) return false;
    }
    return true;
}

std::vector<double> fractional_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) {
            ranks[order[t]] = avg_rank;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

/// Smooths by adding eps to every entry and renormalizing to sum 1.
std::vector<double> smooth(const std::vector<double>& p) {
    double sum = 0.0;
    for (const double x : p) {
        sum += x + kSmoothEps;
    }
    std::vector<double> out;
    out.reserve(p.size());
    for (const double x : p) {
        out.push_back((x + kSmoothEps) / sum);
    }
    return out;
}

void check_normalized(const std::vector<double>& p, const char* role) {
    double sum = 0.0;
    for (const double x : p) {
        if (x < 0.0) {
            throw DataError(std::string(role) + " has a negative probability");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kNormalizedTol) {
        throw DataError(std::string(role) + " is not normalized (sum " + format_g9(sum) + ")");
    }
}

} // namespace

Correlation spearman(const std::vector<double>& x, const std::vector<double>& y) {
    check_lengths(x, y);
    if (x.size() < 2) {
        throw DataError("spearman needs at least two entries");
    }
    if (is_constant(x) || is_constant(y)) {
        return {0.0, true};
    }
    return {pearson(fractional_ranks(x), fractional_ranks(y)), false};
}

Correlation kendall(const std::vector<double>& x, const std::vector<double>& y) {
    check_lengths(x, y);
    if (x.size() < 2) {
        throw DataError("kendall needs at least two entries");
    }
    if (is_constant(x) || is_constant(y)) {
        return {0.0, true};
    }
    long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j];
            const double dy = y[i] - y[j];
            if (dx == 0.0 && dy == 0.0) {
                ++ties_x;
                ++ties_y;
            } else if (dx == 0.0) {
                ++ties_x;
            } else if (dy == 0.0) {
                ++ties_y;
            } else if ((dx > 0.0) == (dy > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    const double n0 = static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0;
    const double denom = std::sqrt((n0 - static_cast<double>(ties_x)) *
                                   (n0 - static_cast<double>(ties_y)));
    return {static_cast<double>(concordant - discordant) / denom, false};
}

std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    order.resize(std::min(k, order.size()));
    return order;
}

double ndcg_at_k(const std::vector<double>& reference, const std::vector<double>& candidate,
                 std::size_t k) {
    check_lengths(reference, candidate);
    if (k < 1 || reference.empty()) {
        throw DataError("ndcg needs k >= 1 and a non-empty vocabulary");
    }
    const auto cand_order = top_k_indices(candidate, k);
    const auto ideal_order = top_k_indices(reference, k);
    double dcg = 0.0, idcg = 0.0;
    for (std::size_t i = 0; i < cand_order.size(); ++i) {
        dcg += reference[cand_order[i]] / std::log2(static_cast<double>(i) + 2.0);
    }
    for (std::size_t i = 0; i < ideal_order.size(); ++i) {
        idcg += reference[ideal_order[i]] / std::log2(static_cast<double>(i) + 2.0);
    }
    if (idcg <= 0.0) {
        return 0.0;
    }
    return dcg / idcg;
}

PrecisionRecall precision_recall_at_k(const std::vector<double>& reference,
                                      const std::vector<double>& candidate, std::size_t k) {
    check_lengths(reference, candidate);
    if (k < 1) {
        throw DataError("precision/recall needs k >= 1");
    }
    std::size_t relevant = 0;
    for (const double r : reference) {
        if (r > 0.0) ++relevant;
    }
    std::size_t hits = 0;
    for (const std::size_t idx : top_k_indices(candidate, k)) {
        if (reference[idx] > 0.0) ++hits;
    }
    PrecisionRecall out;
    out.precision = static_cast<double>(hits) / static_cast<double>(k);
    if (relevant == 0) {
        out.recall = 0.0;
        out.recall_defined = false;
    } else {
        out.recall = static_cast<double>(hits) / static_cast<double>(relevant);
    }
    return out;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    check_lengths(p, q);
    check_normalized(p, "p");
    check_normalized(q, "q");
    const auto qs = smooth(q);
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            kl += p[i] * std::log(p[i] / qs[i]);
        }
    }
    return kl;
}

double jsd(const std::vector<double>& p, const std::vector<double>& q) {
    check_lengths(p, q);
    check_normalized(p, "p");
    check_normalized(q, "q");
    const auto ps = smooth(p);
    const auto qs = smooth(q);
    double acc = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double m = 0.5 * (ps[i] + qs[i]);
        if (ps[i] > 0.0) acc += 0.5 * ps[i] * std::log2(ps[i] / m);
        if (qs[i] > 0.0) acc += 0.5 * qs[i] * std::log2(qs[i] / m);
    }
    return acc;
}

double renyi(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
    check_lengths(p, q);
    if (alpha <= 0.0 || alpha == 1.0) {
        throw DataError("renyi needs alpha > 0 and alpha != 1");
    }
    check_normalized(p, "p");
    check_normalized(q, "q");
    const auto qs = smooth(q);
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            acc += std::pow(p[i], alpha) * std::pow(qs[i], 1.0 - alpha);
        }
    }
    return std::log(acc) / (alpha - 1.0);
}

double jaccard_at_k(const std::vector<double>& reference, const std::vector<double>& candidate,
                    std::size_t k) {
    check_lengths(reference, candidate);
    if (k < 1) {
        throw DataError("jaccard needs k >= 1");
    }
    const auto top_ref = top_k_indices(reference, k);
    const auto top_cand = top_k_indices(candidate, k);
    const std::set<std::size_t> ref_set(top_ref.begin(), top_ref.end());
    std::size_t inter = 0;
    for (const std::size_t idx : top_cand) {
        if (ref_set.count(idx)) ++inter;
    }
    const std::size_t uni = ref_set.size() + top_cand.size() - inter;
    if (uni == 0) {
        return 0.0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MetricSpec parse_metric(const std::string& name) {
    const auto at = name.find('@');
    const std::string head = at == std::string::npos ? name : name.substr(0, at);
    const std::string arg = at == std::string::npos ? "" : name.substr(at + 1);
    auto require_arg = [&](const char* what) {
        if (arg.empty()) {
            throw DataError("metric '" + name + "' needs a " + std::string(what) +
                            " (e.g. " + head + "@10)");
        }
    };
    if (head == "spearman" || head == "kendall") {
        return {head, -1.0, 1.0, true, false};
    }
    if (head == "ndcg" || head == "p" || head == "r" || head == "jaccard") {
        require_arg("k value");
        const int k = std::stoi(arg);
        if (k < 1) {
            throw DataError("metric '" + name + "' needs k >= 1");
        }
        return {head + "@" + std::to_string(k), 0.0, 1.0, true, false};
    }
    if (head == "kl") {
        return {"kl", 0.0, 0.0, false, true};
    }
    if (head == "jsd") {
        return {"jsd", 0.0, 1.0, true, true};
    }
    if (head == "renyi") {
        require_arg("alpha value");
        const double alpha = std::stod(arg);
        if (alpha <= 0.0 || alpha == 1.0) {
            throw DataError("metric '" + name + "' needs alpha > 0, alpha != 1");
        }
        return {"renyi@" + format_g9(alpha), 0.0, 0.0, false, true};
    }
    throw DataError("unknown metric '" + name + "'");
}

double evaluate_metric(const MetricSpec& spec, const std::vector<double>& reference,
                       const std::vector<double>& candidate) {
    const auto at = spec.name.find('@');
    const std::string head = at == std::string::npos ? spec.name : spec.name.substr(0, at);
    const std::string arg = at == std::string::npos ? "" : spec.name.substr(at + 1);
    if (head == "spearman") return spearman(reference, candidate).value;
    if (head == "kendall") return kendall(reference, candidate).value;
    if (head == "ndcg") return ndcg_at_k(reference, candidate, std::stoul(arg));
    if (head == "p") return precision_recall_at_k(reference, candidate, std::stoul(arg)).precision;
    if (head == "r") return precision_recall_at_k(reference, candidate, std::stoul(arg)).recall;
    if (head == "jaccard") return jaccard_at_k(reference, candidate, std::stoul(arg));
    if (head == "kl") return kl_divergence(reference, candidate);
    if (head == "jsd") return jsd(reference, candidate);
    if (head == "renyi") return renyi(reference, candidate, std::stod(arg));
    throw DataError("unknown metric '" + spec.name + "'");
}

std::vector<MetaRow> meta_evaluate(
    const std::map<std::string, std::map<std::string, double>>& scores) {
    if (scores.empty()) {
        throw DataError("meta_evaluate needs at least one metric");
    }
    std::vector<MetaRow> rows;
    for (const auto& [metric, per_model] : scores) {
        if (per_model.size() < 2) {
            throw DataError("meta_evaluate needs >= 2 models for metric '" + metric + "'");
        }
        double mean = 0.0;
        double lo = per_model.begin()->second;
        double hi = lo;
        for (const auto& [model, value] : per_model) {
            mean += value;
            lo = std::min(lo, value);
            hi = std::max(hi, value);
        }
        mean /= static_cast<double>(per_model.size());
        double var = 0.0;
        for (const auto& [model, value] : per_model) {
            var += (value - mean) * (value - mean);
        }
        var /= static_cast<double>(per_model.size());

        MetaRow row;
        row.metric = metric;
        row.discrimination = std::sqrt(var);
        const MetricSpec spec = parse_metric(metric);
        if (spec.bounded) {
            row.sensitivity = (hi - lo) / (spec.hi - spec.lo);
        } else {
            // No theoretical range; the observed range of this run stands in,
            // which pins sensitivity at 1.
            row.sensitivity = 1.0;
            row.unbounded_range = true;
        }
        rows.push_back(row);
    }

    auto min_max_normalize = [&](auto getter, auto setter) {
        double lo = getter(rows.front());
        double hi = lo;
        for (const auto& row : rows) {
            lo = std::min(lo, getter(row));
            hi = std::max(hi, getter(row));
        }
        for (auto& row : rows) {
            setter(row, hi > lo ? (getter(row) - lo) / (hi - lo) : 0.0);
        }
    };
    min_max_normalize([](const MetaRow& r) { return r.discrimination; },
                      [](MetaRow& r, double v) { r.norm_discrimination = v; });
    min_max_normalize([](const MetaRow& r) { return r.sensitivity; },
                      [](MetaRow& r, double v) { r.norm_sensitivity = v; });
    for (auto& row : rows) {
        row.composite = 0.5 * (row.norm_discrimination + row.norm_sensitivity);
    }
    std::sort(rows.begin(), rows.end(), [](const MetaRow& a, const MetaRow& b) {
        if (a.composite != b.composite) return a.composite > b.composite;
        return a.metric < b.metric;
    });
    return rows;
}

} // namespace impsum::metrics
