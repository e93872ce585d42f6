#include "impsum/probing.hpp"

#include "impsum/metrics.hpp"
#include "impsum/util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace impsum::probing {

namespace {

using json = nlohmann::json;

constexpr double kProbEps = 1e-7; // clamp for Bernoulli KL probabilities

// mt19937_64 plus hand-rolled transforms, so streams are identical across
// standard libraries (std::shuffle and std::normal_distribution are not).
double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& gen) {
    const double u1 = 1.0 - uniform01(gen); // (0, 1]
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& gen) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(gen() % i);
        std::swap(items[i - 1], items[j]);
    }
}

double sigmoid(double z) {
    return 1.0 / (1.0 + std::exp(-z));
}

} // namespace

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::S1: return "S1";
        case Scenario::S2: return "S2";
        case Scenario::S3: return "S3";
    }
    return "S1";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "S1" || name == "s1") return Scenario::S1;
    if (name == "S2" || name == "s2") return Scenario::S2;
    if (name == "S3" || name == "s3") return Scenario::S3;
    throw DataError("unknown probing scenario '" + name + "' (expected S1, S2 or S3)");
}

double ProbeModel::logit(const double* x) const {
    double z = b2;
    for (std::size_t j = 0; j < hidden_dim; ++j) {
        double pre = b1[j];
        const double* row = w1.data() + j * input_dim;
        for (std::size_t i = 0; i < input_dim; ++i) {
            pre += row[i] * x[i];
        }
        if (pre > 0.0) {
            z += w2[j] * pre;
        }
    }
    return z;
}

std::vector<double> get_params(const ProbeModel& model) {
    std::vector<double> params;
    params.reserve(model.param_count());
    params.insert(params.end(), model.w1.begin(), model.w1.end());
    params.insert(params.end(), model.b1.begin(), model.b1.end());
    params.insert(params.end(), model.w2.begin(), model.w2.end());
    params.push_back(model.b2);
    return params;
}

void set_params(ProbeModel& model, const std::vector<double>& params) {
    if (params.size() != model.param_count()) {
        throw DataError("parameter vector size mismatch");
    }
    std::size_t offset = 0;
    std::copy_n(params.begin() + offset, model.w1.size(), model.w1.begin());
    offset += model.w1.size();
    std::copy_n(params.begin() + offset, model.b1.size(), model.b1.begin());
    offset += model.b1.size();
    std::copy_n(params.begin() + offset, model.w2.size(), model.w2.begin());
    offset += model.w2.size();
    model.b2 = params[offset];
}

WordVectors aggregate_word_vectors(const TensorDump& hidden, const TokenMap& tmap,
                                   const Document& doc) {
    if (hidden.shape.size() != 2) {
        throw DataError("hidden-state dump must be tokens x d");
    }
    if (hidden.shape[0] != tmap.tokens.size()) {
        throw DataError("hidden-state rows (" + std::to_string(hidden.shape[0]) +
                        ") do not match token map (" + std::to_string(tmap.tokens.size()) + ")");
    }
    const std::size_t d = hidden.shape[1];
    std::map<std::string, std::pair<std::vector<double>, std::size_t>> acc;
    for (std::size_t t = 0; t < tmap.tokens.size(); ++t) {
        const auto& entry = tmap.tokens[t];
        if (!entry.word_index) {
            continue;
        }
        if (*entry.word_index >= doc.words.size()) {
            throw DataError("token map for doc '" + doc.doc_id + "' points past word " +
                            std::to_string(doc.words.size() - 1));
        }
        auto& [sum, count] = acc[doc.words[*entry.word_index].word];
        if (sum.empty()) {
            sum.assign(d, 0.0);
        }
        for (std::size_t i = 0; i < d; ++i) {
            sum[i] += hidden.at2(t, i);
        }
        ++count;
    }
    WordVectors out;
    for (auto& [word, sc] : acc) {
        for (double& x : sc.first) {
            x /= static_cast<double>(sc.second);
        }
        out[word] = std::move(sc.first);
    }
    return out;
}

ProbeDataset build_dataset(const std::map<int, LayerFeatures>& features_by_layer,
                           const std::vector<ImportanceDistribution>& importance,
                           Scenario scenario, std::optional<int> layer, std::uint64_t seed) {
    if (features_by_layer.empty()) {
        throw DataError("build_dataset needs at least one layer of features");
    }
    std::vector<int> layers;
    if (scenario == Scenario::S2) {
        for (const auto& [index, features] : features_by_layer) {
            layers.push_back(index);
        }
    } else {
        if (!layer) {
            throw DataError("scenario " + to_string(scenario) + " needs a layer");
        }
        if (!features_by_layer.count(*layer)) {
            throw DataError("no features for layer " + std::to_string(*layer));
        }
        layers.push_back(*layer);
    }

    std::map<std::string, const ImportanceDistribution*> imp_index;
    for (const auto& dist : importance) {
        imp_index[dist.doc_id] = &dist;
    }

    // Documents common to all requested layers, ascending doc_id.
    std::set<std::string> doc_ids;
    for (const auto& [doc_id, words] : features_by_layer.at(layers.front())) {
        doc_ids.insert(doc_id);
    }
    for (const int l : layers) {
        std::set<std::string> present;
        for (const auto& [doc_id, words] : features_by_layer.at(l)) {
            present.insert(doc_id);
        }
        std::erase_if(doc_ids, [&](const std::string& id) { return !present.count(id); });
    }

    ProbeDataset ds;
    ds.scenario = scenario;
    for (const auto& doc_id : doc_ids) {
        const auto imp_it = imp_index.find(doc_id);
        if (imp_it == imp_index.end()) {
            throw DataError("no importance record for doc '" + doc_id + "'");
        }
        const auto& scores = imp_it->second->scores;

        // Words present in every requested layer and in the importance record.
        std::vector<std::string> words;
        for (const auto& [word, vec] : features_by_layer.at(layers.front()).at(doc_id)) {
            if (!scores.count(word)) {
                continue;
            }
            bool everywhere = true;
            for (const int l : layers) {
                const auto& table = features_by_layer.at(l).at(doc_id);
                if (!table.count(word)) {
                    everywhere = false;
                    break;
                }
            }
            if (everywhere) {
                words.push_back(word);
            }
        }
        if (words.empty()) {
            continue;
        }

        std::vector<double> targets;
        targets.reserve(words.size());
        for (const auto& word : words) {
            targets.push_back(scores.at(word));
        }
        if (scenario == Scenario::S3) {
            double sum = std::accumulate(targets.begin(), targets.end(), 0.0);
            if (sum <= 0.0) {
                ++ds.dropped_docs;
                continue;
            }
            for (double& t : targets) {
                t /= sum;
            }
        }

        ProbeDataset::DocGroup group;
        group.doc_id = doc_id;
        group.begin = ds.size();
        for (std::size_t w = 0; w < words.size(); ++w) {
            std::size_t dim = 0;
            for (const int l : layers) {
                const auto& vec = features_by_layer.at(l).at(doc_id).at(words[w]);
                ds.features.insert(ds.features.end(), vec.begin(), vec.end());
                dim += vec.size();
            }
            if (ds.feature_dim == 0) {
                ds.feature_dim = dim;
            } else if (dim != ds.feature_dim) {
                throw DataError("inconsistent feature dims: doc '" + doc_id + "' word '" +
                                words[w] + "' has " + std::to_string(dim) + ", expected " +
                                std::to_string(ds.feature_dim));
            }
            ds.words.push_back(words[w]);
            ds.targets.push_back(targets[w]);
        }
        group.end = ds.size();
        ds.docs.push_back(std::move(group));
    }
    if (ds.docs.empty()) {
        throw DataError("build_dataset produced no usable documents");
    }

    // 60:20:20 by document: shuffle sorted indices with the seeded stream.
    std::vector<std::size_t> order(ds.docs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 gen(seed);
    fisher_yates(order, gen);
    const auto n = static_cast<double>(order.size());
    const std::size_t n_train = static_cast<std::size_t>(std::llround(0.6 * n));
    const std::size_t n_val =
        std::min(order.size() - n_train, static_cast<std::size_t>(std::llround(0.2 * n)));
    for (std::size_t i = 0; i < order.size(); ++i) {
        ds.docs[order[i]].split = i < n_train ? 0 : (i < n_train + n_val ? 1 : 2);
    }
    return ds;
}

LossGrad bernoulli_kl_loss_grad(const ProbeModel& model, const ProbeDataset& ds,
                                const std::vector<std::size_t>& rows) {
    if (rows.empty()) {
        throw DataError("empty batch");
    }
    LossGrad out;
    out.grad.assign(model.param_count(), 0.0);
    const std::size_t w1_size = model.w1.size();
    const std::size_t b1_off = w1_size;
    const std::size_t w2_off = b1_off + model.b1.size();
    const std::size_t b2_off = w2_off + model.w2.size();

    std::vector<double> pre(model.hidden_dim);
    for (const std::size_t row : rows) {
        const double* x = ds.feature_row(row);
        const double target = ds.targets[row];
        double z = model.b2;
        for (std::size_t j = 0; j < model.hidden_dim; ++j) {
            double p = model.b1[j];
            const double* wrow = model.w1.data() + j * model.input_dim;
            for (std::size_t i = 0; i < model.input_dim; ++i) {
                p += wrow[i] * x[i];
            }
            pre[j] = p;
            if (p > 0.0) {
                z += model.w2[j] * p;
            }
        }
        const double raw = sigmoid(z);
        const double clamped = std::clamp(raw, kProbEps, 1.0 - kProbEps);
        double loss = 0.0;
        if (target > 0.0) {
            loss += target * std::log(target / clamped);
        }
        if (target < 1.0) {
            loss += (1.0 - target) * std::log((1.0 - target) / (1.0 - clamped));
        }
        out.loss += loss;
        // d/dz vanishes where the clamp is active (loss is flat there).
        const double dz = (raw > kProbEps && raw < 1.0 - kProbEps) ? raw - target : 0.0;
        if (dz != 0.0) {
            out.grad[b2_off] += dz;
            for (std::size_t j = 0; j < model.hidden_dim; ++j) {
                if (pre[j] > 0.0) {
                    out.grad[w2_off + j] += dz * pre[j];
                    const double dh = dz * model.w2[j];
                    out.grad[b1_off + j] += dh;
                    double* grow = out.grad.data() + j * model.input_dim;
                    for (std::size_t i = 0; i < model.input_dim; ++i) {
                        grow[i] += dh * x[i];
                    }
                }
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(rows.size());
    out.loss *= scale;
    for (double& g : out.grad) {
        g *= scale;
    }
    return out;
}

LossGrad softmax_kl_loss_grad(const ProbeModel& model, const ProbeDataset& ds,
                              const ProbeDataset::DocGroup& doc) {
    const std::size_t n = doc.end - doc.begin;
    if (n == 0) {
        throw DataError("empty document group");
    }
    LossGrad out;
    out.grad.assign(model.param_count(), 0.0);
    const std::size_t b1_off = model.w1.size();
    const std::size_t w2_off = b1_off + model.b1.size();
    const std::size_t b2_off = w2_off + model.w2.size();

    std::vector<double> logits(n);
    std::vector<std::vector<double>> pre(n, std::vector<double>(model.hidden_dim));
    for (std::size_t w = 0; w < n; ++w) {
        const double* x = ds.feature_row(doc.begin + w);
        double z = model.b2;
        for (std::size_t j = 0; j < model.hidden_dim; ++j) {
            double p = model.b1[j];
            const double* wrow = model.w1.data() + j * model.input_dim;
            for (std::size_t i = 0; i < model.input_dim; ++i) {
                p += wrow[i] * x[i];
            }
            pre[w][j] = p;
            if (p > 0.0) {
                z += model.w2[j] * p;
            }
        }
        logits[w] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    std::vector<double> q(n);
    for (std::size_t w = 0; w < n; ++w) {
        q[w] = std::exp(logits[w] - zmax);
        denom += q[w];
    }
    for (double& v : q) {
        v /= denom;
    }
    for (std::size_t w = 0; w < n; ++w) {
        const double target = ds.targets[doc.begin + w];
        if (target > 0.0) {
            out.loss += target * std::log(target / q[w]);
        }
        const double dz = q[w] - target;
        const double* x = ds.feature_row(doc.begin + w);
        out.grad[b2_off] += dz;
        for (std::size_t j = 0; j < model.hidden_dim; ++j) {
            if (pre[w][j] > 0.0) {
                out.grad[w2_off + j] += dz * pre[w][j];
                const double dh = dz * model.w2[j];
                out.grad[b1_off + j] += dh;
                double* grow = out.grad.data() + j * model.input_dim;
                for (std::size_t i = 0; i < model.input_dim; ++i) {
                    grow[i] += dh * x[i];
                }
            }
        }
    }
    return out;
}

namespace {

ProbeModel init_model(const ProbeDataset& ds, const TrainConfig& cfg, std::mt19937_64& gen) {
    ProbeModel model;
    model.input_dim = ds.feature_dim;
    model.hidden_dim = cfg.hidden;
    model.scenario = ds.scenario;
    model.seed = cfg.seed;
    model.w1.resize(model.hidden_dim * model.input_dim);
    model.b1.assign(model.hidden_dim, 0.0);
    model.w2.resize(model.hidden_dim);
    const double a1 = std::sqrt(6.0 / static_cast<double>(model.input_dim));
    for (double& w : model.w1) {
        w = (2.0 * uniform01(gen) - 1.0) * a1;
    }
    const double a2 = std::sqrt(6.0 / static_cast<double>(model.hidden_dim + 1));
    for (double& w : model.w2) {
        w = (2.0 * uniform01(gen) - 1.0) * a2;
    }
    return model;
}

struct AdamState {
    std::vector<double> m, v;
    std::size_t t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad,
              const TrainConfig& cfg) {
        ++t;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            params[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.adam_eps);
        }
    }
};

double validation_loss(const ProbeModel& model, const ProbeDataset& ds,
                       const std::vector<std::size_t>& val_docs) {
    double acc = 0.0;
    std::size_t denom = 0;
    for (const std::size_t d : val_docs) {
        const auto& doc = ds.docs[d];
        if (ds.scenario == Scenario::S3) {
            acc += softmax_kl_loss_grad(model, ds, doc).loss;
            ++denom;
        } else {
            std::vector<std::size_t> rows(doc.end - doc.begin);
            std::iota(rows.begin(), rows.end(), doc.begin);
            acc += bernoulli_kl_loss_grad(model, ds, rows).loss * static_cast<double>(rows.size());
            denom += rows.size();
        }
    }
    return acc / static_cast<double>(denom);
}

} // namespace

TrainedProbe train_probe(const ProbeDataset& ds, const TrainConfig& cfg) {
    std::vector<std::size_t> train_docs, val_docs;
    for (std::size_t i = 0; i < ds.docs.size(); ++i) {
        if (ds.docs[i].split == 0) train_docs.push_back(i);
        if (ds.docs[i].split == 1) val_docs.push_back(i);
    }
    if (train_docs.empty() || val_docs.empty()) {
        throw DataError("train_probe needs non-empty train and validation splits");
    }

    std::mt19937_64 gen(cfg.seed);
    ProbeModel model = init_model(ds, cfg, gen);
    std::vector<double> params = get_params(model);
    AdamState adam(params.size());

    std::vector<std::size_t> train_rows;
    for (const std::size_t d : train_docs) {
        for (std::size_t r = ds.docs[d].begin; r < ds.docs[d].end; ++r) {
            train_rows.push_back(r);
        }
    }

    TrainedProbe out;
    out.best_val_loss = std::numeric_limits<double>::infinity();
    std::size_t bad_epochs = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double train_loss = 0.0;
        std::size_t train_denom = 0;
        if (ds.scenario == Scenario::S3) {
            fisher_yates(train_docs, gen);
            for (const std::size_t d : train_docs) {
                set_params(model, params);
                const LossGrad lg = softmax_kl_loss_grad(model, ds, ds.docs[d]);
                if (!std::isfinite(lg.loss)) {
                    throw DataError("NaN loss at epoch " + std::to_string(epoch) + ", doc '" +
                                    ds.docs[d].doc_id + "'");
                }
                train_loss += lg.loss;
                ++train_denom;
                adam.step(params, lg.grad, cfg);
            }
        } else {
            fisher_yates(train_rows, gen);
            for (std::size_t start = 0; start < train_rows.size(); start += cfg.batch_size) {
                const std::size_t stop = std::min(start + cfg.batch_size, train_rows.size());
                const std::vector<std::size_t> batch(train_rows.begin() + start,
                                                     train_rows.begin() + stop);
                set_params(model, params);
                const LossGrad lg = bernoulli_kl_loss_grad(model, ds, batch);
                if (!std::isfinite(lg.loss)) {
                    throw DataError("NaN loss at epoch " + std::to_string(epoch) + ", batch at " +
                                    std::to_string(start));
                }
                train_loss += lg.loss * static_cast<double>(batch.size());
                train_denom += batch.size();
                adam.step(params, lg.grad, cfg);
            }
        }
        set_params(model, params);
        const double val_loss = validation_loss(model, ds, val_docs);
        if (!std::isfinite(val_loss)) {
            throw DataError("NaN validation loss at epoch " + std::to_string(epoch));
        }
        out.log.push_back({epoch, train_loss / static_cast<double>(train_denom), val_loss});
        out.epochs_run = epoch;
        if (val_loss < out.best_val_loss) {
            out.best_val_loss = val_loss;
            out.model = model;
            bad_epochs = 0;
        } else {
            ++bad_epochs;
            if (bad_epochs >= cfg.patience) {
                out.early_stopped = true;
                break;
            }
        }
    }
    return out;
}

std::vector<double> randomized_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    if (cols == 0) {
        throw DataError("randomized_features needs cols >= 1");
    }
    std::mt19937_64 gen(seed);
    const double sd = 1.0 / std::sqrt(static_cast<double>(cols));
    std::vector<double> out(rows * cols);
    for (double& x : out) {
        x = gaussian(gen) * sd;
    }
    return out;
}

std::vector<double> predict_doc(const ProbeModel& model, const ProbeDataset& ds,
                                const ProbeDataset::DocGroup& doc) {
    if (model.input_dim != ds.feature_dim) {
        throw DataError("probe input dim " + std::to_string(model.input_dim) +
                        " does not match dataset feature dim " + std::to_string(ds.feature_dim));
    }
    const std::size_t n = doc.end - doc.begin;
    std::vector<double> out(n);
    for (std::size_t w = 0; w < n; ++w) {
        out[w] = model.logit(ds.feature_row(doc.begin + w));
    }
    if (model.scenario == Scenario::S3) {
        const double zmax = *std::max_element(out.begin(), out.end());
        double denom = 0.0;
        for (double& z : out) {
            z = std::exp(z - zmax);
            denom += z;
        }
        for (double& z : out) {
            z /= denom;
        }
    } else {
        for (double& z : out) {
            z = sigmoid(z);
        }
    }
    return out;
}

namespace {

void finish_moments(const std::vector<double>& values, double& mean, double& stddev) {
    mean = 0.0;
    for (const double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (const double v : values) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(values.size());
    stddev = std::sqrt(var);
}

} // namespace

EvalReport evaluate_probe(const ProbeModel& model, const ProbeDataset& ds) {
    if (model.input_dim != ds.feature_dim) {
        throw DataError("probe input dim " + std::to_string(model.input_dim) +
                        " does not match dataset feature dim " + std::to_string(ds.feature_dim));
    }
    EvalReport report;
    for (const auto& doc : ds.docs) {
        if (doc.split != 2) {
            continue;
        }
        const auto pred = predict_doc(model, ds, doc);
        std::vector<double> target(ds.targets.begin() + doc.begin, ds.targets.begin() + doc.end);
        const double rho = pred.size() >= 2 ? metrics::spearman(target, pred).value : 0.0;
        const double ndcg = metrics::ndcg_at_k(target, pred, 10);
        report.doc_ids.push_back(doc.doc_id);
        report.spearman_per_doc.push_back(rho);
        report.ndcg10_per_doc.push_back(ndcg);
    }
    if (report.doc_ids.empty()) {
        throw DataError("evaluate_probe found no test documents");
    }
    report.doc_count = report.doc_ids.size();
    finish_moments(report.spearman_per_doc, report.spearman_mean, report.spearman_std);
    finish_moments(report.ndcg10_per_doc, report.ndcg10_mean, report.ndcg10_std);
    return report;
}

EvalReport cross_dataset_eval(const ProbeModel& model, const ProbeDataset& other) {
    if (model.input_dim != other.feature_dim) {
        throw DataError("cross-dataset eval: probe expects dim " +
                        std::to_string(model.input_dim) + " but dataset provides dim " +
                        std::to_string(other.feature_dim));
    }
    return evaluate_probe(model, other);
}

HeatmapResult export_heatmap(const std::map<int, ProbeModel>& probe_per_layer,
                             const std::map<int, WordVectors>& doc_features_per_layer,
                             const TokenMap& tmap, const Document& doc,
                             std::size_t first_n_tokens) {
    if (probe_per_layer.empty()) {
        throw DataError("export_heatmap needs at least one probe");
    }
    HeatmapResult out;
    const std::size_t n_tokens = std::min(first_n_tokens, tmap.tokens.size());
    for (std::size_t t = 0; t < n_tokens; ++t) {
        out.token_labels.push_back(tmap.tokens[t].text);
    }
    for (const auto& [layer, model] : probe_per_layer) {
        const auto feat_it = doc_features_per_layer.find(layer);
        if (feat_it == doc_features_per_layer.end()) {
            throw DataError("no features for layer " + std::to_string(layer));
        }
        const WordVectors& table = feat_it->second;
        // Softmax the logits over the document's aligned words.
        std::vector<std::string> words;
        std::vector<double> logits;
        for (const auto& [word, vec] : table) {
            if (vec.size() != model.input_dim) {
                throw DataError("layer " + std::to_string(layer) + " features have dim " +
                                std::to_string(vec.size()) + ", probe expects " +
                                std::to_string(model.input_dim));
            }
            words.push_back(word);
            logits.push_back(model.logit(vec.data()));
        }
        if (logits.empty()) {
            throw DataError("layer " + std::to_string(layer) + " has no features for doc '" +
                            doc.doc_id + "'");
        }
        const double zmax = *std::max_element(logits.begin(), logits.end());
        double denom = 0.0;
        for (double& z : logits) {
            z = std::exp(z - zmax);
            denom += z;
        }
        std::map<std::string, double> predicted;
        for (std::size_t i = 0; i < words.size(); ++i) {
            predicted[words[i]] = logits[i] / denom;
        }

        std::vector<double> row(n_tokens, 0.0);
        for (std::size_t t = 0; t < n_tokens; ++t) {
            const auto& entry = tmap.tokens[t];
            if (!entry.word_index || *entry.word_index >= doc.words.size()) {
                continue;
            }
            const auto pit = predicted.find(doc.words[*entry.word_index].word);
            if (pit != predicted.end()) {
                row[t] = pit->second;
            }
        }
        out.layers.push_back(layer);
        out.values.push_back(std::move(row));
    }
    return out;
}

void save_probe(const std::filesystem::path& path, const ProbeModel& model) {
    json header{{"dtype", "f64"},
                {"input_dim", model.input_dim},
                {"hidden_dim", model.hidden_dim},
                {"scenario", to_string(model.scenario)},
                {"seed", model.seed}};
    const std::string header_bytes = header.dump();
    std::string out;
    out.append("PRBE0001", 8);
    const std::uint32_t header_len = static_cast<std::uint32_t>(header_bytes.size());
    out.append(reinterpret_cast<const char*>(&header_len), 4);
    out += header_bytes;
    out += '\n';
    const std::vector<double> params = get_params(model);
    out.append(reinterpret_cast<const char*>(params.data()), params.size() * sizeof(double));
    write_file_atomic(path, out);
}

ProbeModel load_probe(const std::filesystem::path& path) {
    const std::string bytes = slurp_file(path);
    if (bytes.size() < 13 || bytes.compare(0, 8, "PRBE0001") != 0) {
        throw DataError(path.string() + ": not a PRBE0001 checkpoint");
    }
    std::uint32_t header_len = 0;
    std::memcpy(&header_len, bytes.data() + 8, 4);
    if (bytes.size() < 13 + header_len || bytes[12 + header_len] != '\n') {
        throw DataError(path.string() + ": truncated checkpoint header");
    }
    json header;
    try {
        header = json::parse(bytes.substr(12, header_len));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": malformed checkpoint header (" + e.what() + ")");
    }
    ProbeModel model;
    model.input_dim = header.at("input_dim").get<std::size_t>();
    model.hidden_dim = header.at("hidden_dim").get<std::size_t>();
    model.scenario = scenario_from_string(header.at("scenario").get<std::string>());
    model.seed = header.at("seed").get<std::uint64_t>();
    model.w1.resize(model.hidden_dim * model.input_dim);
    model.b1.resize(model.hidden_dim);
    model.w2.resize(model.hidden_dim);
    const std::size_t payload_off = 13 + header_len;
    const std::size_t expected = model.param_count() * sizeof(double);
    if (bytes.size() - payload_off != expected) {
        throw DataError(path.string() + ": checkpoint payload has " +
                        std::to_string(bytes.size() - payload_off) + " bytes, expected " +
                        std::to_string(expected));
    }
    std::vector<double> params(model.param_count());
    std::memcpy(params.data(), bytes.data() + payload_off, expected);
    set_params(model, params);
    return model;
}

} // namespace impsum::probing
