#pragma once

#include "impsum/corpus.hpp"
#include "impsum/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace impsum::probing {

enum class Scenario { S1, S2, S3 };

std::string to_string(Scenario scenario);
Scenario scenario_from_string(const std::string& name);

/// One-hidden-layer perceptron. S1/S2 probes squash the output logit through
/// a sigmoid per word; S3 probes softmax the logits of a whole document.
struct ProbeModel {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::vector<double> w1; // hidden x input, row-major
    std::vector<double> b1; // hidden
    std::vector<double> w2; // hidden
    double b2 = 0.0;
    Scenario scenario = Scenario::S1;
    std::uint64_t seed = 0;

    /// w2 . relu(W1 x + b1) + b2
    double logit(const double* x) const;

    std::size_t param_count() const { return w1.size() + b1.size() + w2.size() + 1; }
};

// Flattened parameter access in (w1, b1, w2, b2) order; used by the trainer
// and by gradient checks.
std::vector<double> get_params(const ProbeModel& model);
void set_params(ProbeModel& model, const std::vector<double>& params);

/// Word-level feature table: word -> hidden-state vector.
using WordVectors = std::map<std::string, std::vector<double>>;
/// doc_id -> word -> vector, for one layer.
using LayerFeatures = std::map<std::string, WordVectors>;

/// Mean hidden-state vector over all tokens of all occurrences of each word;
/// tokens without a word index are dropped. Rows of `hidden` (tokens x d)
/// must align with the token map.
WordVectors aggregate_word_vectors(const TensorDump& hidden, const TokenMap& tmap,
                                   const Document& doc);

struct ProbeDataset {
    Scenario scenario = Scenario::S1;
    std::size_t feature_dim = 0;

    struct DocGroup {
        std::string doc_id;
        std::size_t begin = 0;
        std::size_t end = 0; // examples [begin, end)
        int split = 0;       // 0 train, 1 val, 2 test
    };
    std::vector<DocGroup> docs;      // ascending doc_id
    std::vector<std::string> words;  // example words, sorted within a doc
    std::vector<double> features;    // size() x feature_dim, flat
    std::vector<double> targets;     // raw scores (S1/S2) or per-doc normalized (S3)
    std::size_t dropped_docs = 0;    // S3 docs without positive importance mass

    std::size_t size() const { return words.size(); }
    const double* feature_row(std::size_t i) const { return features.data() + i * feature_dim; }
};

/// Assembles features and targets for one scenario. Pass `layer` for S1/S3;
/// S2 ignores it and concatenates all layers in ascending order. Only words
/// with an aligned hidden state enter; the 60:20:20 split is by document,
/// decided by a seeded shuffle of the sorted doc ids.
ProbeDataset build_dataset(const std::map<int, LayerFeatures>& features_by_layer,
                           const std::vector<ImportanceDistribution>& importance,
                           Scenario scenario, std::optional<int> layer, std::uint64_t seed);

struct TrainConfig {
    std::size_t hidden = 256;
    double learning_rate = 1e-3;
    std::size_t batch_size = 256; // S1/S2 only; S3 steps one document at a time
    std::size_t epochs = 20;
    std::size_t patience = 3;
    std::uint64_t seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct EpochLog {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainedProbe {
    ProbeModel model; // best-validation-loss parameters
    std::vector<EpochLog> log;
    std::size_t epochs_run = 0;
    bool early_stopped = false;
    double best_val_loss = 0.0;
};

/// Adam on the scenario's KL loss with early stopping. Deterministic for a
/// fixed seed; aborts with diagnostics when the loss leaves the reals.
TrainedProbe train_probe(const ProbeDataset& ds, const TrainConfig& cfg);

// Loss + gradient over flattened parameters; exposed so gradients can be
// checked against finite differences.
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};
/// Mean Bernoulli KL over the batch rows (S1/S2 loss).
LossGrad bernoulli_kl_loss_grad(const ProbeModel& model, const ProbeDataset& ds,
                                const std::vector<std::size_t>& rows);
/// KL(target || softmax(logits)) summed over one document's words (S3 loss).
LossGrad softmax_kl_loss_grad(const ProbeModel& model, const ProbeDataset& ds,
                              const ProbeDataset::DocGroup& doc);

/// i.i.d. Gaussian(0, sd = 1/sqrt(cols)) matrix from a seeded generator; the
/// dead-salmon feature control when no randomized-model dump is supplied.
std::vector<double> randomized_features(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Per-word predictions for one document group: sigmoid scores for S1/S2,
/// a softmax distribution for S3.
std::vector<double> predict_doc(const ProbeModel& model, const ProbeDataset& ds,
                                const ProbeDataset::DocGroup& doc);

struct EvalReport {
    std::vector<std::string> doc_ids;
    std::vector<double> spearman_per_doc;
    std::vector<double> ndcg10_per_doc;
    double spearman_mean = 0.0;
    double spearman_std = 0.0; // population
    double ndcg10_mean = 0.0;
    double ndcg10_std = 0.0;
    std::size_t doc_count = 0;
};

/// Per-document Spearman and NDCG@10 of predictions against targets on the
/// test split, macro-averaged.
EvalReport evaluate_probe(const ProbeModel& model, const ProbeDataset& ds);

/// evaluate_probe against a dataset the probe was not trained on; feature
/// dimensions must match.
EvalReport cross_dataset_eval(const ProbeModel& model, const ProbeDataset& other);

struct HeatmapResult {
    std::vector<int> layers;
    std::vector<std::string> token_labels;        // first n token texts
    std::vector<std::vector<double>> values;      // layers x tokens
};

/// Applies one S3 probe per layer to a document and reads the predictions
/// back out per token (tokens without a word get 0).
HeatmapResult export_heatmap(const std::map<int, ProbeModel>& probe_per_layer,
                             const std::map<int, WordVectors>& doc_features_per_layer,
                             const TokenMap& tmap, const Document& doc,
                             std::size_t first_n_tokens = 50);

// Probe checkpoint container: magic "PRBE0001", u32-LE header length, JSON
// header, newline, little-endian f64 parameters in (w1, b1, w2, b2) order.
void save_probe(const std::filesystem::path& path, const ProbeModel& model);
ProbeModel load_probe(const std::filesystem::path& path);

} // namespace impsum::probing
