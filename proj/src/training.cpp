#include "gia/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gia/error.hpp"
#include "gia/tape.hpp"

namespace gia {

ClassWeighting class_weighting_from_string(std::string_view s) {
    if (s == "none") return ClassWeighting::kNone;
    if (s == "inverse-frequency") return ClassWeighting::kInverseFrequency;
    throw ConfigError("unknown class_weighting '" + std::string(s) + "' (expected none|inverse-frequency)");
}

std::string_view to_string(ClassWeighting w) {
    return w == ClassWeighting::kNone ? "none" : "inverse-frequency";
}

nlohmann::json report_to_json(const TrainReport& report) {
    nlohmann::json j;
    j["train_loss"] = report.train_loss;
    j["val_f1"] = report.val_f1;
    j["val_auc"] = report.val_auc;  // NaN serializes as null
    j["test_f1"] = report.test_f1;
    j["test_auc"] = report.test_auc;
    j["best_epoch"] = report.best_epoch;
    return j;
}

void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
    if (params.size() != grads.size()) {
        throw ArgumentError("adam_step: params/grads length mismatch");
    }
    if (state.m.empty()) {
        for (const Matrix* p : params) {
            state.m.emplace_back(p->rows(), p->cols());
            state.v.emplace_back(p->rows(), p->cols());
        }
    }
    ++state.t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Matrix& p = *params[k];
        const Matrix& g = grads[k];
        if (!p.same_shape(g)) throw ShapeError("adam_step: gradient shape mismatch at parameter " + std::to_string(k));
        for (std::size_t i = 0; i < p.size(); ++i) {
            double& m = state.m[k].data()[i];
            double& v = state.v[k].data()[i];
            const double gi = g.data()[i];
            m = beta1 * m + (1.0 - beta1) * gi;
            v = beta2 * v + (1.0 - beta2) * gi * gi;
            const double m_hat = m / bc1;
            const double v_hat = v / bc2;
            p.data()[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
    }
}

std::vector<double> class_weights(const std::vector<int>& labels, const std::vector<std::uint32_t>& mask,
                                  int n_classes, ClassWeighting weighting) {
    std::vector<double> w(n_classes, 1.0);
    if (weighting == ClassWeighting::kNone) return w;
    std::vector<std::size_t> counts(n_classes, 0);
    for (std::uint32_t i : mask) ++counts[labels[i]];
    for (int c = 0; c < n_classes; ++c) {
        if (counts[c] == 0) {
            throw ValidationError("class_weights: class " + std::to_string(c) + " absent from the training mask");
        }
        w[c] = static_cast<double>(mask.size()) / (static_cast<double>(n_classes) * static_cast<double>(counts[c]));
    }
    return w;
}

namespace {

struct EvalResult {
    double f1 = 0.0;
    double auc = std::numeric_limits<double>::quiet_NaN();
};

// Argmax predictions plus positive-class probability on the masked nodes.
EvalResult evaluate(const Matrix& logits, const std::vector<int>& labels, const std::vector<std::uint32_t>& mask,
                    MetricAverage average, int n_classes) {
    std::vector<int> pred;
    std::vector<int> truth;
    std::vector<double> pos_score;
    pred.reserve(mask.size());
    truth.reserve(mask.size());
    pos_score.reserve(mask.size());
    for (std::uint32_t i : mask) {
        const double* row = logits.data() + static_cast<std::size_t>(i) * logits.cols();
        std::size_t best = 0;
        for (std::size_t j = 1; j < logits.cols(); ++j) {
            if (row[j] > row[best]) best = j;
        }
        pred.push_back(static_cast<int>(best));
        truth.push_back(labels[i]);
        if (n_classes == 2) {
            // softmax probability of class 1
            const double mx = std::max(row[0], row[1]);
            const double e0 = std::exp(row[0] - mx), e1 = std::exp(row[1] - mx);
            pos_score.push_back(e1 / (e0 + e1));
        }
    }
    EvalResult r;
    r.f1 = f1_score(pred, truth, average, n_classes);
    if (n_classes == 2) {
        const bool has_pos = std::find(truth.begin(), truth.end(), 1) != truth.end();
        const bool has_neg = std::find(truth.begin(), truth.end(), 0) != truth.end();
        if (has_pos && has_neg) r.auc = roc_auc(pos_score, truth);
    }
    return r;
}

}  // namespace

std::pair<ModelParams, TrainReport> train(const Graph& graph, const SplitMasks& masks,
                                          const ModelConfig& model_config, const TrainConfig& train_config) {
    if (train_config.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (!(train_config.learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
    if (masks.train.empty() || masks.val.empty() || masks.test.empty()) {
        throw ValidationError("train: empty split mask");
    }
    for (const auto* mask : {&masks.train, &masks.val, &masks.test}) {
        for (std::uint32_t i : *mask) {
            if (i >= graph.n_nodes) throw ValidationError("train: mask index " + std::to_string(i) + " out of range");
        }
    }

    const SparseOp op =
        model_config.host == Host::kGcn ? normalize_adjacency(graph) : mean_adjacency(graph);
    const std::vector<double> weights =
        class_weights(graph.labels, masks.train, model_config.n_classes, train_config.class_weighting);

    std::vector<int> train_labels;
    train_labels.reserve(masks.train.size());
    for (std::uint32_t i : masks.train) train_labels.push_back(graph.labels[i]);

    ModelParams params = ModelParams::init(graph.node_features.cols(), model_config,
                                           Rng(train_config.seed).stream("init"));
    AdamState adam;
    TrainReport report;
    report.train_loss.reserve(train_config.epochs);
    report.val_f1.reserve(train_config.epochs);
    report.val_auc.reserve(train_config.epochs);

    ModelParams best_params = params;
    double best_f1 = -1.0;

    for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
        Tape tape;
        ModelParamNodes ids = register_model_params(tape, params);
        Tape::NodeId logits = model_forward(tape, graph, op, ids, model_config);
        Tape::NodeId loss = tape.weighted_cross_entropy(logits, masks.train, train_labels, weights);

        const double loss_value = tape.value(loss)(0, 0);
        if (!std::isfinite(loss_value)) {
            throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch));
        }
        report.train_loss.push_back(loss_value);

        const EvalResult val =
            evaluate(tape.value(logits), graph.labels, masks.val, train_config.metric_average, model_config.n_classes);
        report.val_f1.push_back(val.f1);
        report.val_auc.push_back(val.auc);
        if (val.f1 > best_f1) {
            best_f1 = val.f1;
            best_params = params;
            report.best_epoch = epoch;
        }

        std::vector<Matrix> grads = tape.gradients(loss, ids.all);
        adam_step(params.parameters(), grads, adam, train_config.learning_rate);
    }

    const Matrix logits = model_forward(graph, op, best_params, model_config);
    const EvalResult test =
        evaluate(logits, graph.labels, masks.test, train_config.metric_average, model_config.n_classes);
    TrainReport out = std::move(report);
    out.test_f1 = test.f1;
    out.test_auc = test.auc;
    return {std::move(best_params), std::move(out)};
}

}  // namespace gia
