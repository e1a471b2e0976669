#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gia/gnn.hpp"
#include "gia/graph.hpp"
#include "gia/metrics.hpp"
#include "gia/preprocess.hpp"

namespace gia {

enum class ClassWeighting { kNone, kInverseFrequency };

ClassWeighting class_weighting_from_string(std::string_view s);
std::string_view to_string(ClassWeighting w);

struct TrainConfig {
    std::size_t epochs = 500;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
    ClassWeighting class_weighting = ClassWeighting::kInverseFrequency;
    MetricAverage metric_average = MetricAverage::kBinaryPositive;
};

struct TrainReport {
    std::vector<double> train_loss;  // one per epoch
    std::vector<double> val_f1;
    std::vector<double> val_auc;  // NaN when AUC is undefined (severity task)
    double test_f1 = 0.0;
    double test_auc = 0.0;
    std::size_t best_epoch = 0;
};

// {"train_loss": [...], "val_f1": [...], "val_auc": [...],
//  "test_f1": x, "test_auc": x|null, "best_epoch": k}
nlohmann::json report_to_json(const TrainReport& report);

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long t = 0;
};

// Standard Adam with bias correction. params and grads must align; the state
// is created lazily on the first call.
void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// N/(C·count_c) over the training labels; unit weights when disabled.
std::vector<double> class_weights(const std::vector<int>& labels, const std::vector<std::uint32_t>& mask,
                                  int n_classes, ClassWeighting weighting);

// Full-graph transductive loop: loss on the train mask, metrics on val each
// epoch, parameters returned from the best-val-F1 epoch. Deterministic for a
// fixed config.
std::pair<ModelParams, TrainReport> train(const Graph& graph, const SplitMasks& masks, const ModelConfig& model_config,
                                          const TrainConfig& train_config);

}  // namespace gia
