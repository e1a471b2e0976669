#include <doctest.h>

#include <cmath>
#include <vector>

#include "gia/error.hpp"
#include "gia/synthgen.hpp"
#include "gia/tape.hpp"
#include "gia/training.hpp"

using gia::Matrix;
using gia::Tape;

namespace {

double wce_value(const Matrix& logits, const std::vector<std::uint32_t>& rows, const std::vector<int>& labels,
                 const std::vector<double>& weights) {
    Tape tape;
    return tape.value(tape.weighted_cross_entropy(tape.constant(logits), rows, labels, weights))(0, 0);
}

}  // namespace

TEST_CASE("saturated correct logits give near-zero loss") {
    Matrix logits(3, 2);
    const std::vector<int> labels{0, 1, 0};
    for (std::size_t i = 0; i < 3; ++i) logits(i, labels[i]) = 1000.0;
    const double loss = wce_value(logits, {0, 1, 2}, labels, {1.0, 1.0});
    CHECK(loss >= 0.0);
    CHECK(loss < 1e-10);
}

TEST_CASE("uniform binary logits cost ln 2") {
    const Matrix logits(4, 2);
    const double loss = wce_value(logits, {0, 1, 2, 3}, {0, 1, 1, 0}, {1.0, 1.0});
    CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("class weights scale the loss as hand-computed") {
    const Matrix logits(3, 2, {1, 0, 0, 2, 1, 1});
    const std::vector<std::uint32_t> rows{0, 1, 2};
    const std::vector<int> labels{0, 1, 0};
    const std::vector<double> weights{1.0, 2.0};
    const double p0 = std::exp(1.0) / (std::exp(1.0) + 1.0);
    const double p1 = std::exp(2.0) / (std::exp(2.0) + 1.0);
    const double p2 = 0.5;
    const double expected = (1.0 * -std::log(p0) + 2.0 * -std::log(p1) + 1.0 * -std::log(p2)) / 3.0;
    CHECK(wce_value(logits, rows, labels, weights) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("cross entropy rejects out-of-range labels") {
    Tape tape;
    const auto logits = tape.constant(Matrix(2, 2));
    const std::vector<std::uint32_t> rows{0, 1};
    const std::vector<double> weights{1.0, 1.0};
    const std::vector<int> too_high{0, 2};
    const std::vector<int> negative{0, -1};
    CHECK_THROWS_AS(tape.weighted_cross_entropy(logits, rows, too_high, weights), gia::ValidationError);
    CHECK_THROWS_AS(tape.weighted_cross_entropy(logits, rows, negative, weights), gia::ValidationError);
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
    Matrix w(2, 2, {1, 2, 3, 4});
    const Matrix before = w;
    gia::AdamState state;
    gia::adam_step({&w}, {Matrix(2, 2)}, state, 0.1);
    CHECK(w == before);
}

TEST_CASE("adam first step matches the closed form") {
    Matrix w(1, 3, {1.0, -2.0, 0.5});
    const Matrix g(1, 3, {0.3, -0.7, 0.0});
    const Matrix before = w;
    gia::AdamState state;
    const double lr = 0.05, eps = 1e-8;
    gia::adam_step({&w}, {g}, state, lr, 0.9, 0.999, eps);
    for (std::size_t i = 0; i < 3; ++i) {
        // at t=1 the bias corrections cancel: Δ = -lr·g/(|g| + eps)
        const double expected = before.data()[i] - lr * g.data()[i] / (std::abs(g.data()[i]) + eps);
        CHECK(w.data()[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("adam descends a quadratic bowl") {
    Matrix x(1, 4, {3.0, -2.0, 1.5, -0.5});
    gia::AdamState state;
    auto loss_of = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += 0.5 * x.data()[i] * x.data()[i];
        return s;
    };
    std::vector<double> losses;
    for (int step = 0; step < 100; ++step) {
        losses.push_back(loss_of());
        Matrix g = x;  // gradient of the bowl is x itself
        gia::adam_step({&x}, {g}, state, 0.05);
    }
    for (std::size_t k = 5; k + 1 < losses.size(); ++k) CHECK(losses[k + 1] < losses[k]);
}

TEST_CASE("inverse-frequency weights reduce to unit weights when balanced") {
    const std::vector<int> labels{0, 1, 0, 1, 0, 1};
    const std::vector<std::uint32_t> mask{0, 1, 2, 3, 4, 5};
    const auto w = gia::class_weights(labels, mask, 2, gia::ClassWeighting::kInverseFrequency);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 1.0);
    const auto skewed = gia::class_weights(labels, {0, 1, 2, 4}, 2, gia::ClassWeighting::kInverseFrequency);
    CHECK(skewed[0] == doctest::Approx(4.0 / (2.0 * 3.0)));
    CHECK(skewed[1] == doctest::Approx(4.0 / (2.0 * 1.0)));
}

namespace {

// Two hot-spots, fully informative features, no label noise: linearly
// separable by construction. Sparse connectivity keeps aggregation from
// blurring features across the class boundary.
gia::SynthConfig separable_config() {
    gia::SynthConfig cfg;
    cfg.n_nodes = 600;
    cfg.connect_radius = 0.02;
    cfg.n_clusters = 2;
    cfg.label_noise = 0.0;
    cfg.informativeness = 1.0;
    cfg.feature_dim = 8;
    cfg.target_positive_rate = 0.3;
    cfg.seed = 99;
    return cfg;
}

}  // namespace

TEST_CASE("training on the separable fixture reaches F1 0.95 within 200 epochs") {
    const gia::Graph graph = gia::generate(separable_config()).graph;
    const auto masks = gia::stratified_split(graph.labels, {0.6, 0.2, 0.2}, 1);
    const gia::Graph normalized = gia::minmax_normalize(graph, masks, gia::NormalizeMode::kFitOnTrain);

    gia::ModelConfig mc;
    gia::TrainConfig tc;
    tc.epochs = 200;
    tc.seed = 1;
    const auto [params, report] = gia::train(normalized, masks, mc, tc);
    CHECK(report.test_f1 >= 0.95);

    SUBCASE("train loss is non-increasing over any 50-epoch window") {
        for (std::size_t k = 0; k + 50 < report.train_loss.size(); ++k) {
            CHECK(report.train_loss[k + 50] <= report.train_loss[k] + 1e-12);
        }
    }
}

TEST_CASE("training twice with the same seed is bit-identical") {
    gia::SynthConfig cfg = separable_config();
    cfg.n_nodes = 120;
    cfg.connect_radius = 0.1;
    cfg.informativeness = 0.5;
    cfg.label_noise = 0.1;
    const gia::Graph graph = gia::generate(cfg).graph;
    const auto masks = gia::stratified_split(graph.labels, {0.6, 0.2, 0.2}, 2);
    const gia::Graph normalized = gia::minmax_normalize(graph, masks, gia::NormalizeMode::kFitOnTrain);

    gia::ModelConfig mc;
    gia::TrainConfig tc;
    tc.epochs = 40;
    tc.seed = 7;
    const auto [p1, r1] = gia::train(normalized, masks, mc, tc);
    const auto [p2, r2] = gia::train(normalized, masks, mc, tc);
    CHECK(r1.train_loss == r2.train_loss);
    CHECK(r1.val_f1 == r2.val_f1);
    CHECK(r1.test_f1 == r2.test_f1);
    CHECK(r1.best_epoch == r2.best_epoch);
    const auto params1 = p1.parameters();
    const auto params2 = p2.parameters();
    for (std::size_t k = 0; k < params1.size(); ++k) CHECK(*params1[k] == *params2[k]);
}

TEST_CASE("a single epoch produces length-one report arrays") {
    gia::SynthConfig cfg = separable_config();
    cfg.n_nodes = 80;
    cfg.connect_radius = 0.12;
    const gia::Graph graph = gia::generate(cfg).graph;
    const auto masks = gia::stratified_split(graph.labels, {0.6, 0.2, 0.2}, 3);
    gia::ModelConfig mc;
    gia::TrainConfig tc;
    tc.epochs = 1;
    const auto [params, report] = gia::train(graph, masks, mc, tc);
    CHECK(report.train_loss.size() == 1);
    CHECK(report.val_f1.size() == 1);
    CHECK(report.val_auc.size() == 1);
}

TEST_CASE("report JSON carries the documented keys") {
    gia::TrainReport r;
    r.train_loss = {0.5, 0.4};
    r.val_f1 = {0.6, 0.7};
    r.val_auc = {0.8, std::numeric_limits<double>::quiet_NaN()};
    r.test_f1 = 0.75;
    r.test_auc = std::numeric_limits<double>::quiet_NaN();
    r.best_epoch = 1;
    // NaN only becomes null in the serialized text, so round-trip the dump.
    const auto j = nlohmann::json::parse(gia::report_to_json(r).dump());
    CHECK(j["train_loss"].size() == 2);
    CHECK(j["val_f1"].size() == 2);
    CHECK(j["val_auc"][1].is_null());
    CHECK(j["test_auc"].is_null());
    CHECK(j["best_epoch"] == 1);
}
