#include "gia/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gia/error.hpp"

namespace gia {

MetricAverage metric_average_from_string(std::string_view s) {
    if (s == "binary-positive") return MetricAverage::kBinaryPositive;
    if (s == "macro") return MetricAverage::kMacro;
    throw ConfigError("unknown metric_average '" + std::string(s) + "' (expected binary-positive|macro)");
}

std::string_view to_string(MetricAverage avg) {
    return avg == MetricAverage::kBinaryPositive ? "binary-positive" : "macro";
}

double f1_score(const std::vector<int>& predictions, const std::vector<int>& labels, MetricAverage average,
                int n_classes) {
    if (predictions.empty() || predictions.size() != labels.size()) {
        throw ValidationError("f1_score: need equal-length, non-empty predictions and labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes || predictions[i] < 0 || predictions[i] >= n_classes) {
            throw ValidationError("f1_score: class index outside [0, " + std::to_string(n_classes) + ")");
        }
    }

    auto f1_of_class = [&](int cls) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const bool pred = predictions[i] == cls;
            const bool truth = labels[i] == cls;
            tp += pred && truth;
            fp += pred && !truth;
            fn += !pred && truth;
        }
        const std::size_t denom = 2 * tp + fp + fn;
        return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    };

    if (average == MetricAverage::kBinaryPositive) {
        if (n_classes != 2) throw ValidationError("f1_score: binary-positive averaging needs 2 classes");
        return f1_of_class(1);
    }
    double total = 0.0;
    for (int cls = 0; cls < n_classes; ++cls) total += f1_of_class(cls);
    return total / static_cast<double>(n_classes);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size()) {
        throw ValidationError("roc_auc: need equal-length, non-empty scores and labels");
    }
    std::size_t n_pos = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw ValidationError("roc_auc: labels must be binary");
        n_pos += y;
    }
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError("roc_auc: both classes must be present");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks within tied groups; ranks are 1-based.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
        }
        i = j;
    }
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace gia
