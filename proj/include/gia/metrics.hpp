#pragma once

#include <string_view>
#include <vector>

namespace gia {

enum class MetricAverage { kBinaryPositive, kMacro };

MetricAverage metric_average_from_string(std::string_view s);
std::string_view to_string(MetricAverage avg);

// binary-positive: F1 of class 1. macro: unweighted mean of per-class F1,
// where a class absent from both predictions and labels contributes 0.
double f1_score(const std::vector<int>& predictions, const std::vector<int>& labels, MetricAverage average,
                int n_classes);

// Mann–Whitney: (Σ ranks of positives − n₊(n₊+1)/2)/(n₊·n₋), ties averaged.
// scores are positive-class probabilities; labels must contain both classes.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace gia
