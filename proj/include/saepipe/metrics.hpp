#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace saepipe {

// Classification metrics for one scored test set.
// roc_auc is unset when only one class is present (rank statistic undefined);
// the thresholded metrics are still filled in.
struct EvalReport {
    double accuracy = 0.0;
    double weighted_f1 = 0.0;
    std::optional<double> roc_auc;
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::uint64_t n_pos = 0, n_neg = 0;
    double threshold = 0.5;
};

// Accuracy and weighted F1 from scores thresholded at `threshold`
// (score >= threshold predicts positive); AUC by the rank statistic with
// midranks for ties.
EvalReport evaluate(std::span<const double> scores, std::span<const int> labels,
                    double threshold = 0.5);

// Rank-based AUC alone; unset when a class is missing.
std::optional<double> rank_auc(std::span<const double> scores, std::span<const int> labels);

// ROC staircase from (0,0) to (1,1) with one point per distinct score.
// Trapezoidal area over these points equals rank_auc. Throws
// class_degenerate_error when a class is missing.
std::vector<std::pair<double, double>> roc_points(std::span<const double> scores,
                                                  std::span<const int> labels);

// Line-oriented "key=value" rendering, deterministic formatting and order.
std::string to_kv_text(const EvalReport& report);

} // namespace saepipe
