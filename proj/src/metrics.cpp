#include "saepipe/metrics.hpp"

#include "saepipe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace saepipe {

namespace {
void check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw shape_error("scores and labels disagree in length (" + std::to_string(scores.size()) +
                          " vs " + std::to_string(labels.size()) + ")");
    if (scores.empty()) throw value_error("cannot evaluate an empty score vector");
    for (int y : labels)
        if (y != 0 && y != 1) throw value_error("labels must be 0 or 1");
    for (double s : scores)
        if (!std::isfinite(s)) throw value_error("scores must be finite");
}
} // namespace

std::optional<double> rank_auc(std::span<const double> scores, std::span<const int> labels) {
    check_inputs(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups, summed for the positive class.
    double pos_rank_sum = 0.0;
    std::uint64_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j)); // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) {
                pos_rank_sum += midrank;
                ++n_pos;
            }
        i = j;
    }
    const std::uint64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport evaluate(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_inputs(scores, labels);
    EvalReport r;
    r.threshold = threshold;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (labels[i] == 1) {
            ++r.n_pos;
            pred ? ++r.tp : ++r.fn;
        } else {
            ++r.n_neg;
            pred ? ++r.fp : ++r.tn;
        }
    }
    const double n = static_cast<double>(scores.size());
    r.accuracy = static_cast<double>(r.tp + r.tn) / n;

    auto f1_of = [](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
        const double denom = static_cast<double>(2 * tp + fp + fn);
        return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
    };
    // Class 0's "true positives" are the true negatives of class 1.
    const double f1_pos = f1_of(r.tp, r.fp, r.fn);
    const double f1_neg = f1_of(r.tn, r.fn, r.fp);
    r.weighted_f1 = (static_cast<double>(r.n_pos) * f1_pos + static_cast<double>(r.n_neg) * f1_neg) / n;

    r.roc_auc = rank_auc(scores, labels);
    return r;
}

std::vector<std::pair<double, double>> roc_points(std::span<const double> scores,
                                                  std::span<const int> labels) {
    check_inputs(scores, labels);
    std::uint64_t n_pos = 0;
    for (int y : labels) n_pos += (y == 1);
    const std::uint64_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw class_degenerate_error("ROC curve needs both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::vector<std::pair<double, double>> points;
    points.emplace_back(0.0, 0.0);
    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        // One point per distinct score; tied scores move diagonally together.
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            labels[order[j]] == 1 ? ++tp : ++fp;
            ++j;
        }
        points.emplace_back(static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos));
        i = j;
    }
    return points;
}

std::string to_kv_text(const EvalReport& r) {
    char buf[64];
    std::string out;
    auto add_f = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
        out += buf;
    };
    auto add_u = [&](const char* key, std::uint64_t v) {
        std::snprintf(buf, sizeof(buf), "%s=%llu\n", key, static_cast<unsigned long long>(v));
        out += buf;
    };
    add_f("accuracy", r.accuracy);
    add_f("weighted_f1", r.weighted_f1);
    if (r.roc_auc) add_f("roc_auc", *r.roc_auc);
    else out += "roc_auc=undefined\n";
    add_f("threshold", r.threshold);
    add_u("n_pos", r.n_pos);
    add_u("n_neg", r.n_neg);
    add_u("tp", r.tp);
    add_u("fp", r.fp);
    add_u("tn", r.tn);
    add_u("fn", r.fn);
    return out;
}

} // namespace saepipe
