#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "saepipe/errors.hpp"
#include "saepipe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace saepipe;

namespace {

// Direct definition of the rank statistic: over all (positive, negative)
// pairs, count wins as 1 and score ties as 1/2. Quadratic but obviously right.
double pair_count_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0;
    std::uint64_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

std::pair<std::vector<double>, std::vector<int>> random_instance(std::mt19937& gen,
                                                                 int max_n,
                                                                 bool force_ties) {
    std::uniform_int_distribution<int> n_dist(2, max_n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int n = n_dist(gen);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        scores[i] = force_ties ? std::floor(u(gen) * 4.0) / 4.0 : u(gen);
        labels[i] = static_cast<int>(gen() % 2);
    }
    labels[0] = 1; // guarantee both classes
    labels[n - 1] = 0;
    return {scores, labels};
}

} // namespace

TEST_CASE("rank_auc: documented four-point example") {
    const std::vector<double> scores{0.9, 0.4, 0.6, 0.2};
    const std::vector<int> labels{1, 0, 0, 1};
    // pairs: (0.9 vs 0.4) win, (0.9 vs 0.6) win, (0.2 vs 0.4) loss, (0.2 vs 0.6) loss
    CHECK(rank_auc(scores, labels) == 0.5);
}

TEST_CASE("rank_auc: perfect and inverted rankings") {
    const std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
    CHECK(rank_auc(scores, std::vector<int>{0, 0, 1, 1}) == 1.0);
    CHECK(rank_auc(scores, std::vector<int>{1, 1, 0, 0}) == 0.0);
}

TEST_CASE("rank_auc: all scores tied gives exactly one half") {
    const std::vector<double> scores{0.3, 0.3, 0.3, 0.3};
    CHECK(rank_auc(scores, std::vector<int>{1, 0, 1, 0}) == 0.5);
}

TEST_CASE("rank_auc: midrank handling matches pair counting exactly") {
    // Both sides are sums of halves divided by n_pos*n_neg, so equality is
    // exact, not approximate.
    std::mt19937 gen(59);
    for (int trial = 0; trial < 400; ++trial) {
        const auto [scores, labels] = random_instance(gen, 30, trial % 2 == 0);
        const auto auc = rank_auc(scores, labels);
        REQUIRE(auc.has_value());
        CHECK(*auc == pair_count_auc(scores, labels));
    }
}

TEST_CASE("rank_auc: unset when one class is absent") {
    const std::vector<double> scores{0.1, 0.9};
    CHECK_FALSE(rank_auc(scores, std::vector<int>{1, 1}).has_value());
    CHECK_FALSE(rank_auc(scores, std::vector<int>{0, 0}).has_value());
    CHECK_THROWS_AS((void)rank_auc({}, std::vector<int>{}), value_error);
}

TEST_CASE("rank_auc: label flip mirrors the statistic") {
    std::mt19937 gen(61);
    for (int trial = 0; trial < 100; ++trial) {
        auto [scores, labels] = random_instance(gen, 25, true);
        const auto auc = rank_auc(scores, labels);
        for (auto& y : labels) y = 1 - y;
        const auto flipped = rank_auc(scores, labels);
        REQUIRE(auc.has_value());
        REQUIRE(flipped.has_value());
        CHECK(*flipped == doctest::Approx(1.0 - *auc).epsilon(1e-15));
    }
}

TEST_CASE("rank_auc: invariant under strictly increasing score transforms") {
    std::mt19937 gen(67);
    for (int trial = 0; trial < 100; ++trial) {
        auto [scores, labels] = random_instance(gen, 25, true);
        const auto base = rank_auc(scores, labels);
        for (auto& s : scores) s = std::exp(3.0 * s) - 2.0;
        CHECK(rank_auc(scores, labels) == base);
    }
}

TEST_CASE("rank_auc: rejects mismatched lengths") {
    const std::vector<double> scores{0.1, 0.9};
    const std::vector<int> labels{1};
    CHECK_THROWS_AS((void)rank_auc(scores, labels), shape_error);
}

TEST_CASE("roc_points: endpoints and trapezoid area") {
    std::mt19937 gen(71);
    for (int trial = 0; trial < 100; ++trial) {
        const auto [scores, labels] = random_instance(gen, 40, trial % 2 == 0);
        const auto pts = roc_points(scores, labels);
        REQUIRE(pts.size() >= 2);
        CHECK(pts.front() == std::pair<double, double>(0.0, 0.0));
        CHECK(pts.back() == std::pair<double, double>(1.0, 1.0));
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].first >= pts[i - 1].first);
            CHECK(pts[i].second >= pts[i - 1].second);
        }
        double area = 0.0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
        CHECK(area == doctest::Approx(*rank_auc(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("roc_points: degenerate labels throw") {
    const std::vector<double> scores{0.1, 0.9};
    CHECK_THROWS_AS((void)roc_points(scores, std::vector<int>{1, 1}), class_degenerate_error);
}

TEST_CASE("evaluate: documented confusion example") {
    const std::vector<double> scores{0.9, 0.4, 0.6, 0.2};
    const std::vector<int> labels{1, 0, 0, 1};
    const auto r = evaluate(scores, labels);
    CHECK(r.tp == 1); // 0.9
    CHECK(r.fp == 1); // 0.6
    CHECK(r.tn == 1); // 0.4
    CHECK(r.fn == 1); // 0.2
    CHECK(r.n_pos == 2);
    CHECK(r.n_neg == 2);
    CHECK(r.accuracy == 0.5);
    CHECK(r.threshold == 0.5);
    REQUIRE(r.roc_auc.has_value());
    CHECK(*r.roc_auc == 0.5);
    // per-class F1 is 0.5 for both, weights equal
    CHECK(r.weighted_f1 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("evaluate: score exactly at the threshold predicts positive") {
    const std::vector<double> scores{0.5};
    const auto pos = evaluate(scores, std::vector<int>{1});
    CHECK(pos.tp == 1);
    const auto neg = evaluate(scores, std::vector<int>{0});
    CHECK(neg.fp == 1);
}

TEST_CASE("evaluate: custom threshold moves the cut") {
    const std::vector<double> scores{0.9, 0.4, 0.6, 0.2};
    const std::vector<int> labels{1, 0, 0, 1};
    const auto r = evaluate(scores, labels, 0.95);
    CHECK(r.tp == 0);
    CHECK(r.fp == 0);
    CHECK(r.tn == 2);
    CHECK(r.fn == 2);
    CHECK(r.threshold == 0.95);
}

TEST_CASE("evaluate: weighted F1 against a hand computation") {
    // 6 points: pos {0.8 tp, 0.3 fn, 0.9 tp}, neg {0.2 tn, 0.7 fp, 0.1 tn}
    const std::vector<double> scores{0.8, 0.3, 0.9, 0.2, 0.7, 0.1};
    const std::vector<int> labels{1, 1, 1, 0, 0, 0};
    const auto r = evaluate(scores, labels);
    // positive class: precision 2/3, recall 2/3, F1 2/3
    // negative class: precision 2/3, recall 2/3, F1 2/3
    CHECK(r.weighted_f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("evaluate: single-class input fills thresholded metrics only") {
    const std::vector<double> scores{0.8, 0.2, 0.6};
    const auto r = evaluate(scores, std::vector<int>{1, 1, 1});
    CHECK_FALSE(r.roc_auc.has_value());
    CHECK(r.n_pos == 3);
    CHECK(r.n_neg == 0);
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("evaluate: accuracy plus error rate is one") {
    std::mt19937 gen(73);
    for (int trial = 0; trial < 100; ++trial) {
        const auto [scores, labels] = random_instance(gen, 30, false);
        const auto r = evaluate(scores, labels);
        const double n = static_cast<double>(scores.size());
        const double errors = static_cast<double>(r.fp + r.fn);
        CHECK(r.accuracy == doctest::Approx(1.0 - errors / n).epsilon(1e-12));
        CHECK(r.tp + r.fn == r.n_pos);
        CHECK(r.tn + r.fp == r.n_neg);
    }
}

TEST_CASE("evaluate: empty input is an error") {
    CHECK_THROWS_AS((void)evaluate({}, std::vector<int>{}), value_error);
}

TEST_CASE("evaluate: labels outside {0,1} are rejected") {
    const std::vector<double> scores{0.5, 0.5};
    CHECK_THROWS_AS((void)evaluate(scores, std::vector<int>{1, 2}), value_error);
    CHECK_THROWS_AS((void)evaluate(scores, std::vector<int>{-1, 0}), value_error);
}

TEST_CASE("to_kv_text: deterministic key order and undefined AUC spelling") {
    const std::vector<double> scores{0.9, 0.4, 0.6, 0.2};
    const std::vector<int> labels{1, 0, 0, 1};
    const std::string text = to_kv_text(evaluate(scores, labels));
    const std::vector<std::string> keys{"accuracy=", "weighted_f1=", "roc_auc=",
                                        "threshold=", "n_pos=",       "n_neg=",
                                        "tp=",        "fp=",          "tn=",
                                        "fn="};
    std::size_t at = 0;
    for (const auto& key : keys) {
        const auto pos = text.find(key, at);
        REQUIRE_MESSAGE(pos != std::string::npos, "missing ", key);
        at = pos + key.size();
    }
    CHECK(text.back() == '\n');

    const std::string one_class = to_kv_text(evaluate(scores, std::vector<int>{1, 1, 1, 1}));
    CHECK(one_class.find("roc_auc=undefined\n") != std::string::npos);
}

TEST_CASE("to_kv_text: numeric fields render at full precision") {
    EvalReport r;
    r.accuracy = 1.0 / 3.0;
    r.weighted_f1 = 0.25;
    r.roc_auc = 2.0 / 3.0;
    const std::string text = to_kv_text(r);
    CHECK(text.find("accuracy=0.33333333333333331\n") != std::string::npos);
    CHECK(text.find("weighted_f1=0.25\n") != std::string::npos);
    CHECK(text.find("roc_auc=0.66666666666666663\n") != std::string::npos);
}
