#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "saepipe/errors.hpp"
#include "saepipe/linmodel.hpp"
#include "saepipe/metrics.hpp"

#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace saepipe;

namespace {

struct Problem {
    Matrix x;
    std::vector<int> y;
};

Problem random_problem(std::mt19937& gen, std::size_t n, std::size_t m, double shift = 1.0) {
    std::normal_distribution<double> noise(0.0, 1.0);
    Problem p{Matrix(n, m), std::vector<int>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        p.y[i] = static_cast<int>(i % 2);
        for (std::size_t j = 0; j < m; ++j)
            p.x(i, j) = noise(gen) + (j == 0 && p.y[i] == 1 ? shift : 0.0);
    }
    return p;
}

// Objective recomputed from its definition, independent of logistic_loss.
double direct_objective(const Matrix& x_std, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < x_std.rows; ++i) {
        double z = b;
        for (std::size_t j = 0; j < x_std.cols; ++j) z += w[j] * x_std(i, j);
        // -log p(y|z) in the numerically stable log1p form
        total += y[i] == 1 ? std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    total /= static_cast<double>(x_std.rows);
    double penalty = 0.0;
    for (double v : w) penalty += v * v;
    return total + 0.5 * lambda * penalty;
}

} // namespace

TEST_CASE("logistic_loss: matches the written-out objective") {
    std::mt19937 gen(101);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + gen() % 20, m = 1 + gen() % 5;
        Matrix x(n, m);
        std::vector<int> y(n);
        std::vector<double> w(m);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(gen() % 2);
            for (std::size_t j = 0; j < m; ++j) x(i, j) = u(gen);
        }
        for (auto& v : w) v = u(gen);
        const double b = u(gen), lambda = std::abs(u(gen));
        CHECK(logistic_loss(x, y, w, b, lambda) ==
              doctest::Approx(direct_objective(x, y, w, b, lambda)).epsilon(1e-12));
    }
}

TEST_CASE("logistic_gradient: matches central finite differences") {
    std::mt19937 gen(103);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + gen() % 30, m = 1 + gen() % 6;
        Matrix x(n, m);
        std::vector<int> y(n);
        std::vector<double> w(m);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(gen() % 2);
            for (std::size_t j = 0; j < m; ++j) x(i, j) = u(gen);
        }
        for (auto& v : w) v = u(gen);
        const double b = u(gen), lambda = std::abs(u(gen));

        std::vector<double> grad(m);
        double grad_b = 0.0;
        logistic_gradient(x, y, w, b, lambda, grad, grad_b);

        for (std::size_t j = 0; j < m; ++j) {
            auto bumped = w;
            bumped[j] = w[j] + h;
            const double up = logistic_loss(x, y, bumped, b, lambda);
            bumped[j] = w[j] - h;
            const double down = logistic_loss(x, y, bumped, b, lambda);
            const double numeric = (up - down) / (2.0 * h);
            CHECK(grad[j] == doctest::Approx(numeric).epsilon(1e-6));
        }
        const double up = logistic_loss(x, y, w, b + h, lambda);
        const double down = logistic_loss(x, y, w, b - h, lambda);
        CHECK(grad_b == doctest::Approx((up - down) / (2.0 * h)).epsilon(1e-6));
    }
}

TEST_CASE("train_logistic: zero-information data stays at the prior") {
    Matrix x(4, 1);
    x(0, 0) = x(1, 0) = x(2, 0) = x(3, 0) = 1.0; // constant column
    const std::vector<int> y{0, 1, 0, 1};
    const auto model = train_logistic(x, y, 0.1);
    CHECK(model.weights[0] == 0.0);
    CHECK(model.feature_stds[0] == 0.0);
    CHECK(model.bias == doctest::Approx(0.0).epsilon(1e-6)); // balanced classes
    CHECK(predict_proba_selected(model, std::vector<double>{1.0}) ==
          doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("train_logistic: fitted point is a global minimum witness") {
    // Convexity: the solver's endpoint must beat every probe point.
    std::mt19937 gen(107);
    const auto p = random_problem(gen, 60, 3);
    const double lambda = 0.05;
    const auto model = train_logistic(p.x, p.y, lambda);

    std::vector<double> means, stds;
    const Matrix x_std = standardize_columns(p.x, means, stds);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(means[j] == doctest::Approx(model.feature_means[j]));
        CHECK(stds[j] == doctest::Approx(model.feature_stds[j]));
    }
    const double at_solution = logistic_loss(x_std, p.y, model.weights, model.bias, lambda);

    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> w{u(gen), u(gen), u(gen)};
        CHECK(at_solution <= logistic_loss(x_std, p.y, w, u(gen), lambda) + 1e-7);
    }
    for (int probe = 0; probe < 100; ++probe) {
        // small perturbations around the solution as well
        std::normal_distribution<double> tiny(0.0, 1e-3);
        std::vector<double> w = model.weights;
        for (auto& v : w) v += tiny(gen);
        CHECK(at_solution <= logistic_loss(x_std, p.y, w, model.bias + tiny(gen), lambda) + 1e-10);
    }
}

TEST_CASE("train_logistic: separable 1-D data gets a finite positive weight") {
    Matrix x(8, 1);
    std::vector<int> y(8);
    for (std::size_t i = 0; i < 8; ++i) {
        x(i, 0) = static_cast<double>(i);
        y[i] = i >= 4 ? 1 : 0;
    }
    const auto model = train_logistic(x, y, 0.1);
    CHECK(model.weights[0] > 0.0);
    CHECK(std::isfinite(model.weights[0]));
    CHECK(model.weights[0] < 100.0); // the penalty keeps it bounded
    CHECK(predict_proba_full(model, std::vector<double>{7.0}, 1) > 0.9);
    CHECK(predict_proba_full(model, std::vector<double>{0.0}, 1) < 0.1);
}

TEST_CASE("train_logistic: heavy regularization crushes the weights") {
    std::mt19937 gen(109);
    const auto p = random_problem(gen, 50, 4, 2.0);
    const auto model = train_logistic(p.x, p.y, 1e6);
    double norm = 0.0;
    for (double w : model.weights) norm += w * w;
    CHECK(std::sqrt(norm) <= 1e-2);
}

TEST_CASE("train_logistic: the penalty term is monotone in lambda") {
    std::mt19937 gen(113);
    const auto p = random_problem(gen, 80, 3, 1.5);
    double prev = 1e300;
    for (double lambda : {1e-4, 1e-2, 1.0, 1e2}) {
        const auto model = train_logistic(p.x, p.y, lambda);
        double norm = 0.0;
        for (double w : model.weights) norm += w * w;
        CHECK(norm <= prev + 1e-9);
        prev = norm;
    }
}

TEST_CASE("train_logistic: predictions are invariant to feature scaling") {
    // Standardization makes the fit depend only on the standardized data.
    std::mt19937 gen(127);
    const auto p = random_problem(gen, 40, 3);
    const auto base = train_logistic(p.x, p.y, 0.1);

    Matrix rescaled = p.x;
    for (std::size_t i = 0; i < rescaled.rows; ++i) {
        rescaled(i, 0) = rescaled(i, 0) * 1000.0 - 7.0;
        rescaled(i, 1) = rescaled(i, 1) * 1e-6;
        rescaled(i, 2) = rescaled(i, 2) + 300.0;
    }
    const auto scaled = train_logistic(rescaled, p.y, 0.1);

    const auto base_proba = predict_proba_full(base, p.x);
    const auto scaled_proba = predict_proba_full(scaled, rescaled);
    for (std::size_t i = 0; i < base_proba.size(); ++i)
        CHECK(scaled_proba[i] == doctest::Approx(base_proba[i]).epsilon(1e-8));
}

TEST_CASE("train_logistic: flipping labels mirrors the model") {
    // The objective is symmetric under (y, w, b) -> (1-y, -w, -b), so the
    // optimum must be too.
    std::mt19937 gen(131);
    const auto p = random_problem(gen, 50, 2);
    auto flipped_y = p.y;
    for (auto& v : flipped_y) v = 1 - v;

    const auto a = train_logistic(p.x, p.y, 0.1);
    const auto b = train_logistic(p.x, flipped_y, 0.1);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(b.weights[j] == doctest::Approx(-a.weights[j]).epsilon(1e-6));
    CHECK(b.bias == doctest::Approx(-a.bias).epsilon(1e-6));
}

TEST_CASE("predict_proba_full equals selected prediction after projection") {
    std::mt19937 gen(137);
    const auto p = random_problem(gen, 30, 2);
    const auto model = train_logistic(p.x, p.y, 0.1, {3, 8});

    std::vector<double> full(10, -99.0); // junk everywhere except the used columns
    full[3] = p.x(4, 0);
    full[8] = p.x(4, 1);
    const double via_full = predict_proba_full(model, full, 10);
    const double via_selected =
        predict_proba_selected(model, std::vector<double>{p.x(4, 0), p.x(4, 1)});
    CHECK(via_full == doctest::Approx(via_selected).epsilon(1e-15));

    CHECK_THROWS_AS((void)predict_proba_full(model, full, 9), shape_error);
    CHECK_THROWS_AS((void)predict_proba_selected(model, std::vector<double>{1.0}), shape_error);
}

TEST_CASE("train_logistic: input validation") {
    Matrix x(4, 1);
    const std::vector<int> y{0, 1, 0, 1};
    CHECK_THROWS_AS((void)train_logistic(x, std::vector<int>{0, 1}, 0.1), shape_error);
    CHECK_THROWS_AS((void)train_logistic(x, std::vector<int>{0, 0, 0, 0}, 0.1),
                    class_degenerate_error);
    CHECK_THROWS_AS((void)train_logistic(x, y, -1.0), value_error);
    CHECK_THROWS_AS((void)train_logistic(x, y, std::nan("")), value_error);
    CHECK_THROWS_AS((void)train_logistic(x, y, 0.1, {1, 2}), shape_error); // wrong index count
}

TEST_CASE("grid_search: picks the best validation AUC") {
    std::mt19937 gen(139);
    const auto train = random_problem(gen, 80, 3, 1.2);
    const auto val = random_problem(gen, 60, 3, 1.2);
    const std::vector<double> grid{1e-4, 1e-2, 1.0, 100.0};
    const auto result = grid_search(train.x, train.y, val.x, val.y, grid);

    REQUIRE(result.points.size() == grid.size());
    double best = -1.0;
    for (const auto& pt : result.points) {
        REQUIRE(pt.ok);
        best = std::max(best, pt.val_auc);
    }
    bool found = false;
    for (const auto& pt : result.points)
        if (pt.lambda == result.lambda) {
            CHECK(pt.val_auc == best);
            found = true;
        }
    CHECK(found);
    CHECK(result.model.lambda == result.lambda);
}

TEST_CASE("grid_search: exact ties resolve toward the larger lambda") {
    // A constant-feature problem gives every lambda the same (degenerate)
    // model, so all validation AUCs tie exactly.
    Matrix train_x(6, 1, 1.0);
    const std::vector<int> train_y{0, 1, 0, 1, 0, 1};
    Matrix val_x(4, 1, 1.0);
    const std::vector<int> val_y{0, 1, 0, 1};
    const std::vector<double> grid{1e-3, 1e-1, 10.0};
    const auto result = grid_search(train_x, train_y, val_x, val_y, grid);
    CHECK(result.lambda == 10.0);
}

TEST_CASE("grid_search: single-point grid works") {
    std::mt19937 gen(149);
    const auto train = random_problem(gen, 40, 2);
    const auto val = random_problem(gen, 20, 2);
    const auto result = grid_search(train.x, train.y, val.x, val.y, std::vector<double>{0.5});
    CHECK(result.lambda == 0.5);
    CHECK(result.points.size() == 1);
}

TEST_CASE("grid_search: failing grid points are skipped with a note") {
    std::mt19937 gen(151);
    const auto train = random_problem(gen, 40, 2);
    const auto val = random_problem(gen, 20, 2);
    const std::vector<double> grid{-1.0, 0.5}; // negative lambda cannot train
    const auto result = grid_search(train.x, train.y, val.x, val.y, grid);
    CHECK(result.lambda == 0.5);
    REQUIRE(result.points.size() == 2);
    CHECK_FALSE(result.points[0].ok);
    CHECK_FALSE(result.points[0].note.empty());
    CHECK(result.points[1].ok);
}

TEST_CASE("grid_search: every point failing is an error") {
    std::mt19937 gen(157);
    const auto train = random_problem(gen, 40, 2);
    const auto val = random_problem(gen, 20, 2);
    CHECK_THROWS_AS(
        (void)grid_search(train.x, train.y, val.x, val.y, std::vector<double>{-1.0, -2.0}),
        error);
    CHECK_THROWS_AS(
        (void)grid_search(train.x, train.y, val.x, val.y, std::vector<double>{}),
        value_error);
}

TEST_CASE("default_lambda_grid: reciprocal of the standard C grid") {
    const auto grid = default_lambda_grid();
    REQUIRE(grid.size() == 5);
    const std::vector<double> c{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(grid[i] == doctest::Approx(1.0 / c[i]).epsilon(1e-12));
}

TEST_CASE("LIN1 file: round-trip is exact") {
    TempDir dir("lin1");
    std::mt19937 gen(163);
    const auto p = random_problem(gen, 50, 3);
    const auto model = train_logistic(p.x, p.y, 0.25, {2, 5, 9});
    save_linear(model, dir.file("m.lin1"));
    const auto back = load_linear(dir.file("m.lin1"));

    CHECK(back.feature_indices == model.feature_indices);
    CHECK(back.weights == model.weights); // bit-exact doubles
    CHECK(back.bias == model.bias);
    CHECK(back.lambda == model.lambda);
    CHECK(back.feature_means == model.feature_means);
    CHECK(back.feature_stds == model.feature_stds);

    // row 0 projected through indices {2,5,9} needs a 10-wide vector
    std::vector<double> wide(10, 0.0);
    wide[2] = p.x(0, 0);
    wide[5] = p.x(0, 1);
    wide[9] = p.x(0, 2);
    CHECK(predict_proba_full(back, wide, 10) ==
          predict_proba_full(model, wide, 10));
}

TEST_CASE("LIN1 file: bad magic and truncation") {
    TempDir dir("lin1bad");
    std::mt19937 gen(167);
    const auto p = random_problem(gen, 20, 2);
    save_linear(train_logistic(p.x, p.y, 0.1), dir.file("m.lin1"));
    std::string bytes = slurp(dir.file("m.lin1"));

    std::string wrong = bytes;
    wrong[0] = 'Z';
    spit(dir.file("magic.lin1"), wrong);
    CHECK_THROWS_AS((void)load_linear(dir.file("magic.lin1")), format_error);

    spit(dir.file("trunc.lin1"), bytes.substr(0, bytes.size() - 7));
    CHECK_THROWS_AS((void)load_linear(dir.file("trunc.lin1")), corruption_error);
}

TEST_CASE("standardize_columns: population statistics and constant guard") {
    Matrix x(4, 2);
    x(0, 0) = 1.0;
    x(1, 0) = 2.0;
    x(2, 0) = 3.0;
    x(3, 0) = 4.0;
    x(0, 1) = x(1, 1) = x(2, 1) = x(3, 1) = 9.0;
    std::vector<double> means, stds;
    const Matrix z = standardize_columns(x, means, stds);
    CHECK(means[0] == 2.5);
    CHECK(stds[0] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12)); // 1/n convention
    CHECK(means[1] == 9.0);
    CHECK(stds[1] == 0.0);
    for (std::size_t i = 0; i < 4; ++i) CHECK(z(i, 1) == 0.0);
    double mean0 = 0.0, var0 = 0.0;
    for (std::size_t i = 0; i < 4; ++i) mean0 += z(i, 0);
    mean0 /= 4.0;
    for (std::size_t i = 0; i < 4; ++i) var0 += (z(i, 0) - mean0) * (z(i, 0) - mean0);
    var0 /= 4.0;
    CHECK(mean0 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(var0 == doctest::Approx(1.0).epsilon(1e-12));
}
