#include "saepipe/linmodel.hpp"

#include "saepipe/binio.hpp"
#include "saepipe/errors.hpp"
#include "saepipe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace saepipe {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Stable per-sample cross-entropy: max(z,0) - y*z + log1p(exp(-|z|)).
double xent(double z, int y) {
    return std::max(z, 0.0) - static_cast<double>(y) * z + std::log1p(std::exp(-std::abs(z)));
}

void margins(const Matrix& x, std::span<const double> w, double b, std::vector<double>& z) {
    z.assign(x.rows, b);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.data.data() + i * x.cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) acc += row[j] * w[j];
        z[i] += acc;
    }
}

} // namespace

Matrix standardize_columns(const Matrix& x, std::vector<double>& means, std::vector<double>& stds) {
    means.assign(x.cols, 0.0);
    stds.assign(x.cols, 0.0);
    const double n = static_cast<double>(x.rows);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) sum += x(i, j);
        means[j] = sum / n;
        double ss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double d = x(i, j) - means[j];
            ss += d * d;
        }
        stds[j] = std::sqrt(ss / n);
    }
    Matrix out(x.rows, x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        const double s = stds[j];
        for (std::size_t i = 0; i < x.rows; ++i)
            out(i, j) = s > 0.0 ? (x(i, j) - means[j]) / s : 0.0;
    }
    return out;
}

double logistic_loss(const Matrix& x_std, std::span<const int> y, std::span<const double> w,
                     double b, double lambda) {
    std::vector<double> z;
    margins(x_std, w, b, z);
    double loss = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) loss += xent(z[i], y[i]);
    loss /= static_cast<double>(z.size());
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    return loss + 0.5 * lambda * w2;
}

void logistic_gradient(const Matrix& x_std, std::span<const int> y, std::span<const double> w,
                       double b, double lambda, std::span<double> grad_w, double& grad_b) {
    std::vector<double> z;
    margins(x_std, w, b, z);
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    const double inv_n = 1.0 / static_cast<double>(x_std.rows);
    for (std::size_t i = 0; i < x_std.rows; ++i) {
        const double err = sigmoid(z[i]) - static_cast<double>(y[i]);
        grad_b += err;
        const double* row = x_std.data.data() + i * x_std.cols;
        for (std::size_t j = 0; j < x_std.cols; ++j) grad_w[j] += err * row[j];
    }
    grad_b *= inv_n;
    for (std::size_t j = 0; j < x_std.cols; ++j) grad_w[j] = grad_w[j] * inv_n + lambda * w[j];
}

TrainedLinearModel train_logistic(const Matrix& x, std::span<const int> y, double lambda,
                                  std::vector<std::uint32_t> feature_indices) {
    if (x.rows != y.size())
        throw shape_error("train_logistic: matrix has " + std::to_string(x.rows) + " rows but " +
                          std::to_string(y.size()) + " labels");
    if (x.cols < 1) throw value_error("train_logistic: need at least one feature");
    if (!(lambda >= 0.0)) throw value_error("train_logistic: lambda must be non-negative");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v != 0 && v != 1) throw value_error("train_logistic: labels must be 0 or 1");
        (v == 1 ? has1 : has0) = true;
    }
    if (!has0 || !has1)
        throw class_degenerate_error("train_logistic: labels contain a single class");

    if (feature_indices.empty()) {
        feature_indices.resize(x.cols);
        std::iota(feature_indices.begin(), feature_indices.end(), 0u);
    } else if (feature_indices.size() != x.cols) {
        throw shape_error("train_logistic: feature_indices size " +
                          std::to_string(feature_indices.size()) + " != column count " +
                          std::to_string(x.cols));
    }

    TrainedLinearModel model;
    model.feature_indices = std::move(feature_indices);
    model.lambda = lambda;
    const Matrix xs = standardize_columns(x, model.feature_means, model.feature_stds);

    const std::size_t k = x.cols;
    std::vector<double> w(k, 0.0), grad_w(k, 0.0), w_try(k);
    double b = 0.0, grad_b = 0.0;
    double step = 1.0;
    constexpr int kMaxIter = 10000;
    constexpr double kGradTol = 1e-8;
    constexpr double kArmijo = 1e-4;

    double loss = logistic_loss(xs, y, w, b, lambda);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        logistic_gradient(xs, y, w, b, lambda, grad_w, grad_b);
        double g2 = grad_b * grad_b;
        for (double g : grad_w) g2 += g * g;
        if (std::sqrt(g2) <= kGradTol) break;

        step = std::min(step * 2.0, 1e6);
        double b_try = 0.0, loss_try = 0.0;
        while (true) {
            for (std::size_t j = 0; j < k; ++j) w_try[j] = w[j] - step * grad_w[j];
            b_try = b - step * grad_b;
            loss_try = logistic_loss(xs, y, w_try, b_try, lambda);
            if (loss_try <= loss - kArmijo * step * g2) break;
            step *= 0.5;
            if (step < 1e-20) break; // flat to machine precision
        }
        if (step < 1e-20) break;
        w.swap(w_try);
        b = b_try;
        loss = loss_try;
    }

    model.weights = std::move(w);
    model.bias = b;
    return model;
}

double predict_proba_selected(const TrainedLinearModel& model, std::span<const double> x) {
    if (x.size() != model.k())
        throw shape_error("predict: input has " + std::to_string(x.size()) +
                          " values, model expects k=" + std::to_string(model.k()));
    double z = model.bias;
    for (std::size_t j = 0; j < model.k(); ++j) {
        const double s = model.feature_stds[j];
        const double v = s > 0.0 ? (x[j] - model.feature_means[j]) / s : 0.0;
        z += model.weights[j] * v;
    }
    return sigmoid(z);
}

double predict_proba_full(const TrainedLinearModel& model, std::span<const double> x,
                          std::size_t full_width) {
    if (x.size() != full_width)
        throw shape_error("predict: input has " + std::to_string(x.size()) +
                          " values, expected full width " + std::to_string(full_width));
    std::vector<double> projected(model.k());
    for (std::size_t j = 0; j < model.k(); ++j) {
        const std::uint32_t idx = model.feature_indices[j];
        if (idx >= full_width)
            throw shape_error("predict: model index " + std::to_string(idx) +
                              " out of range for width " + std::to_string(full_width));
        projected[j] = x[idx];
    }
    return predict_proba_selected(model, projected);
}

std::vector<double> predict_proba_full(const TrainedLinearModel& model, const Matrix& x) {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) out[i] = predict_proba_full(model, x.row(i), x.cols);
    return out;
}

GridSearchResult grid_search(const Matrix& train_x, std::span<const int> train_y,
                             const Matrix& val_x, std::span<const int> val_y,
                             std::span<const double> lambda_grid,
                             std::vector<std::uint32_t> feature_indices) {
    if (lambda_grid.empty()) throw value_error("grid_search: lambda grid must be non-empty");
    if (val_x.cols != train_x.cols)
        throw shape_error("grid_search: train and val column counts differ");

    GridSearchResult result;
    bool found = false;
    double best_auc = -1.0;
    for (double lambda : lambda_grid) {
        GridPoint point;
        point.lambda = lambda;
        try {
            TrainedLinearModel model = train_logistic(train_x, train_y, lambda, feature_indices);
            std::vector<double> probs(val_x.rows);
            for (std::size_t i = 0; i < val_x.rows; ++i)
                probs[i] = predict_proba_selected(model, val_x.row(i));
            const auto auc = rank_auc(probs, val_y);
            if (!auc) throw class_degenerate_error("validation AUC undefined (single class)");
            point.val_auc = *auc;
            point.ok = true;
            if (!found || point.val_auc > best_auc ||
                (point.val_auc == best_auc && lambda > result.lambda)) {
                best_auc = point.val_auc;
                result.lambda = lambda;
                result.model = std::move(model);
                found = true;
            }
        } catch (const error& e) {
            point.note = e.what();
        }
        result.points.push_back(std::move(point));
    }
    if (!found) throw error("grid_search: every lambda grid point failed");
    return result;
}

std::vector<double> default_lambda_grid() {
    return {1.0 / 0.0001, 1.0 / 0.001, 1.0 / 0.01, 1.0 / 0.1, 1.0 / 1.0};
}

void save_linear(const TrainedLinearModel& model, const std::filesystem::path& path) {
    BinWriter out(path);
    out.magic("LIN1");
    out.u16(kLinVersion);
    out.u32(static_cast<std::uint32_t>(model.k()));
    for (std::uint32_t idx : model.feature_indices) out.u32(idx);
    for (double v : model.feature_means) out.f64(v);
    for (double v : model.feature_stds) out.f64(v);
    for (double v : model.weights) out.f64(v);
    out.f64(model.bias);
    out.f64(model.lambda);
    out.close();
}

TrainedLinearModel load_linear(const std::filesystem::path& path) {
    BinReader in(path);
    in.expect_magic("LIN1", "LIN1 model");
    const std::uint16_t version = in.u16();
    if (version != kLinVersion)
        throw format_error("'" + in.path() + "': unsupported LIN1 version " + std::to_string(version));
    TrainedLinearModel model;
    const std::uint32_t k = in.u32();
    model.feature_indices.resize(k);
    for (auto& v : model.feature_indices) v = in.u32();
    model.feature_means.resize(k);
    for (auto& v : model.feature_means) v = in.f64();
    model.feature_stds.resize(k);
    for (auto& v : model.feature_stds) v = in.f64();
    model.weights.resize(k);
    for (auto& v : model.weights) v = in.f64();
    model.bias = in.f64();
    model.lambda = in.f64();
    return model;
}

} // namespace saepipe
