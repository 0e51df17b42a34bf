#pragma once

#include "saepipe/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace saepipe {

// L2-regularized logistic model over a selected feature subset.
// Features are standardized with training-split statistics before
// optimization; a constant column keeps weight 0 and standardizes to 0.
struct TrainedLinearModel {
    std::vector<std::uint32_t> feature_indices; // ascending, size k
    std::vector<double> weights;                // size k
    double bias = 0.0;
    double lambda = 0.0;
    std::vector<double> feature_means; // size k
    std::vector<double> feature_stds;  // size k; 0 flags a constant column

    std::size_t k() const { return weights.size(); }
};

// Minimizes mean cross-entropy + (lambda/2)*||w||^2 (bias unpenalized) by
// full-batch gradient descent with backtracking line search from zero
// init, stopping at gradient norm <= 1e-8 or 10,000 iterations.
// `x` holds the already-projected (but unstandardized) columns; pass
// feature_indices so the model remembers which columns of the full-width
// vector it consumes (defaults to 0..k-1).
TrainedLinearModel train_logistic(const Matrix& x, std::span<const int> y, double lambda,
                                  std::vector<std::uint32_t> feature_indices = {});

// Loss/gradient of the training objective at (w, b) on standardized
// features; exposed for verification.
double logistic_loss(const Matrix& x_std, std::span<const int> y, std::span<const double> w,
                     double b, double lambda);
void logistic_gradient(const Matrix& x_std, std::span<const int> y, std::span<const double> w,
                       double b, double lambda, std::span<double> grad_w, double& grad_b);

// Standardization transform the trainer applied (means/stds with the
// population 1/n convention; constant columns map to 0).
Matrix standardize_columns(const Matrix& x, std::vector<double>& means, std::vector<double>& stds);

// Probability for a full-width vector: the model projects to its
// feature_indices internally.
double predict_proba_full(const TrainedLinearModel& model, std::span<const double> x,
                          std::size_t full_width);
// Probability for an already-projected k-vector.
double predict_proba_selected(const TrainedLinearModel& model, std::span<const double> x);

std::vector<double> predict_proba_full(const TrainedLinearModel& model, const Matrix& x);

// Grid search over lambda: trains one model per grid point, scores
// validation AUC, returns the argmax (ties toward larger lambda). Grid
// points whose training fails are skipped with a note; all failing is an
// error.
struct GridPoint {
    double lambda = 0.0;
    double val_auc = 0.0;
    bool ok = false;
    std::string note;
};

struct GridSearchResult {
    double lambda = 0.0;
    TrainedLinearModel model;
    std::vector<GridPoint> points;
};

GridSearchResult grid_search(const Matrix& train_x, std::span<const int> train_y,
                             const Matrix& val_x, std::span<const int> val_y,
                             std::span<const double> lambda_grid,
                             std::vector<std::uint32_t> feature_indices = {});

// lambda = 1/C over the standard C grid {1e-4, 1e-3, 1e-2, 1e-1, 1}.
std::vector<double> default_lambda_grid();

// --- LIN1 model file ------------------------------------------------------
//
//   magic "LIN1" | version u16 (=1) | k u32 | k x index u32 | k x mean f64
//   | k x std f64 | k x weight f64 | bias f64 | lambda f64

inline constexpr std::uint16_t kLinVersion = 1;

void save_linear(const TrainedLinearModel& model, const std::filesystem::path& path);
TrainedLinearModel load_linear(const std::filesystem::path& path);

} // namespace saepipe
