#pragma once

#include "saepipe/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace saepipe {

struct GbdtConfig {
    std::uint32_t n_rounds = 200;
    double learning_rate = 0.1;
    std::uint32_t max_depth = 6;
    double subsample = 1.0; // row fraction per round, (0, 1]
    std::optional<std::uint32_t> early_stop_patience; // rounds without val-AUC improvement
    std::uint32_t min_samples_leaf = 1;
    std::uint64_t seed = 42;
};

// Axis-aligned split node; feature == -1 marks a leaf. Rows with
// x[feature] < threshold go left. leaf_value already includes the
// learning rate; gain is the residual-variance reduction of the split.
struct GbdtNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double leaf_value = 0.0;
    double gain = 0.0;
};

struct GbdtTree {
    std::vector<GbdtNode> nodes; // nodes[0] is the root
};

struct GbdtModel {
    std::uint32_t n_features = 0;
    double base_score = 0.0; // log-odds of the training base rate
    std::vector<GbdtTree> trees;
    std::vector<double> importance; // per-feature cumulative split gain
};

// Boosted logistic-loss ensemble: each round fits a regression tree to the
// residuals y - p with exact greedy variance-reduction splits, then sets
// hessian-weighted leaf values with an L2 smoothing of 1.0. When a
// validation set and a patience are both given, training stops once the
// validation AUC has not improved for `patience` rounds and the model is
// truncated to the best round.
GbdtModel train_gbdt(const Matrix& x, std::span<const int> y, const GbdtConfig& cfg,
                     const Matrix* val_x = nullptr, std::span<const int> val_y = {});

double tree_output(const GbdtTree& tree, std::span<const double> row);

// base_score + sum of tree outputs, one value per row.
std::vector<double> predict_margin(const GbdtModel& model, const Matrix& x);
// logistic(margin), in (0,1).
std::vector<double> predict_proba(const GbdtModel& model, const Matrix& x);

// --- GBT1 model file ------------------------------------------------------
//
//   magic "GBT1" | version u16 (=1) | n_features u32 | base_score f64
//   n_trees u32 | per tree: n_nodes u32 | per node:
//     feature i32 | threshold f64 | left i32 | right i32 | leaf f64 | gain f64

inline constexpr std::uint16_t kGbdtVersion = 1;

void save_gbdt(const GbdtModel& model, const std::filesystem::path& path);
GbdtModel load_gbdt(const std::filesystem::path& path);

} // namespace saepipe
