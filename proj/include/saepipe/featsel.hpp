#pragma once

#include "saepipe/gbdt.hpp"
#include "saepipe/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace saepipe {

enum class SelectionMethod { ftest, tree };

std::string to_string(SelectionMethod method);
SelectionMethod selection_method_from_string(const std::string& name);

// Per-dimension class-separation scores plus the induced ordering
// (descending score, ascending index on ties; +inf sorts above all finite).
struct FeatureRanking {
    SelectionMethod method = SelectionMethod::ftest;
    std::vector<double> scores;
    std::vector<std::uint32_t> order; // permutation of 0..m-1
};

// One-way ANOVA F statistic per column over the two label groups.
// Zero within-group variance yields +inf when the group means differ and 0
// when they coincide. Requires at least two members per class.
std::vector<double> f_test_scores(const Matrix& x, std::span<const int> y);

// Trains the boosted ensemble and returns each feature's total split-gain
// share, normalized to sum to 1 (all zeros when no split was ever made).
std::vector<double> tree_importance_scores(const Matrix& x, std::span<const int> y,
                                           const GbdtConfig& cfg);

struct SelectionResult {
    FeatureRanking ranking;
    std::vector<std::uint32_t> selected; // min(k, m) indices, ascending
};

SelectionResult rank_and_select(std::span<const double> scores, std::size_t k,
                                SelectionMethod method);

// CSV persistence, columns: feature_index,score,rank (rank starts at 1).
void write_ranking_csv(const FeatureRanking& ranking, const std::filesystem::path& path);
FeatureRanking read_ranking_csv(const std::filesystem::path& path);

} // namespace saepipe
