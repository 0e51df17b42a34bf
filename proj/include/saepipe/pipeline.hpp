#pragma once

#include "saepipe/featsel.hpp"
#include "saepipe/gbdt.hpp"
#include "saepipe/labeling.hpp"
#include "saepipe/linmodel.hpp"
#include "saepipe/metrics.hpp"
#include "saepipe/pooling.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace saepipe {

enum class ClassifierKind { logistic, gbdt };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_from_string(const std::string& name);

// Everything the end-to-end run needs. Exactly one of `activations`
// (token-level SAEF, pooled on the fly) or `pooled` (SAEP2) must be set.
struct PipelineConfig {
    std::filesystem::path activations;
    std::filesystem::path pooled;
    std::filesystem::path earnings; // CSV, joined to documents by doc_id
    std::filesystem::path out_dir;  // artifacts land here

    std::size_t token_cap = kDefaultTokenCap;
    double delta = kDefaultSurpriseDelta;
    SplitSpec split; // chronological cutoffs

    SelectionMethod method = SelectionMethod::ftest;
    std::uint32_t k = 50;
    bool no_selection = false; // classifier sees all m dimensions

    ClassifierKind classifier = ClassifierKind::logistic;
    std::vector<double> lambda_grid = default_lambda_grid();
    GbdtConfig gbdt; // used both for tree-importance selection and the gbdt classifier

    double threshold = 0.5;
};

// Join of earnings onto pooled documents. Documents whose SUE falls inside
// the discard band, and documents with no earnings row, are dropped;
// malformed earnings rows (too few estimates, zero dispersion) throw.
struct LabelSummary {
    std::size_t n_docs = 0; // documents in
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t n_discarded = 0;
    std::size_t n_unmatched = 0;
};

LabelSummary attach_labels(std::vector<DocumentVector>& docs,
                           const std::vector<EarningsRecord>& records, double delta);

// Dense design matrix + label vector from labeled documents (throws if any
// label is unset).
std::pair<Matrix, std::vector<int>> to_matrix(const std::vector<DocumentVector>& docs);

// Labeled + chronologically split corpus, ready for fitting.
struct PreparedData {
    SplitResult split;
    LabelSummary labels;
    Matrix train_x, val_x, test_x;
    std::vector<int> train_y, val_y, test_y;
    std::size_t m = 0;
    std::vector<std::string> warnings;
};

PreparedData prepare_data(const PipelineConfig& cfg);

// One fitted configuration: selection statistics come from the training
// split only, hyperparameters from the validation split, the report from
// the test split.
struct FitOutcome {
    std::optional<FeatureRanking> ranking; // absent when no_selection
    std::vector<std::uint32_t> selected;   // ascending; 0..m-1 when no_selection
    std::optional<TrainedLinearModel> linear;
    std::optional<GbdtModel> boosted;
    std::optional<double> lambda;  // logistic only
    std::optional<double> val_auc; // final model scored on the validation split
    EvalReport test_report;
};

FitOutcome fit_and_eval(const PreparedData& data, const PipelineConfig& cfg);

// prepare_data + fit_and_eval + artifact files in cfg.out_dir:
// ranking.csv (when selecting), model.lin1 / model.gbt1, report.txt, and
// roc.csv (when the test split has both classes). Two runs with the same
// config produce byte-identical artifacts.
struct RunArtifacts {
    FitOutcome fit;
    std::size_t n_train = 0, n_val = 0, n_test = 0;
    std::vector<std::string> warnings;
    std::filesystem::path report_path, model_path, ranking_path, roc_path;
    std::string report_text;
};

RunArtifacts run_pipeline(const PipelineConfig& cfg);

// Cartesian sweep over (method, k); the corpus is prepared once. A row
// that fails keeps its error note and the sweep continues.
struct SweepRow {
    SelectionMethod method = SelectionMethod::ftest;
    std::uint32_t k = 0;
    bool ok = false;
    std::string note;
    EvalReport report;
    std::optional<double> val_auc;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

SweepResult run_sweep(const PipelineConfig& base, const std::vector<SelectionMethod>& methods,
                      const std::vector<std::uint32_t>& k_grid);

// CSV with header method,k,accuracy,weighted_f1,auc,val_auc,status.
// Metric fields are empty on failed rows; status is "ok" or the error note.
void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

} // namespace saepipe
