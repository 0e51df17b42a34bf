#include "saepipe/pipeline.hpp"

#include "saepipe/errors.hpp"

#include <cstdio>
#include <fstream>
#include <unordered_map>
#include <utility>

namespace saepipe {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary); // binary: byte-identical across runs
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw io_error("short write to '" + path.string() + "'");
}

std::vector<std::uint32_t> identity_indices(std::size_t m) {
    std::vector<std::uint32_t> all(m);
    for (std::size_t j = 0; j < m; ++j) all[j] = static_cast<std::uint32_t>(j);
    return all;
}

} // namespace

std::string to_string(ClassifierKind kind) {
    return kind == ClassifierKind::logistic ? "logistic" : "gbdt";
}

ClassifierKind classifier_from_string(const std::string& name) {
    if (name == "logistic") return ClassifierKind::logistic;
    if (name == "gbdt") return ClassifierKind::gbdt;
    throw value_error("unknown classifier '" + name + "' (expected logistic or gbdt)");
}

LabelSummary attach_labels(std::vector<DocumentVector>& docs,
                           const std::vector<EarningsRecord>& records, double delta) {
    std::unordered_map<std::string, const EarningsRecord*> by_id;
    by_id.reserve(records.size());
    for (const EarningsRecord& rec : records)
        if (!by_id.emplace(rec.doc_id, &rec).second)
            throw value_error("earnings table lists doc '" + rec.doc_id + "' more than once");

    LabelSummary summary;
    summary.n_docs = docs.size();
    std::vector<DocumentVector> kept;
    kept.reserve(docs.size());
    for (DocumentVector& doc : docs) {
        const auto it = by_id.find(doc.doc_id);
        if (it == by_id.end()) {
            ++summary.n_unmatched;
            continue;
        }
        const Label label = assign_label(compute_sue(*it->second), delta);
        if (label == Label::discarded) {
            ++summary.n_discarded;
            continue;
        }
        doc.label = static_cast<int>(label);
        label == Label::positive ? ++summary.n_pos : ++summary.n_neg;
        kept.push_back(std::move(doc));
    }
    docs = std::move(kept);
    return summary;
}

std::pair<Matrix, std::vector<int>> to_matrix(const std::vector<DocumentVector>& docs) {
    if (docs.empty()) throw value_error("cannot build a design matrix from zero documents");
    const std::size_t m = docs[0].values.size();
    Matrix x(docs.size(), m);
    std::vector<int> y(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].values.size() != m)
            throw shape_error("doc '" + docs[i].doc_id + "' has " +
                              std::to_string(docs[i].values.size()) + " values, expected " +
                              std::to_string(m));
        if (!docs[i].label)
            throw value_error("doc '" + docs[i].doc_id + "' has no label; run the labeling stage first");
        std::copy(docs[i].values.begin(), docs[i].values.end(), x.row(i).begin());
        y[i] = *docs[i].label;
    }
    return {std::move(x), std::move(y)};
}

PreparedData prepare_data(const PipelineConfig& cfg) {
    const bool have_acts = !cfg.activations.empty();
    const bool have_pooled = !cfg.pooled.empty();
    if (have_acts == have_pooled)
        throw value_error("exactly one of the activations (SAEF) and pooled (SAEP2) inputs must be given");
    if (cfg.earnings.empty()) throw value_error("an earnings CSV is required");

    std::vector<DocumentVector> docs;
    if (have_acts) {
        ActivationFileReader reader(cfg.activations);
        while (auto stream = reader.next()) docs.push_back(sum_pool(*stream, cfg.token_cap));
    } else {
        docs = read_pooled_file(cfg.pooled);
    }

    PreparedData data;
    data.labels = attach_labels(docs, read_earnings_table(cfg.earnings), cfg.delta);
    if (docs.empty())
        throw value_error("no labeled documents remain after the earnings join (matched " +
                          std::to_string(data.labels.n_docs - data.labels.n_unmatched) + " of " +
                          std::to_string(data.labels.n_docs) + ", discarded " +
                          std::to_string(data.labels.n_discarded) + " inside the surprise band)");
    data.m = docs[0].values.size();

    data.split = chronological_split(docs, cfg.split);
    data.warnings = data.split.warnings;
    if (data.split.train.empty())
        throw value_error("training split is empty; nothing can be fitted (check the cutoff dates)");

    std::tie(data.train_x, data.train_y) = to_matrix(data.split.train);
    if (!data.split.val.empty()) std::tie(data.val_x, data.val_y) = to_matrix(data.split.val);
    if (!data.split.test.empty()) std::tie(data.test_x, data.test_y) = to_matrix(data.split.test);
    return data;
}

FitOutcome fit_and_eval(const PreparedData& data, const PipelineConfig& cfg) {
    FitOutcome out;

    // Selection statistics come from the training split only.
    if (cfg.no_selection) {
        out.selected = identity_indices(data.m);
    } else {
        if (cfg.k < 1) throw value_error("k must be at least 1");
        std::vector<double> scores =
            cfg.method == SelectionMethod::ftest
                ? f_test_scores(data.train_x, data.train_y)
                : tree_importance_scores(data.train_x, data.train_y, cfg.gbdt);
        SelectionResult sel = rank_and_select(scores, cfg.k, cfg.method);
        out.ranking = std::move(sel.ranking);
        out.selected = std::move(sel.selected);
    }

    const Matrix train_x = project_columns(data.train_x, out.selected);
    const Matrix val_x = data.val_y.empty() ? Matrix{} : project_columns(data.val_x, out.selected);

    std::vector<double> test_scores;
    if (cfg.classifier == ClassifierKind::logistic) {
        if (data.val_y.empty())
            throw value_error("logistic grid search needs a non-empty validation split");
        GridSearchResult grid =
            grid_search(train_x, data.train_y, val_x, data.val_y, cfg.lambda_grid, out.selected);
        out.lambda = grid.lambda;
        out.val_auc = rank_auc(predict_proba_full(grid.model, data.val_x), data.val_y);
        if (!data.test_y.empty()) test_scores = predict_proba_full(grid.model, data.test_x);
        out.linear = std::move(grid.model);
    } else {
        GbdtConfig gcfg = cfg.gbdt;
        const bool use_val = !data.val_y.empty();
        GbdtModel model = train_gbdt(train_x, data.train_y, gcfg, use_val ? &val_x : nullptr,
                                     use_val ? std::span<const int>(data.val_y)
                                             : std::span<const int>{});
        if (use_val) out.val_auc = rank_auc(predict_proba(model, val_x), data.val_y);
        if (!data.test_y.empty())
            test_scores = predict_proba(model, project_columns(data.test_x, out.selected));
        out.boosted = std::move(model);
    }

    if (data.test_y.empty())
        throw value_error("test split is empty; nothing to evaluate (check the cutoff dates)");
    out.test_report = evaluate(test_scores, data.test_y, cfg.threshold);
    return out;
}

RunArtifacts run_pipeline(const PipelineConfig& cfg) {
    if (cfg.out_dir.empty()) throw value_error("an output directory is required");
    std::filesystem::create_directories(cfg.out_dir);

    PreparedData data = prepare_data(cfg);
    RunArtifacts run;
    run.n_train = data.train_y.size();
    run.n_val = data.val_y.size();
    run.n_test = data.test_y.size();
    run.warnings = data.warnings;
    run.fit = fit_and_eval(data, cfg);

    if (run.fit.ranking) {
        run.ranking_path = cfg.out_dir / "ranking.csv";
        write_ranking_csv(*run.fit.ranking, run.ranking_path);
    }
    if (run.fit.linear) {
        run.model_path = cfg.out_dir / "model.lin1";
        save_linear(*run.fit.linear, run.model_path);
    } else {
        run.model_path = cfg.out_dir / "model.gbt1";
        save_gbdt(*run.fit.boosted, run.model_path);
    }

    // The report echoes the knobs that shaped the result, then the metrics.
    std::string text;
    text += "classifier=" + to_string(cfg.classifier) + "\n";
    text += "selection=" + (cfg.no_selection ? std::string("none") : to_string(cfg.method)) + "\n";
    if (!cfg.no_selection) text += "k=" + std::to_string(cfg.k) + "\n";
    if (run.fit.lambda) text += "lambda=" + fmt_double(*run.fit.lambda) + "\n";
    text += "n_train=" + std::to_string(run.n_train) + "\n";
    text += "n_val=" + std::to_string(run.n_val) + "\n";
    text += "n_test=" + std::to_string(run.n_test) + "\n";
    text += "val_auc=" + (run.fit.val_auc ? fmt_double(*run.fit.val_auc) : "undefined") + "\n";
    text += to_kv_text(run.fit.test_report);
    run.report_text = text;
    run.report_path = cfg.out_dir / "report.txt";
    write_text_file(run.report_path, text);

    const bool two_test_classes =
        run.fit.test_report.n_pos > 0 && run.fit.test_report.n_neg > 0;
    if (two_test_classes) {
        std::vector<double> scores;
        if (run.fit.linear) scores = predict_proba_full(*run.fit.linear, data.test_x);
        else scores = predict_proba(*run.fit.boosted, project_columns(data.test_x, run.fit.selected));
        std::string roc = "fpr,tpr\n";
        for (const auto& [fpr, tpr] : roc_points(scores, data.test_y))
            roc += fmt_double(fpr) + "," + fmt_double(tpr) + "\n";
        run.roc_path = cfg.out_dir / "roc.csv";
        write_text_file(run.roc_path, roc);
    }
    return run;
}

SweepResult run_sweep(const PipelineConfig& base, const std::vector<SelectionMethod>& methods,
                      const std::vector<std::uint32_t>& k_grid) {
    if (methods.empty() || k_grid.empty())
        throw value_error("sweep needs at least one method and one k");
    const PreparedData data = prepare_data(base);

    SweepResult sweep;
    for (SelectionMethod method : methods) {
        for (std::uint32_t k : k_grid) {
            SweepRow row;
            row.method = method;
            row.k = k;
            try {
                PipelineConfig cfg = base;
                cfg.method = method;
                cfg.k = k;
                cfg.no_selection = false;
                FitOutcome fit = fit_and_eval(data, cfg);
                row.report = fit.test_report;
                row.val_auc = fit.val_auc;
                row.ok = true;
            } catch (const error& e) {
                row.note = e.what();
            }
            sweep.rows.push_back(std::move(row));
        }
    }
    return sweep;
}

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path) {
    std::string text = "method,k,accuracy,weighted_f1,auc,val_auc,status\n";
    for (const SweepRow& row : sweep.rows) {
        text += to_string(row.method) + "," + std::to_string(row.k) + ",";
        if (row.ok) {
            text += fmt_double(row.report.accuracy) + "," + fmt_double(row.report.weighted_f1) + ",";
            text += (row.report.roc_auc ? fmt_double(*row.report.roc_auc) : "undefined") + ",";
            text += (row.val_auc ? fmt_double(*row.val_auc) : "undefined") + ",ok\n";
        } else {
            std::string note = row.note;
            for (char& c : note)
                if (c == ',' || c == '\n') c = ';'; // keep the row a single CSV record
            text += ",,,," + note + "\n";
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw io_error("short write to '" + path.string() + "'");
}

} // namespace saepipe
