// saepipe: earnings-surprise classification over pooled sparse-autoencoder
// activations, exposed as composable subcommands that talk through files.
//
// Exit codes: 0 success, 1 usage error, 2 data/format error.

#include "saepipe/actstore.hpp"
#include "saepipe/errors.hpp"
#include "saepipe/pipeline.hpp"
#include "saepipe/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace saepipe;

const std::map<std::string, SelectionMethod> kMethodNames{
    {"ftest", SelectionMethod::ftest}, {"tree", SelectionMethod::tree}};
const std::map<std::string, ClassifierKind> kClassifierNames{
    {"logistic", ClassifierKind::logistic}, {"gbdt", ClassifierKind::gbdt}};

const CLI::Validator kIsoDate(
    [](std::string& s) -> std::string {
        try {
            Date::from_iso(s);
            return {};
        } catch (const parse_error& e) {
            return std::string(e.what());
        }
    },
    "DATE(YYYY-MM-DD)");

// Boosting knobs shared by select/train/run/sweep.
struct GbdtOpts {
    std::uint32_t rounds = 200;
    double learning_rate = 0.1;
    std::uint32_t max_depth = 6;
    double subsample = 1.0;
    std::uint32_t min_samples_leaf = 1;
    std::uint64_t seed = 42;
    std::optional<std::uint32_t> patience;

    GbdtConfig to_config() const {
        GbdtConfig cfg;
        cfg.n_rounds = rounds;
        cfg.learning_rate = learning_rate;
        cfg.max_depth = max_depth;
        cfg.subsample = subsample;
        cfg.min_samples_leaf = min_samples_leaf;
        cfg.seed = seed;
        cfg.early_stop_patience = patience;
        return cfg;
    }
};

void add_gbdt_flags(CLI::App* cmd, GbdtOpts& g) {
    cmd->add_option("--rounds", g.rounds, "boosting rounds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--learning-rate", g.learning_rate, "shrinkage per round")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-depth", g.max_depth, "maximum tree depth")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--subsample", g.subsample, "row fraction per round, (0,1]")
        ->check(CLI::Range(1e-9, 1.0))
        ->capture_default_str();
    cmd->add_option("--min-samples-leaf", g.min_samples_leaf, "minimum rows per leaf")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", g.seed, "subsampling seed")->capture_default_str();
    cmd->add_option("--patience", g.patience,
                    "early-stop after this many rounds without validation-AUC improvement");
}

// CLI11 only reads a config file registered on the app it parses at the top
// level; a subcommand's own set_config is never processed. Do the equivalent
// by hand: parse the file and fill in every option the command line left
// unset, so explicit flags always win.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    for (const CLI::ConfigItem& item : CLI::ConfigTOML{}.from_file(path)) {
        if (!item.parents.empty()) throw CLI::ConfigError::Extras(item.fullname());
        if (item.name == "config") continue;
        CLI::Option* op = cmd.get_option_no_throw("--" + item.name);
        if (op == nullptr && item.name.size() == 1) op = cmd.get_option_no_throw("-" + item.name);
        if (op == nullptr) op = cmd.get_option_no_throw(item.name);
        if (op == nullptr) throw CLI::ConfigError::Extras(item.fullname());
        if (!op->empty()) continue; // given explicitly
        if (op->get_expected_min() == 0 && item.inputs.size() <= 1) {
            op->add_result(op->get_flag_value(item.name, CLI::ConfigTOML{}.to_flag(item)));
        } else {
            op->add_result(item.inputs);
        }
    }
}

CLI::App* make_sub(CLI::App& app, const std::string& name, const std::string& help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option_function<std::string>(
        "--config", [cmd](const std::string& path) { apply_config_file(*cmd, path); },
        "key=value file; explicit flags override its entries");
    return cmd;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Top-k of a persisted ranking, as ascending indices (same tie-break as the
// selection stage, recomputed from the stored scores).
std::vector<std::uint32_t> selected_from_ranking(const FeatureRanking& ranking, std::uint32_t k) {
    return rank_and_select(ranking.scores, k, ranking.method).selected;
}

std::pair<Matrix, std::vector<int>> load_labeled_matrix(const std::string& path) {
    return to_matrix(read_pooled_file(path));
}

// --- subcommand wiring ----------------------------------------------------

void setup_synth(CLI::App& app) {
    struct Opts {
        std::string out_dir;
        SynthConfig cfg;
        std::string date_start = "2012-01-01";
        std::string date_end = "2014-12-31";
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "synth",
                             "generate a synthetic corpus with planted discriminative dimensions");
    cmd->add_option("--out-dir", opts->out_dir, "directory for activations.saef / earnings.csv")
        ->required();
    cmd->add_option("--n-docs", opts->cfg.n_docs, "documents to generate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--m", opts->cfg.m, "latent width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--n-informative", opts->cfg.n_informative, "planted discriminative dimensions")
        ->capture_default_str();
    cmd->add_option("--tokens-min", opts->cfg.tokens_min, "minimum tokens per document")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tokens-max", opts->cfg.tokens_max, "maximum tokens per document")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--signal", opts->cfg.signal_strength, "shift added on planted dims (positive class)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--noise-rate", opts->cfg.noise_activation_rate, "per-(token,dim) activation rate")
        ->capture_default_str();
    cmd->add_option("--seed", opts->cfg.seed, "generator seed")->capture_default_str();
    cmd->add_option("--date-start", opts->date_start, "first possible document date")
        ->check(kIsoDate)
        ->capture_default_str();
    cmd->add_option("--date-end", opts->date_end, "last possible document date")
        ->check(kIsoDate)
        ->capture_default_str();

    cmd->callback([opts] {
        opts->cfg.date_start = Date::from_iso(opts->date_start);
        opts->cfg.date_end = Date::from_iso(opts->date_end);
        validate_config(opts->cfg);
        std::filesystem::create_directories(opts->out_dir);
        const std::filesystem::path dir = opts->out_dir;

        auto [streams, records] = generate_corpus(opts->cfg);
        write_activation_file(streams, dir / "activations.saef");
        write_earnings_table(records, dir / "earnings.csv");
        std::ofstream planted(dir / "planted.txt", std::ios::binary);
        for (std::uint32_t j : planted_indices(opts->cfg)) planted << j << "\n";
        if (!planted) throw io_error("cannot write " + (dir / "planted.txt").string());

        std::printf("wrote %s (%u docs, m=%u)\n", (dir / "activations.saef").c_str(),
                    opts->cfg.n_docs, opts->cfg.m);
        std::printf("wrote %s (%zu records)\n", (dir / "earnings.csv").c_str(), records.size());
        std::printf("wrote %s (%u planted dimensions)\n", (dir / "planted.txt").c_str(),
                    opts->cfg.n_informative);
    });
}

void setup_pool(CLI::App& app) {
    struct Opts {
        std::string activations, out;
        std::size_t token_cap = kDefaultTokenCap;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "pool", "sum-pool token activations into document vectors");
    cmd->add_option("--activations", opts->activations, "input SAEF file")->required();
    cmd->add_option("--out", opts->out, "output SAEP2 file")->required();
    cmd->add_option("--token-cap", opts->token_cap, "pool at most this many leading tokens")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    cmd->callback([opts] {
        const PoolSummary s = pool_file(opts->activations, opts->out, opts->token_cap);
        std::printf("pooled %u documents (m=%u) -> %s\n", s.doc_count, s.n_features,
                    opts->out.c_str());
        std::printf("tokens: total=%llu min=%u max=%u mean=%.6g\n",
                    static_cast<unsigned long long>(s.total_tokens), s.min_tokens, s.max_tokens,
                    s.mean_tokens);
    });
}

void setup_label(CLI::App& app) {
    struct Opts {
        std::string pooled, earnings, out;
        double delta = kDefaultSurpriseDelta;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "label",
                             "join earnings onto pooled documents and keep the labeled ones");
    cmd->add_option("--pooled", opts->pooled, "input SAEP2 file")->required();
    cmd->add_option("--earnings", opts->earnings, "earnings CSV")->required();
    cmd->add_option("--out", opts->out, "output SAEP2 file (labeled documents only)")->required();
    cmd->add_option("--delta", opts->delta, "surprise threshold; |SUE| < delta is discarded")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    cmd->callback([opts] {
        std::vector<DocumentVector> docs = read_pooled_file(opts->pooled);
        const LabelSummary s = attach_labels(docs, read_earnings_table(opts->earnings), opts->delta);
        write_pooled_file(docs, opts->out);
        std::printf("labeled %zu of %zu documents -> %s (pos=%zu neg=%zu)\n",
                    s.n_pos + s.n_neg, s.n_docs, opts->out.c_str(), s.n_pos, s.n_neg);
        std::printf("discarded inside the surprise band: %zu; without an earnings row: %zu\n",
                    s.n_discarded, s.n_unmatched);
    });
}

void setup_split(CLI::App& app) {
    struct Opts {
        std::string pooled, out_dir, train_end, val_end;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "split", "partition a pooled corpus chronologically");
    cmd->add_option("--pooled", opts->pooled, "input SAEP2 file")->required();
    cmd->add_option("--out-dir", opts->out_dir, "directory for train/val/test.saep2")->required();
    cmd->add_option("--train-end", opts->train_end, "last training date (inclusive)")
        ->required()
        ->check(kIsoDate);
    cmd->add_option("--val-end", opts->val_end, "last validation date (inclusive)")
        ->required()
        ->check(kIsoDate);

    cmd->callback([opts] {
        const SplitSpec spec{Date::from_iso(opts->train_end), Date::from_iso(opts->val_end)};
        const SplitResult split = chronological_split(read_pooled_file(opts->pooled), spec);
        std::filesystem::create_directories(opts->out_dir);
        const std::filesystem::path dir = opts->out_dir;
        write_pooled_file(split.train, dir / "train.saep2");
        write_pooled_file(split.val, dir / "val.saep2");
        write_pooled_file(split.test, dir / "test.saep2");
        for (const std::string& w : split.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        std::printf("train=%zu val=%zu test=%zu -> %s\n", split.train.size(), split.val.size(),
                    split.test.size(), opts->out_dir.c_str());
    });
}

void setup_select(CLI::App& app) {
    struct Opts {
        std::string train, out;
        SelectionMethod method = SelectionMethod::ftest;
        GbdtOpts gbdt;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "select",
                             "score and rank every dimension on the training split");
    cmd->add_option("--train", opts->train, "labeled training SAEP2 file")->required();
    cmd->add_option("--out", opts->out, "output ranking CSV")->required();
    cmd->add_option("--method", opts->method, "scoring method")
        ->transform(CLI::CheckedTransformer(kMethodNames, CLI::ignore_case))
        ->capture_default_str();
    add_gbdt_flags(cmd, opts->gbdt);

    cmd->callback([opts] {
        auto [x, y] = load_labeled_matrix(opts->train);
        const std::vector<double> scores = opts->method == SelectionMethod::ftest
                                               ? f_test_scores(x, y)
                                               : tree_importance_scores(x, y, opts->gbdt.to_config());
        const SelectionResult sel = rank_and_select(scores, scores.size(), opts->method);
        write_ranking_csv(sel.ranking, opts->out);
        std::printf("ranked %zu dimensions (method=%s) -> %s\n", scores.size(),
                    to_string(opts->method).c_str(), opts->out.c_str());
    });
}

void setup_train(CLI::App& app) {
    struct Opts {
        std::string train, val, out, ranking;
        std::uint32_t k = 50;
        ClassifierKind classifier = ClassifierKind::logistic;
        std::vector<double> lambda_grid = default_lambda_grid();
        GbdtOpts gbdt;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "train", "fit a classifier on the training split");
    cmd->add_option("--train", opts->train, "labeled training SAEP2 file")->required();
    cmd->add_option("--val", opts->val, "labeled validation SAEP2 file");
    cmd->add_option("--out", opts->out, "output model file (.lin1 / .gbt1)")->required();
    cmd->add_option("--ranking", opts->ranking, "ranking CSV; train on its top k dimensions");
    cmd->add_option("--k", opts->k, "dimensions kept from --ranking")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--classifier", opts->classifier, "model family")
        ->transform(CLI::CheckedTransformer(kClassifierNames, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--lambda-grid", opts->lambda_grid,
                    "L2 strengths for validation grid search (logistic)");
    add_gbdt_flags(cmd, opts->gbdt);

    cmd->callback([opts] {
        auto [train_x, train_y] = load_labeled_matrix(opts->train);
        std::vector<std::uint32_t> selected;
        if (!opts->ranking.empty())
            selected = selected_from_ranking(read_ranking_csv(opts->ranking), opts->k);
        const Matrix train_p =
            selected.empty() ? train_x : project_columns(train_x, selected);

        Matrix val_x;
        std::vector<int> val_y;
        if (!opts->val.empty()) std::tie(val_x, val_y) = load_labeled_matrix(opts->val);
        const Matrix val_p =
            val_y.empty() || selected.empty() ? val_x : project_columns(val_x, selected);

        if (opts->classifier == ClassifierKind::logistic) {
            if (val_y.empty())
                throw value_error("logistic training grid-searches lambda on --val; provide one");
            GridSearchResult grid =
                grid_search(train_p, train_y, val_p, val_y, opts->lambda_grid, selected);
            save_linear(grid.model, opts->out);
            const auto val_auc = rank_auc(predict_proba_full(grid.model, val_x), val_y);
            std::printf("lambda=%s val_auc=%s -> %s\n", fmt17(grid.lambda).c_str(),
                        val_auc ? fmt17(*val_auc).c_str() : "undefined", opts->out.c_str());
        } else {
            const bool use_val = !val_y.empty();
            GbdtModel model =
                train_gbdt(train_p, train_y, opts->gbdt.to_config(), use_val ? &val_p : nullptr,
                           use_val ? std::span<const int>(val_y) : std::span<const int>{});
            save_gbdt(model, opts->out);
            std::string val_note = "undefined";
            if (use_val)
                if (const auto auc = rank_auc(predict_proba(model, val_p), val_y))
                    val_note = fmt17(*auc);
            std::printf("trees=%zu val_auc=%s -> %s\n", model.trees.size(), val_note.c_str(),
                        opts->out.c_str());
        }
    });
}

void setup_eval(CLI::App& app) {
    struct Opts {
        std::string model, data, out_dir, ranking;
        std::uint32_t k = 50;
        double threshold = 0.5;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "eval", "score a labeled corpus with a saved model");
    cmd->add_option("--model", opts->model, "model file (.lin1 / .gbt1)")->required();
    cmd->add_option("--data", opts->data, "labeled SAEP2 file to evaluate")->required();
    cmd->add_option("--out-dir", opts->out_dir, "directory for report.txt / roc.csv")->required();
    cmd->add_option("--ranking", opts->ranking,
                    "ranking CSV a gbt1 model was trained under (projects the data the same way)");
    cmd->add_option("--k", opts->k, "dimensions kept from --ranking")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--threshold", opts->threshold, "positive-class decision threshold")
        ->capture_default_str();

    cmd->callback([opts] {
        std::ifstream probe(opts->model, std::ios::binary);
        char magic[4] = {};
        probe.read(magic, 4);
        if (!probe) throw io_error("cannot read model file '" + opts->model + "'");
        const std::string tag(magic, 4);

        auto [x, y] = load_labeled_matrix(opts->data);
        std::vector<double> scores;
        if (tag == "LIN1") {
            if (!opts->ranking.empty())
                throw CLI::ValidationError(
                    "--ranking applies only to gbt1 models; lin1 models embed their projection");
            scores = predict_proba_full(load_linear(opts->model), x);
        } else if (tag == "GBT1") {
            const GbdtModel model = load_gbdt(opts->model);
            if (!opts->ranking.empty())
                x = project_columns(x, selected_from_ranking(read_ranking_csv(opts->ranking), opts->k));
            scores = predict_proba(model, x);
        } else {
            throw format_error("'" + opts->model + "' is neither a LIN1 nor a GBT1 model file");
        }

        const EvalReport report = evaluate(scores, y, opts->threshold);
        std::filesystem::create_directories(opts->out_dir);
        const std::filesystem::path dir = opts->out_dir;
        const std::string text = to_kv_text(report);
        {
            std::ofstream out(dir / "report.txt", std::ios::binary);
            out << text;
            if (!out) throw io_error("cannot write " + (dir / "report.txt").string());
        }
        if (report.n_pos > 0 && report.n_neg > 0) {
            std::ofstream roc(dir / "roc.csv", std::ios::binary);
            roc << "fpr,tpr\n";
            for (const auto& [fpr, tpr] : roc_points(scores, y))
                roc << fmt17(fpr) << "," << fmt17(tpr) << "\n";
            if (!roc) throw io_error("cannot write " + (dir / "roc.csv").string());
        }
        std::fputs(text.c_str(), stdout);
    });
}

// Options shared by run and sweep (everything PipelineConfig holds).
struct RunOpts {
    std::string activations, pooled, earnings, out_dir;
    std::size_t token_cap = kDefaultTokenCap;
    double delta = kDefaultSurpriseDelta;
    std::string train_end, val_end;
    SelectionMethod method = SelectionMethod::ftest;
    std::uint32_t k = 50;
    bool no_selection = false;
    ClassifierKind classifier = ClassifierKind::logistic;
    std::vector<double> lambda_grid = default_lambda_grid();
    GbdtOpts gbdt;
    double threshold = 0.5;

    PipelineConfig to_config() const {
        PipelineConfig cfg;
        cfg.activations = activations;
        cfg.pooled = pooled;
        cfg.earnings = earnings;
        cfg.out_dir = out_dir;
        cfg.token_cap = token_cap;
        cfg.delta = delta;
        cfg.split = {Date::from_iso(train_end), Date::from_iso(val_end)};
        cfg.method = method;
        cfg.k = k;
        cfg.no_selection = no_selection;
        cfg.classifier = classifier;
        cfg.lambda_grid = lambda_grid;
        cfg.gbdt = gbdt.to_config();
        cfg.threshold = threshold;
        return cfg;
    }
};

void add_run_flags(CLI::App* cmd, RunOpts& o, bool with_selection_point) {
    cmd->add_option("--activations", o.activations, "token-level SAEF input (pooled on the fly)");
    cmd->add_option("--pooled", o.pooled, "pooled SAEP2 input");
    cmd->add_option("--earnings", o.earnings, "earnings CSV")->required();
    cmd->add_option("--out-dir", o.out_dir, "artifact directory")->required();
    cmd->add_option("--token-cap", o.token_cap, "pool at most this many leading tokens")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--delta", o.delta, "surprise threshold; |SUE| < delta is discarded")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--train-end", o.train_end, "last training date (inclusive)")
        ->required()
        ->check(kIsoDate);
    cmd->add_option("--val-end", o.val_end, "last validation date (inclusive)")
        ->required()
        ->check(kIsoDate);
    if (with_selection_point) {
        cmd->add_option("--method", o.method, "selection method")
            ->transform(CLI::CheckedTransformer(kMethodNames, CLI::ignore_case))
            ->capture_default_str();
        cmd->add_option("--k", o.k, "dimensions kept by selection")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_flag("--no-selection", o.no_selection,
                      "skip selection; the classifier sees all dimensions");
    }
    cmd->add_option("--classifier", o.classifier, "model family")
        ->transform(CLI::CheckedTransformer(kClassifierNames, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--lambda-grid", o.lambda_grid,
                    "L2 strengths for validation grid search (logistic)");
    cmd->add_option("--threshold", o.threshold, "positive-class decision threshold")
        ->capture_default_str();
    add_gbdt_flags(cmd, o.gbdt);
}

void setup_run(CLI::App& app) {
    auto opts = std::make_shared<RunOpts>();
    CLI::App* cmd = make_sub(app, "run",
                             "label, split, select, fit and evaluate in one pass");
    add_run_flags(cmd, *opts, /*with_selection_point=*/true);

    cmd->callback([opts] {
        if (opts->activations.empty() == opts->pooled.empty())
            throw CLI::ValidationError("exactly one of --activations and --pooled is required");
        const RunArtifacts run = run_pipeline(opts->to_config());
        for (const std::string& w : run.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        std::fputs(run.report_text.c_str(), stdout);
        std::printf("report: %s\n", run.report_path.c_str());
        std::printf("model: %s\n", run.model_path.c_str());
        if (!run.ranking_path.empty()) std::printf("ranking: %s\n", run.ranking_path.c_str());
        if (!run.roc_path.empty()) std::printf("roc: %s\n", run.roc_path.c_str());
    });
}

void setup_sweep(CLI::App& app) {
    struct Opts {
        RunOpts run;
        std::vector<std::string> methods{"ftest", "tree"};
        std::vector<std::uint32_t> k_grid;
        std::string out;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "sweep", "evaluate every (method, k) combination");
    add_run_flags(cmd, opts->run, /*with_selection_point=*/false);
    cmd->add_option("--methods", opts->methods, "selection methods to sweep")
        ->transform(CLI::IsMember({"ftest", "tree"}, CLI::ignore_case))
        ->capture_default_str();
    cmd->add_option("--k-grid", opts->k_grid, "k values to sweep")->required();
    cmd->add_option("--out", opts->out, "output CSV")->required();

    cmd->callback([opts] {
        if (opts->run.activations.empty() == opts->run.pooled.empty())
            throw CLI::ValidationError("exactly one of --activations and --pooled is required");
        std::vector<SelectionMethod> methods;
        for (const std::string& name : opts->methods)
            methods.push_back(selection_method_from_string(name));
        PipelineConfig cfg = opts->run.to_config();
        cfg.out_dir.clear(); // sweep writes no per-row artifacts
        const SweepResult sweep = run_sweep(cfg, methods, opts->k_grid);
        write_sweep_csv(sweep, opts->out);
        std::ifstream echo(opts->out, std::ios::binary);
        std::fputs(std::string(std::istreambuf_iterator<char>(echo), {}).c_str(), stdout);
        std::printf("sweep: %s (%zu rows)\n", opts->out.c_str(), sweep.rows.size());
    });
}

void setup_top_features(CLI::App& app) {
    struct Opts {
        std::string ranking;
        std::uint32_t k = 10;
    };
    auto opts = std::make_shared<Opts>();
    CLI::App* cmd = make_sub(app, "top-features", "print the best-ranked dimensions");
    cmd->add_option("--ranking", opts->ranking, "ranking CSV")->required();
    cmd->add_option("--k", opts->k, "lines to print")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    cmd->callback([opts] {
        const FeatureRanking ranking = read_ranking_csv(opts->ranking);
        std::uint32_t k = opts->k;
        if (k > ranking.order.size()) {
            std::fprintf(stderr, "warning: k=%u exceeds the %zu ranked dimensions; clamping\n", k,
                         ranking.order.size());
            k = static_cast<std::uint32_t>(ranking.order.size());
        }
        for (std::uint32_t r = 0; r < k; ++r) {
            const std::uint32_t j = ranking.order[r];
            const double score = ranking.scores[j];
            std::printf("%u,%u,%s\n", r + 1, j,
                        std::isinf(score) ? "inf" : fmt17(score).c_str());
        }
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"earnings-surprise pipeline over pooled sparse-autoencoder activations"};
    app.require_subcommand(1);
    setup_synth(app);
    setup_pool(app);
    setup_label(app);
    setup_split(app);
    setup_select(app);
    setup_train(app);
    setup_eval(app);
    setup_run(app);
    setup_sweep(app);
    setup_top_features(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const saepipe::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
