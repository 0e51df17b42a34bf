#include "saepipe/gbdt.hpp"

#include "saepipe/binio.hpp"
#include "saepipe/errors.hpp"
#include "saepipe/metrics.hpp"
#include "saepipe/rng.hpp"

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

void validate_config(const GbdtConfig& cfg) {
    if (cfg.n_rounds < 1) throw value_error("gbdt: n_rounds must be at least 1");
    if (!(cfg.learning_rate > 0.0)) throw value_error("gbdt: learning_rate must be positive");
    if (cfg.max_depth < 1) throw value_error("gbdt: max_depth must be at least 1");
    if (!(cfg.subsample > 0.0 && cfg.subsample <= 1.0))
        throw value_error("gbdt: subsample must be in (0, 1]");
    if (cfg.min_samples_leaf < 1) throw value_error("gbdt: min_samples_leaf must be at least 1");
}

// Grows one regression tree on the residuals, level by level. Split search
// walks each feature's presorted row order once per level and accumulates
// prefix sums per active node, so the chosen split is the exact greedy
// optimum with ties broken toward the lower feature index, then the lower
// threshold (strict > keeps the first candidate seen).
class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<std::vector<std::uint32_t>>& sorted_idx,
                const GbdtConfig& cfg)
        : x_(x), sorted_idx_(sorted_idx), cfg_(cfg), pos_(x.rows, -1) {}

    GbdtTree build(const std::vector<char>& in_sub, std::span<const double> resid,
                   std::span<const double> hess, std::vector<double>& importance) {
        GbdtTree tree;
        std::fill(pos_.begin(), pos_.end(), -1);

        // Root aggregates over the subsample.
        double g = 0.0, h = 0.0;
        std::int64_t n = 0;
        for (std::size_t i = 0; i < x_.rows; ++i) {
            if (!in_sub[i]) continue;
            pos_[i] = 0;
            g += resid[i];
            h += hess[i];
            ++n;
        }
        tree.nodes.push_back({});
        std::vector<std::int32_t> active{0};
        std::vector<double> node_g{g}, node_h{h};
        std::vector<std::int64_t> node_n{n};

        std::vector<std::int32_t> slot_of; // node id -> slot in the level arrays, -1 if inactive
        for (std::uint32_t level = 0; level < cfg_.max_depth && !active.empty(); ++level) {
            const std::size_t n_active = active.size();
            slot_of.assign(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < n_active; ++s) slot_of[active[s]] = static_cast<std::int32_t>(s);

            std::vector<double> best_gain(n_active, 0.0), best_thr(n_active, 0.0);
            std::vector<std::int32_t> best_feat(n_active, -1);

            std::vector<double> run_g(n_active), last_val(n_active);
            std::vector<std::int64_t> run_n(n_active);
            for (std::uint32_t f = 0; f < x_.cols; ++f) {
                std::fill(run_g.begin(), run_g.end(), 0.0);
                std::fill(run_n.begin(), run_n.end(), std::int64_t{0});
                for (const std::uint32_t row : sorted_idx_[f]) {
                    const std::int32_t u = pos_[row];
                    if (u < 0) continue;
                    const std::int32_t s = slot_of[u];
                    if (s < 0) continue;
                    const double v = x_(row, f);
                    if (run_n[s] > 0 && v > last_val[s]) {
                        const std::int64_t nl = run_n[s], nr = node_n[s] - nl;
                        if (nl >= cfg_.min_samples_leaf && nr >= cfg_.min_samples_leaf) {
                            const double gl = run_g[s], gr = node_g[s] - gl;
                            const double gain = gl * gl / static_cast<double>(nl) +
                                                gr * gr / static_cast<double>(nr) -
                                                node_g[s] * node_g[s] / static_cast<double>(node_n[s]);
                            if (gain > best_gain[s]) {
                                best_gain[s] = gain;
                                best_feat[s] = static_cast<std::int32_t>(f);
                                best_thr[s] = 0.5 * (last_val[s] + v);
                            }
                        }
                    }
                    run_g[s] += resid[row];
                    ++run_n[s];
                    last_val[s] = v;
                }
            }

            // Turn winners into splits, everything else into leaves.
            std::vector<std::int32_t> next_active;
            for (std::size_t s = 0; s < n_active; ++s) {
                const std::int32_t u = active[s];
                if (best_feat[s] >= 0 && best_gain[s] > 0.0) {
                    const std::int32_t l = static_cast<std::int32_t>(tree.nodes.size());
                    const std::int32_t r = l + 1;
                    tree.nodes.push_back({});
                    tree.nodes.push_back({});
                    GbdtNode& node = tree.nodes[u];
                    node.feature = best_feat[s];
                    node.threshold = best_thr[s];
                    node.left = l;
                    node.right = r;
                    node.gain = best_gain[s];
                    importance[best_feat[s]] += best_gain[s];
                    next_active.push_back(l);
                    next_active.push_back(r);
                } else {
                    finalize_leaf(tree.nodes[u], node_g[s], node_h[s]);
                }
            }

            // Reassign rows of split nodes and gather child stats.
            node_g.assign(next_active.size(), 0.0);
            node_h.assign(next_active.size(), 0.0);
            node_n.assign(next_active.size(), 0);
            slot_of.assign(tree.nodes.size(), -1);
            for (std::size_t s = 0; s < next_active.size(); ++s)
                slot_of[next_active[s]] = static_cast<std::int32_t>(s);
            for (std::size_t i = 0; i < x_.rows; ++i) {
                const std::int32_t u = pos_[i];
                if (u < 0) continue;
                const GbdtNode& node = tree.nodes[u];
                if (node.feature < 0) {
                    pos_[i] = -1; // row now sits in a finished leaf
                    continue;
                }
                const std::int32_t child = x_(i, node.feature) < node.threshold ? node.left : node.right;
                pos_[i] = child;
                const std::int32_t s = slot_of[child];
                node_g[s] += resid[i];
                node_h[s] += hess[i];
                ++node_n[s];
            }
            active = std::move(next_active);
        }

        // Depth cap reached: whatever is still open becomes a leaf.
        for (std::size_t s = 0; s < active.size(); ++s)
            finalize_leaf(tree.nodes[active[s]], node_g[s], node_h[s]);
        return tree;
    }

private:
    void finalize_leaf(GbdtNode& node, double g, double h) const {
        node.feature = -1;
        node.leaf_value = cfg_.learning_rate * g / (h + 1.0);
    }

    const Matrix& x_;
    const std::vector<std::vector<std::uint32_t>>& sorted_idx_;
    const GbdtConfig& cfg_;
    std::vector<std::int32_t> pos_; // row -> open node id, -1 once leaf'd or out of subsample
};

} // namespace

GbdtModel train_gbdt(const Matrix& x, std::span<const int> y, const GbdtConfig& cfg,
                     const Matrix* val_x, std::span<const int> val_y) {
    validate_config(cfg);
    if (x.rows != y.size())
        throw shape_error("gbdt: feature matrix has " + std::to_string(x.rows) + " rows but " +
                          std::to_string(y.size()) + " labels");
    if (x.rows < 2ull * cfg.min_samples_leaf)
        throw value_error("gbdt: need at least 2*min_samples_leaf rows, got " + std::to_string(x.rows));
    std::size_t n_pos = 0;
    for (int v : y) {
        if (v != 0 && v != 1) throw value_error("gbdt: labels must be 0 or 1");
        n_pos += (v == 1);
    }
    if (n_pos == 0 || n_pos == x.rows)
        throw class_degenerate_error("gbdt: training labels contain a single class");

    const bool early_stop = val_x != nullptr && cfg.early_stop_patience.has_value();
    if (early_stop) {
        if (val_x->cols != x.cols)
            throw shape_error("gbdt: validation matrix has " + std::to_string(val_x->cols) +
                              " columns, expected " + std::to_string(x.cols));
        if (val_x->rows != val_y.size())
            throw shape_error("gbdt: validation rows and labels disagree");
        bool has0 = false, has1 = false;
        for (int v : val_y) (v == 1 ? has1 : has0) = true;
        if (!has0 || !has1)
            throw class_degenerate_error("gbdt: validation labels contain a single class");
    }

    GbdtModel model;
    model.n_features = static_cast<std::uint32_t>(x.cols);
    const double p_base = static_cast<double>(n_pos) / static_cast<double>(x.rows);
    model.base_score = std::log(p_base / (1.0 - p_base));
    model.importance.assign(x.cols, 0.0);

    // Presort each feature once (value ascending, row index as tiebreak).
    std::vector<std::vector<std::uint32_t>> sorted_idx(x.cols);
    for (std::size_t f = 0; f < x.cols; ++f) {
        auto& idx = sorted_idx[f];
        idx.resize(x.rows);
        std::iota(idx.begin(), idx.end(), 0u);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }

    std::vector<double> margin(x.rows, model.base_score);
    std::vector<double> val_margin;
    if (early_stop) val_margin.assign(val_x->rows, model.base_score);

    std::vector<double> resid(x.rows), hess(x.rows);
    std::vector<char> in_sub(x.rows, 1);
    TreeBuilder builder(x, sorted_idx, cfg);

    double best_auc = -1.0;
    std::uint32_t best_round = 0;
    for (std::uint32_t round = 0; round < cfg.n_rounds; ++round) {
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double p = sigmoid(margin[i]);
            resid[i] = static_cast<double>(y[i]) - p;
            hess[i] = p * (1.0 - p);
        }

        if (cfg.subsample < 1.0) {
            std::size_t selected = 0;
            for (std::size_t i = 0; i < x.rows; ++i) {
                in_sub[i] = counter_uniform(cfg.seed, stream_id(RngStream::subsample), round, i) <
                            cfg.subsample;
                selected += in_sub[i];
            }
            // A too-small draw cannot host a split; fall back to all rows.
            if (selected < std::max<std::size_t>(2ull * cfg.min_samples_leaf, 2))
                std::fill(in_sub.begin(), in_sub.end(), char{1});
        }

        model.trees.push_back(builder.build(in_sub, resid, hess, model.importance));
        const GbdtTree& tree = model.trees.back();
        for (std::size_t i = 0; i < x.rows; ++i) margin[i] += tree_output(tree, x.row(i));

        if (early_stop) {
            for (std::size_t i = 0; i < val_x->rows; ++i)
                val_margin[i] += tree_output(tree, val_x->row(i));
            const auto auc = rank_auc(val_margin, val_y);
            if (auc && *auc > best_auc) {
                best_auc = *auc;
                best_round = round;
            }
            if (round - best_round >= *cfg.early_stop_patience) break;
        }
    }

    if (early_stop && model.trees.size() > best_round + 1) {
        model.trees.resize(best_round + 1);
        std::fill(model.importance.begin(), model.importance.end(), 0.0);
        for (const GbdtTree& tree : model.trees)
            for (const GbdtNode& node : tree.nodes)
                if (node.feature >= 0) model.importance[node.feature] += node.gain;
    }
    return model;
}

double tree_output(const GbdtTree& tree, std::span<const double> row) {
    const GbdtNode* node = &tree.nodes[0];
    while (node->feature >= 0)
        node = &tree.nodes[row[node->feature] < node->threshold ? node->left : node->right];
    return node->leaf_value;
}

std::vector<double> predict_margin(const GbdtModel& model, const Matrix& x) {
    if (x.cols != model.n_features)
        throw shape_error("gbdt: input has " + std::to_string(x.cols) + " columns, model expects " +
                          std::to_string(model.n_features));
    std::vector<double> out(x.rows, model.base_score);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (const GbdtTree& tree : model.trees) out[i] += tree_output(tree, x.row(i));
    return out;
}

std::vector<double> predict_proba(const GbdtModel& model, const Matrix& x) {
    std::vector<double> out = predict_margin(model, x);
    for (double& v : out) v = sigmoid(v);
    return out;
}

void save_gbdt(const GbdtModel& model, const std::filesystem::path& path) {
    BinWriter out(path);
    out.magic("GBT1");
    out.u16(kGbdtVersion);
    out.u32(model.n_features);
    out.f64(model.base_score);
    out.u32(static_cast<std::uint32_t>(model.trees.size()));
    for (const GbdtTree& tree : model.trees) {
        out.u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const GbdtNode& node : tree.nodes) {
            out.i32(node.feature);
            out.f64(node.threshold);
            out.i32(node.left);
            out.i32(node.right);
            out.f64(node.leaf_value);
            out.f64(node.gain);
        }
    }
    out.close();
}

GbdtModel load_gbdt(const std::filesystem::path& path) {
    BinReader in(path);
    in.expect_magic("GBT1", "GBT1 model");
    const std::uint16_t version = in.u16();
    if (version != kGbdtVersion)
        throw format_error("'" + in.path() + "': unsupported GBT1 version " + std::to_string(version));
    GbdtModel model;
    model.n_features = in.u32();
    model.base_score = in.f64();
    const std::uint32_t n_trees = in.u32();
    model.trees.resize(n_trees);
    model.importance.assign(model.n_features, 0.0);
    for (GbdtTree& tree : model.trees) {
        const std::uint32_t n_nodes = in.u32();
        tree.nodes.resize(n_nodes);
        for (GbdtNode& node : tree.nodes) {
            node.feature = in.i32();
            node.threshold = in.f64();
            node.left = in.i32();
            node.right = in.i32();
            node.leaf_value = in.f64();
            node.gain = in.f64();
            if (node.feature >= 0) {
                if (static_cast<std::uint32_t>(node.feature) >= model.n_features ||
                    node.left < 0 || node.right < 0 ||
                    static_cast<std::uint32_t>(node.left) >= n_nodes ||
                    static_cast<std::uint32_t>(node.right) >= n_nodes)
                    throw format_error("'" + in.path() + "': tree node out of range");
                model.importance[node.feature] += node.gain;
            }
        }
    }
    return model;
}

} // namespace saepipe
