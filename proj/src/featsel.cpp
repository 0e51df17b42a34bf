#include "saepipe/featsel.hpp"

#include "saepipe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace saepipe {

std::string to_string(SelectionMethod method) {
    return method == SelectionMethod::ftest ? "ftest" : "tree";
}

SelectionMethod selection_method_from_string(const std::string& name) {
    if (name == "ftest") return SelectionMethod::ftest;
    if (name == "tree") return SelectionMethod::tree;
    throw value_error("unknown selection method '" + name + "' (expected 'ftest' or 'tree')");
}

std::vector<double> f_test_scores(const Matrix& x, std::span<const int> y) {
    if (x.rows != y.size())
        throw shape_error("f_test_scores: matrix has " + std::to_string(x.rows) + " rows but " +
                          std::to_string(y.size()) + " labels");
    std::size_t n1 = 0;
    for (int v : y) {
        if (v != 0 && v != 1) throw value_error("f_test_scores: labels must be 0 or 1");
        n1 += (v == 1);
    }
    const std::size_t n = x.rows;
    const std::size_t n0 = n - n1;
    if (n0 < 2 || n1 < 2)
        throw class_degenerate_error("f_test_scores: each class needs at least 2 members (got " +
                                     std::to_string(n0) + " and " + std::to_string(n1) + ")");

    std::vector<double> scores(x.cols);
    for (std::size_t j = 0; j < x.cols; ++j) {
        double sum0 = 0.0, sum1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) (y[i] == 1 ? sum1 : sum0) += x(i, j);
        const double mean0 = sum0 / static_cast<double>(n0);
        const double mean1 = sum1 / static_cast<double>(n1);
        const double grand = (sum0 + sum1) / static_cast<double>(n);

        double ssw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x(i, j) - (y[i] == 1 ? mean1 : mean0);
            ssw += d * d;
        }
        const double ssb = static_cast<double>(n0) * (mean0 - grand) * (mean0 - grand) +
                           static_cast<double>(n1) * (mean1 - grand) * (mean1 - grand);
        // df1 = 1 for two groups, so MSB == SSB.
        const double msw = ssw / static_cast<double>(n - 2);
        if (msw > 0.0) scores[j] = ssb / msw;
        else scores[j] = ssb > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return scores;
}

std::vector<double> tree_importance_scores(const Matrix& x, std::span<const int> y,
                                           const GbdtConfig& cfg) {
    const GbdtModel model = train_gbdt(x, y, cfg);
    std::vector<double> scores = model.importance;
    const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    if (total > 0.0)
        for (double& s : scores) s /= total;
    return scores;
}

SelectionResult rank_and_select(std::span<const double> scores, std::size_t k,
                                SelectionMethod method) {
    if (k < 1) throw value_error("rank_and_select: k must be at least 1");
    for (double s : scores)
        if (std::isnan(s)) throw value_error("rank_and_select: scores must not be NaN");

    SelectionResult out;
    out.ranking.method = method;
    out.ranking.scores.assign(scores.begin(), scores.end());
    out.ranking.order.resize(scores.size());
    std::iota(out.ranking.order.begin(), out.ranking.order.end(), 0u);
    std::sort(out.ranking.order.begin(), out.ranking.order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                  if (scores[a] != scores[b]) return scores[a] > scores[b];
                  return a < b;
              });

    const std::size_t keep = std::min(k, scores.size());
    out.selected.assign(out.ranking.order.begin(), out.ranking.order.begin() + keep);
    std::sort(out.selected.begin(), out.selected.end());
    return out;
}

void write_ranking_csv(const FeatureRanking& ranking, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    out << "feature_index,score,rank\n";
    char buf[64];
    for (std::size_t r = 0; r < ranking.order.size(); ++r) {
        const std::uint32_t j = ranking.order[r];
        const double s = ranking.scores[j];
        if (std::isinf(s)) std::snprintf(buf, sizeof(buf), "inf");
        else std::snprintf(buf, sizeof(buf), "%.17g", s);
        out << j << ',' << buf << ',' << (r + 1) << '\n';
    }
    out << "# method=" << to_string(ranking.method) << '\n';
    if (!out) throw io_error("write failed on '" + path.string() + "'");
}

FeatureRanking read_ranking_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
    FeatureRanking ranking;
    std::string line;
    std::size_t line_no = 0;
    bool saw_method = false;
    std::vector<std::pair<std::uint32_t, double>> rows; // (index, score) in rank order
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line == "feature_index,score,rank") continue;
        if (line.rfind("# method=", 0) == 0) {
            ranking.method = selection_method_from_string(line.substr(9));
            saw_method = true;
            continue;
        }
        std::stringstream ss(line);
        std::string idx_s, score_s, rank_s;
        if (!std::getline(ss, idx_s, ',') || !std::getline(ss, score_s, ',') ||
            !std::getline(ss, rank_s, ','))
            throw parse_error("malformed ranking row", line_no);
        try {
            const auto idx = static_cast<std::uint32_t>(std::stoul(idx_s));
            const double score =
                score_s == "inf" ? std::numeric_limits<double>::infinity() : std::stod(score_s);
            rows.emplace_back(idx, score);
        } catch (const std::exception&) {
            throw parse_error("malformed ranking row '" + line + "'", line_no);
        }
    }
    if (!saw_method)
        throw format_error("'" + path.string() + "': missing '# method=' trailer");
    ranking.scores.assign(rows.size(), 0.0);
    ranking.order.reserve(rows.size());
    for (const auto& [idx, score] : rows) {
        if (idx >= rows.size()) throw format_error("'" + path.string() + "': feature index out of range");
        ranking.scores[idx] = score;
        ranking.order.push_back(idx);
    }
    return ranking;
}

} // namespace saepipe
