#include "saepipe/labeling.hpp"

#include "saepipe/errors.hpp"

#include <cmath>

namespace saepipe {

double compute_sue(const EarningsRecord& rec) {
    const std::size_t n = rec.analyst_estimates.size();
    if (n < 2)
        throw insufficient_estimates_error("doc '" + rec.doc_id + "': need at least 2 analyst estimates, got " +
                                           std::to_string(n));
    // An all-equal set must always register as zero dispersion, even when the
    // computed mean is off by an ulp (e.g. three copies of 0.7), so check for
    // equality before doing any arithmetic.
    bool all_equal = true;
    for (double e : rec.analyst_estimates) all_equal = all_equal && e == rec.analyst_estimates[0];
    if (all_equal)
        throw degenerate_dispersion_error("doc '" + rec.doc_id + "': analyst estimates all equal, SUE undefined");
    double mean = 0.0;
    for (double e : rec.analyst_estimates) mean += e;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double e : rec.analyst_estimates) ss += (e - mean) * (e - mean);
    const double std_dev = std::sqrt(ss / static_cast<double>(n - 1));
    if (std_dev == 0.0)
        throw degenerate_dispersion_error("doc '" + rec.doc_id + "': estimate dispersion underflowed to zero, SUE undefined");
    return (rec.reported_eps - mean) / std_dev;
}

Label assign_label(double sue, double delta) {
    if (!(delta > 0.0)) throw value_error("delta must be positive");
    if (!std::isfinite(sue)) throw value_error("SUE must be finite");
    if (sue >= delta) return Label::positive;
    if (sue <= -delta) return Label::negative;
    return Label::discarded;
}

SplitResult chronological_split(const std::vector<DocumentVector>& docs, const SplitSpec& spec) {
    if (!(spec.train_end < spec.val_end))
        throw value_error("split spec requires train_end < val_end (" + spec.train_end.to_iso() +
                          " vs " + spec.val_end.to_iso() + ")");
    SplitResult out;
    for (const DocumentVector& d : docs) {
        if (d.date <= spec.train_end) out.train.push_back(d);
        else if (d.date <= spec.val_end) out.val.push_back(d);
        else out.test.push_back(d);
    }
    if (out.train.empty()) out.warnings.push_back("degenerate split: train partition is empty");
    if (out.val.empty()) out.warnings.push_back("degenerate split: val partition is empty");
    if (out.test.empty()) out.warnings.push_back("degenerate split: test partition is empty");
    return out;
}

} // namespace saepipe
