#pragma once

#include "saepipe/actstore.hpp"
#include "saepipe/pooling.hpp"

#include <string>
#include <vector>

namespace saepipe {

inline constexpr double kDefaultSurpriseDelta = 0.5;

enum class Label : int { negative = 0, positive = 1, discarded = 2 };

// Surprise score and the label it induces for one document.
struct SueResult {
    std::string doc_id;
    double sue = 0.0;
    Label label = Label::discarded;
};

// SUE = (reported - mean(estimates)) / sample_std(estimates).
// The n-1 denominator is used: analyst forecast sets are samples.
double compute_sue(const EarningsRecord& rec);

// 1 if sue >= delta, 0 if sue <= -delta, discarded strictly inside the band.
// Both boundaries are inclusive, so |sue| == delta is labeled.
Label assign_label(double sue, double delta = kDefaultSurpriseDelta);

// Chronological partition. Left boundaries are inclusive:
//   train: date <= train_end, val: train_end < date <= val_end, test: after.
struct SplitSpec {
    Date train_end;
    Date val_end;
};

struct SplitResult {
    std::vector<DocumentVector> train;
    std::vector<DocumentVector> val;
    std::vector<DocumentVector> test;
    // Empty partitions are reported, not fatal.
    std::vector<std::string> warnings;
};

SplitResult chronological_split(const std::vector<DocumentVector>& docs, const SplitSpec& spec);

} // namespace saepipe
