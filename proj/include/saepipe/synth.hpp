#pragma once

#include "saepipe/actstore.hpp"
#include "saepipe/featsel.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace saepipe {

// Configuration for a synthetic corpus with planted discriminative
// dimensions. Activations are exponential noise; on the planted dimensions
// the active values of positive-class documents are shifted up by
// signal_strength. Earnings records are constructed so that the SUE/label
// path reproduces the drawn label exactly (|SUE| lands in
// [0.5 + 0.1, 0.5 + 0.9], so there is no discarded band).
struct SynthConfig {
    std::uint32_t n_docs = 400;
    std::uint32_t m = 2000;
    std::uint32_t n_informative = 20;
    std::uint32_t tokens_min = 50;
    std::uint32_t tokens_max = 150;
    double signal_strength = 0.5;
    double noise_activation_rate = 0.05;
    std::uint64_t seed = 42;
    Date date_start = Date::from_ymd(2012, 1, 1);
    Date date_end = Date::from_ymd(2014, 12, 31);
};

void validate_config(const SynthConfig& cfg);

// The planted dimension set is a pure function of the config (a seeded
// partial shuffle of 0..m-1), returned ascending.
std::vector<std::uint32_t> planted_indices(const SynthConfig& cfg);

// Deterministic from the seed: every draw is counter-keyed by
// (seed, document, token, feature), so regeneration order cannot matter.
// Labels alternate 0/1 by document index (balanced to within one).
std::pair<std::vector<ActivationStream>, std::vector<EarningsRecord>>
generate_corpus(const SynthConfig& cfg);

// |top-k of ranking  ∩  planted| / n_informative; vacuously 1 when nothing
// was planted.
double planted_recovery_rate(const FeatureRanking& ranking, const SynthConfig& cfg, std::size_t k);

} // namespace saepipe
