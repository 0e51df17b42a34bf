#include "saepipe/synth.hpp"

#include "saepipe/errors.hpp"
#include "saepipe/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

namespace saepipe {

void validate_config(const SynthConfig& cfg) {
    if (cfg.n_docs < 1) throw value_error("synth: n_docs must be at least 1");
    if (cfg.m < 1) throw value_error("synth: m must be at least 1");
    if (cfg.n_informative > cfg.m) throw value_error("synth: n_informative must not exceed m");
    if (cfg.tokens_min < 1 || cfg.tokens_max < cfg.tokens_min)
        throw value_error("synth: token range must satisfy 1 <= tokens_min <= tokens_max");
    if (!(cfg.signal_strength > 0.0)) throw value_error("synth: signal_strength must be positive");
    if (!(cfg.noise_activation_rate > 0.0 && cfg.noise_activation_rate < 1.0))
        throw value_error("synth: noise_activation_rate must be in (0, 1)");
    if (!(cfg.date_start < cfg.date_end)) throw value_error("synth: date range must be ordered");
}

std::vector<std::uint32_t> planted_indices(const SynthConfig& cfg) {
    validate_config(cfg);
    std::vector<std::uint32_t> all(cfg.m);
    std::iota(all.begin(), all.end(), 0u);
    // Partial Fisher-Yates keyed by the counter generator.
    for (std::uint32_t i = 0; i < cfg.n_informative; ++i) {
        const auto j = static_cast<std::uint32_t>(
            counter_uniform_int(cfg.seed, i, cfg.m - 1, stream_id(RngStream::planted), i));
        std::swap(all[i], all[j]);
    }
    std::vector<std::uint32_t> planted(all.begin(), all.begin() + cfg.n_informative);
    std::sort(planted.begin(), planted.end());
    return planted;
}

std::pair<std::vector<ActivationStream>, std::vector<EarningsRecord>>
generate_corpus(const SynthConfig& cfg) {
    validate_config(cfg);
    const std::vector<std::uint32_t> planted = planted_indices(cfg);
    std::vector<char> is_planted(cfg.m, 0);
    for (std::uint32_t j : planted) is_planted[j] = 1;

    std::vector<ActivationStream> streams;
    std::vector<EarningsRecord> records;
    streams.reserve(cfg.n_docs);
    records.reserve(cfg.n_docs);

    const std::int64_t day_span = cfg.date_end.days() - cfg.date_start.days();
    for (std::uint32_t doc = 0; doc < cfg.n_docs; ++doc) {
        const int label = static_cast<int>(doc % 2);

        ActivationStream s;
        char id[32];
        std::snprintf(id, sizeof(id), "syn-%06u", doc);
        s.doc_id = id;
        s.date = Date::from_days(cfg.date_start.days() +
                                 static_cast<std::int32_t>(counter_uniform_int(
                                     cfg.seed, 0, day_span, stream_id(RngStream::doc_date), doc)));
        s.n_features = cfg.m;

        const auto n_tokens = static_cast<std::uint32_t>(
            counter_uniform_int(cfg.seed, cfg.tokens_min, cfg.tokens_max,
                                stream_id(RngStream::doc_tokens), doc));
        s.rows.reserve(n_tokens);
        for (std::uint32_t t = 0; t < n_tokens; ++t) {
            SparseRow row;
            for (std::uint32_t j = 0; j < cfg.m; ++j) {
                const std::uint64_t h =
                    counter_hash(cfg.seed ^ stream_id(RngStream::token_activation), doc, t, j);
                const double u_active = static_cast<double>(h & 0xffffffffull) * 0x1.0p-32;
                if (u_active >= cfg.noise_activation_rate) continue;
                // Value uniform maps to (0,1) so the exponential draw stays
                // strictly positive and finite.
                const double u_value = (static_cast<double>(h >> 32) + 0.5) * 0x1.0p-32;
                double value = -std::log1p(-u_value);
                if (label == 1 && is_planted[j]) value += cfg.signal_strength;
                row.push_back({j, static_cast<float>(value)});
            }
            s.rows.push_back(std::move(row));
        }

        // Earnings reverse-engineered from the label: estimates {mu-d, mu, mu+d}
        // have sample std d, so reported = mu + target*d puts SUE at target.
        const double margin = 0.1 + 0.8 * counter_uniform(cfg.seed, stream_id(RngStream::earnings_margin), doc);
        const double target = (label == 1 ? 1.0 : -1.0) * (0.5 + margin);
        const double mu = 0.5 + 1.5 * counter_uniform(cfg.seed, stream_id(RngStream::earnings_mean), doc);
        const double d = 0.05 + 0.45 * counter_uniform(cfg.seed, stream_id(RngStream::earnings_spread), doc);

        EarningsRecord rec;
        rec.doc_id = s.doc_id;
        rec.date = s.date;
        rec.analyst_estimates = {mu - d, mu, mu + d};
        rec.reported_eps = mu + target * d;

        streams.push_back(std::move(s));
        records.push_back(std::move(rec));
    }
    return {std::move(streams), std::move(records)};
}

double planted_recovery_rate(const FeatureRanking& ranking, const SynthConfig& cfg, std::size_t k) {
    const std::vector<std::uint32_t> planted = planted_indices(cfg);
    if (planted.empty()) return 1.0;
    std::unordered_set<std::uint32_t> planted_set(planted.begin(), planted.end());
    const std::size_t keep = std::min(k, ranking.order.size());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < keep; ++r) hits += planted_set.count(ranking.order[r]);
    return static_cast<double>(hits) / static_cast<double>(planted.size());
}

} // namespace saepipe
