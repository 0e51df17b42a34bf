#pragma once

#include "saepipe/binio.hpp"
#include "saepipe/date.hpp"
#include "saepipe/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace saepipe {

// One (feature index, activation) entry of a sparse token row.
struct SparseEntry {
    std::uint32_t index = 0;
    float value = 0.0f;
    bool operator==(const SparseEntry&) const = default;
};

using SparseRow = std::vector<SparseEntry>;

// Token-level sparse activations for one document, plus the metadata the
// downstream stages need (the date travels with the activations so
// chronological splitting never requires a join).
struct ActivationStream {
    std::string doc_id;
    Date date;
    std::uint32_t n_features = 0;
    std::vector<SparseRow> rows; // one per token, indices strictly increasing

    std::uint32_t n_tokens() const { return static_cast<std::uint32_t>(rows.size()); }
    bool operator==(const ActivationStream&) const = default;
};

// One earnings event: what was reported and what analysts expected.
struct EarningsRecord {
    std::string doc_id;
    Date date;
    double reported_eps = 0.0;
    std::vector<double> analyst_estimates;
};

// Dense per-document vector (residual-stream input to an encoder, or a
// probe vector). Stored on disk as the pooled-corpus format.
struct DenseVectorRecord {
    std::string doc_id;
    Date date;
    std::vector<double> values;
};

// Throws format_error if the stream violates its invariants (indices sorted
// strictly increasing and < n_features, values finite and >= 0).
void validate_stream(const ActivationStream& stream);

// --- SAEF activation file format -----------------------------------------
//
//   magic "SAEF" | version u16 (=1) | n_features u32 | doc_count u32
//   per document:
//     id_len u16 | id bytes | date i32 (days since epoch) | n_tokens u32
//     per token: nnz u32 | nnz x (index u32, value f32)
//   All integers little-endian.

inline constexpr std::uint16_t kSaefVersion = 1;

void write_activation_file(const std::vector<ActivationStream>& streams,
                           const std::filesystem::path& path);

// Streaming reader: holds at most one document in memory at a time.
// A single reader is single-consumer; open one per thread for parallel use.
class ActivationFileReader {
public:
    explicit ActivationFileReader(const std::filesystem::path& path);

    std::uint32_t n_features() const { return n_features_; }
    std::uint32_t doc_count() const { return doc_count_; }

    // Next document, or nullopt once doc_count documents have been returned.
    std::optional<ActivationStream> next();

private:
    BinReader in_;
    std::uint32_t n_features_ = 0;
    std::uint32_t doc_count_ = 0;
    std::uint32_t docs_read_ = 0;
};

// Convenience wrapper that materializes the whole file.
std::vector<ActivationStream> read_activation_file(const std::filesystem::path& path);

// --- Earnings CSV ---------------------------------------------------------
//
// Columns: doc_id,date,reported_eps,analyst_estimates
// Dates are ISO-8601; the estimates field is a semicolon-joined list,
// quoted ("1.00;0.90;1.10"). A header line is optional and validated when
// present.

std::vector<EarningsRecord> read_earnings_table(const std::filesystem::path& path);
void write_earnings_table(const std::vector<EarningsRecord>& records,
                          const std::filesystem::path& path);

} // namespace saepipe
