#pragma once

#include "saepipe/actstore.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace saepipe {

inline constexpr std::size_t kDefaultTokenCap = 20000;

// Fixed-length document signature: the element-wise sum of the first
// token_cap sparse token rows. Values accumulate in 64-bit even though
// activations are stored as f32.
struct DocumentVector {
    std::string doc_id;
    Date date;
    std::vector<double> values;
    std::optional<int> label; // 0/1 once the labeling stage has run
};

DocumentVector sum_pool(const ActivationStream& stream, std::size_t token_cap = kDefaultTokenCap);

// Order-preserving map of sum_pool; all streams must share n_features.
std::vector<DocumentVector> pool_corpus(const std::vector<ActivationStream>& streams,
                                        std::size_t token_cap = kDefaultTokenCap);

// --- SAEP2 pooled-corpus file --------------------------------------------
//
//   magic "SAEP2" | m u32 | doc_count u32
//   per document: id_len u16 | id bytes | date i32 | m x f64 values
//                 | label u8 (0, 1, or 255 for unset)

void write_pooled_file(const std::vector<DocumentVector>& docs, const std::filesystem::path& path);
std::vector<DocumentVector> read_pooled_file(const std::filesystem::path& path);

// Streams SAEF -> SAEP2 one document at a time and reports corpus stats.
struct PoolSummary {
    std::uint32_t doc_count = 0;
    std::uint32_t n_features = 0;
    std::uint64_t total_tokens = 0;
    std::uint32_t min_tokens = 0;
    std::uint32_t max_tokens = 0;
    double mean_tokens = 0.0;
};

PoolSummary pool_file(const std::filesystem::path& saef_path,
                      const std::filesystem::path& saep2_path,
                      std::size_t token_cap = kDefaultTokenCap);

} // namespace saepipe
