#pragma once

#include "saepipe/actstore.hpp"
#include "saepipe/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace saepipe {

// Sparsity activations: plain ReLU, ReLU followed by keep-top-k, or a
// per-unit threshold gate that passes values strictly above the threshold.
struct ReluActivation {
    bool operator==(const ReluActivation&) const = default;
};
struct TopKReluActivation {
    std::uint32_t k_act = 0;
    bool operator==(const TopKReluActivation&) const = default;
};
struct JumpReluActivation {
    std::vector<float> thresholds; // length m, all >= 0
    bool operator==(const JumpReluActivation&) const = default;
};
using SaeActivation = std::variant<ReluActivation, TopKReluActivation, JumpReluActivation>;

// Encoder/decoder weights for one sparse autoencoder.
// Row-major: w_enc is d x m, w_dec is m x d.
struct SaeParams {
    std::uint32_t d = 0;
    std::uint32_t m = 0;
    std::vector<float> w_enc;  // d * m
    std::vector<float> b_enc;  // m
    std::vector<float> w_dec;  // m * d
    std::vector<float> b_dec;  // d
    SaeActivation activation = ReluActivation{};

    bool operator==(const SaeParams&) const = default;
};

// Throws value_error / shape_error when the parameter block is inconsistent.
void validate_params(const SaeParams& params);

// h = activation(z . w_enc + b_enc), returned sparse and index-sorted.
// Encoding and decoding are pure; shared params are safe to use from many
// threads at once.
SparseRow encode(const SaeParams& params, std::span<const float> z);

// dense = h . w_dec + b_dec
std::vector<float> decode(const SaeParams& params, const SparseRow& h);

// Encodes every token of a document. Truncation to any token cap is the
// caller's job.
ActivationStream encode_document(const SaeParams& params,
                                 const std::vector<std::vector<float>>& token_vectors,
                                 const std::string& doc_id, Date date);

// --- SAEP parameter file --------------------------------------------------
//
//   magic "SAEP" | version u16 (=1) | d u32 | m u32
//   activation tag u8: 0=Relu, 1=TopK (payload k_act u32),
//                      2=Jump (payload m x f32 thresholds)
//   then row-major f32 blocks: w_enc, b_enc, w_dec, b_dec

inline constexpr std::uint16_t kSaepVersion = 1;

void write_sae_params(const SaeParams& params, const std::filesystem::path& path);
SaeParams read_sae_params(const std::filesystem::path& path);

} // namespace saepipe
