#include "saepipe/sae.hpp"

#include <algorithm>
#include <cmath>

namespace saepipe {

void validate_params(const SaeParams& params) {
    if (params.d < 1 || params.m < 1) throw value_error("SAE dimensions must be at least 1");
    auto need = [](std::size_t got, std::size_t want, const char* what) {
        if (got != want)
            throw shape_error(std::string(what) + " has " + std::to_string(got) +
                              " entries, expected " + std::to_string(want));
    };
    need(params.w_enc.size(), static_cast<std::size_t>(params.d) * params.m, "w_enc");
    need(params.b_enc.size(), params.m, "b_enc");
    need(params.w_dec.size(), static_cast<std::size_t>(params.m) * params.d, "w_dec");
    need(params.b_dec.size(), params.d, "b_dec");
    if (const auto* topk = std::get_if<TopKReluActivation>(&params.activation)) {
        if (topk->k_act < 1 || topk->k_act > params.m)
            throw value_error("TopK k_act must be in [1, m]");
    } else if (const auto* jump = std::get_if<JumpReluActivation>(&params.activation)) {
        need(jump->thresholds.size(), params.m, "JumpRelu thresholds");
        for (float t : jump->thresholds)
            if (!(t >= 0.0f)) throw value_error("JumpRelu thresholds must be non-negative");
    }
}

SparseRow encode(const SaeParams& params, std::span<const float> z) {
    if (z.size() != params.d)
        throw shape_error("encode: input has " + std::to_string(z.size()) +
                          " dims, SAE expects " + std::to_string(params.d));

    // pre = z . w_enc + b_enc, accumulated in double
    std::vector<double> pre(params.m);
    for (std::uint32_t j = 0; j < params.m; ++j) pre[j] = params.b_enc[j];
    for (std::uint32_t i = 0; i < params.d; ++i) {
        const double zi = z[i];
        if (zi == 0.0) continue;
        const float* wrow = params.w_enc.data() + static_cast<std::size_t>(i) * params.m;
        for (std::uint32_t j = 0; j < params.m; ++j) pre[j] += zi * wrow[j];
    }

    SparseRow out;
    if (const auto* topk = std::get_if<TopKReluActivation>(&params.activation)) {
        // ReLU first, then keep the k_act largest survivors; the comparator's
        // index ascent is what breaks ties at the k-th rank toward lower index.
        std::vector<std::uint32_t> pos;
        for (std::uint32_t j = 0; j < params.m; ++j)
            if (pre[j] > 0.0) pos.push_back(j);
        const std::size_t keep = std::min<std::size_t>(topk->k_act, pos.size());
        std::partial_sort(pos.begin(), pos.begin() + keep, pos.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              if (pre[a] != pre[b]) return pre[a] > pre[b];
                              return a < b;
                          });
        pos.resize(keep);
        std::sort(pos.begin(), pos.end());
        for (std::uint32_t j : pos) out.push_back({j, static_cast<float>(pre[j])});
    } else if (const auto* jump = std::get_if<JumpReluActivation>(&params.activation)) {
        for (std::uint32_t j = 0; j < params.m; ++j)
            if (pre[j] > static_cast<double>(jump->thresholds[j]))
                out.push_back({j, static_cast<float>(pre[j])});
    } else {
        for (std::uint32_t j = 0; j < params.m; ++j)
            if (pre[j] > 0.0) out.push_back({j, static_cast<float>(pre[j])});
    }
    return out;
}

std::vector<float> decode(const SaeParams& params, const SparseRow& h) {
    std::vector<double> acc(params.b_dec.begin(), params.b_dec.end());
    for (const SparseEntry& e : h) {
        if (e.index >= params.m)
            throw shape_error("decode: latent index " + std::to_string(e.index) +
                              " out of range for m=" + std::to_string(params.m));
        const float* wrow = params.w_dec.data() + static_cast<std::size_t>(e.index) * params.d;
        const double v = e.value;
        for (std::uint32_t i = 0; i < params.d; ++i) acc[i] += v * wrow[i];
    }
    return std::vector<float>(acc.begin(), acc.end());
}

ActivationStream encode_document(const SaeParams& params,
                                 const std::vector<std::vector<float>>& token_vectors,
                                 const std::string& doc_id, Date date) {
    ActivationStream stream;
    stream.doc_id = doc_id;
    stream.date = date;
    stream.n_features = params.m;
    stream.rows.reserve(token_vectors.size());
    for (std::size_t t = 0; t < token_vectors.size(); ++t) {
        if (token_vectors[t].size() != params.d)
            throw shape_error("encode_document: token " + std::to_string(t) + " has " +
                              std::to_string(token_vectors[t].size()) + " dims, SAE expects " +
                              std::to_string(params.d));
        stream.rows.push_back(encode(params, token_vectors[t]));
    }
    return stream;
}

void write_sae_params(const SaeParams& params, const std::filesystem::path& path) {
    validate_params(params);
    BinWriter out(path);
    out.magic("SAEP");
    out.u16(kSaepVersion);
    out.u32(params.d);
    out.u32(params.m);
    if (std::holds_alternative<ReluActivation>(params.activation)) {
        out.u8(0);
    } else if (const auto* topk = std::get_if<TopKReluActivation>(&params.activation)) {
        out.u8(1);
        out.u32(topk->k_act);
    } else {
        out.u8(2);
        for (float t : std::get<JumpReluActivation>(params.activation).thresholds) out.f32(t);
    }
    for (float v : params.w_enc) out.f32(v);
    for (float v : params.b_enc) out.f32(v);
    for (float v : params.w_dec) out.f32(v);
    for (float v : params.b_dec) out.f32(v);
    out.close();
}

SaeParams read_sae_params(const std::filesystem::path& path) {
    BinReader in(path);
    in.expect_magic("SAEP", "SAEP parameter");
    const std::uint16_t version = in.u16();
    if (version != kSaepVersion)
        throw format_error("'" + in.path() + "': unsupported SAEP version " + std::to_string(version));
    SaeParams p;
    p.d = in.u32();
    p.m = in.u32();
    const std::uint8_t tag = in.u8();
    if (tag == 0) {
        p.activation = ReluActivation{};
    } else if (tag == 1) {
        p.activation = TopKReluActivation{in.u32()};
    } else if (tag == 2) {
        JumpReluActivation jump;
        jump.thresholds.resize(p.m);
        for (float& t : jump.thresholds) t = in.f32();
        p.activation = std::move(jump);
    } else {
        throw format_error("'" + in.path() + "': unknown activation tag " + std::to_string(tag));
    }
    auto read_block = [&](std::vector<float>& dst, std::size_t n) {
        dst.resize(n);
        for (float& v : dst) v = in.f32();
    };
    read_block(p.w_enc, static_cast<std::size_t>(p.d) * p.m);
    read_block(p.b_enc, p.m);
    read_block(p.w_dec, static_cast<std::size_t>(p.m) * p.d);
    read_block(p.b_dec, p.d);
    validate_params(p);
    return p;
}

} // namespace saepipe
