#include "saepipe/pooling.hpp"

#include "saepipe/binio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace saepipe {

DocumentVector sum_pool(const ActivationStream& stream, std::size_t token_cap) {
    if (token_cap < 1) throw value_error("token_cap must be at least 1");
    DocumentVector doc;
    doc.doc_id = stream.doc_id;
    doc.date = stream.date;
    doc.values.assign(stream.n_features, 0.0);
    const std::size_t n = std::min<std::size_t>(stream.rows.size(), token_cap);
    for (std::size_t t = 0; t < n; ++t)
        for (const SparseEntry& e : stream.rows[t])
            doc.values[e.index] += static_cast<double>(e.value);
    return doc;
}

std::vector<DocumentVector> pool_corpus(const std::vector<ActivationStream>& streams,
                                        std::size_t token_cap) {
    std::vector<DocumentVector> out;
    out.reserve(streams.size());
    for (const ActivationStream& s : streams) {
        if (!out.empty() && s.n_features != out.front().values.size())
            throw shape_error("pool_corpus: doc '" + s.doc_id + "' has n_features " +
                              std::to_string(s.n_features) + ", expected " +
                              std::to_string(out.front().values.size()));
        out.push_back(sum_pool(s, token_cap));
    }
    return out;
}

namespace {
constexpr std::uint8_t kLabelUnset = 255;
}

void write_pooled_file(const std::vector<DocumentVector>& docs, const std::filesystem::path& path) {
    if (docs.empty()) throw format_error("refusing to write a pooled file with no documents");
    const std::size_t m = docs.front().values.size();
    BinWriter out(path);
    out.magic("SAEP2");
    out.u32(static_cast<std::uint32_t>(m));
    out.u32(static_cast<std::uint32_t>(docs.size()));
    for (const DocumentVector& d : docs) {
        if (d.values.size() != m)
            throw shape_error("write_pooled_file: doc '" + d.doc_id + "' has " +
                              std::to_string(d.values.size()) + " values, expected " + std::to_string(m));
        out.u16(static_cast<std::uint16_t>(d.doc_id.size()));
        out.bytes(d.doc_id.data(), d.doc_id.size());
        out.i32(d.date.days());
        for (double v : d.values) out.f64(v);
        out.u8(d.label ? static_cast<std::uint8_t>(*d.label) : kLabelUnset);
    }
    out.close();
}

std::vector<DocumentVector> read_pooled_file(const std::filesystem::path& path) {
    BinReader in(path);
    in.expect_magic("SAEP2", "SAEP2 pooled-corpus");
    const std::uint32_t m = in.u32();
    const std::uint32_t count = in.u32();
    std::vector<DocumentVector> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        DocumentVector d;
        d.doc_id = in.str(in.u16());
        d.date = Date::from_days(in.i32());
        d.values.resize(m);
        for (double& v : d.values) v = in.f64();
        const std::uint8_t label = in.u8();
        if (label == 0 || label == 1) d.label = label;
        else if (label != kLabelUnset)
            throw format_error("'" + in.path() + "': doc '" + d.doc_id + "' has invalid label byte " +
                               std::to_string(label));
        out.push_back(std::move(d));
    }
    return out;
}

PoolSummary pool_file(const std::filesystem::path& saef_path,
                      const std::filesystem::path& saep2_path, std::size_t token_cap) {
    if (token_cap < 1) throw value_error("token_cap must be at least 1");
    ActivationFileReader reader(saef_path);
    if (reader.doc_count() == 0)
        throw format_error("'" + saef_path.string() + "' contains no documents");

    BinWriter out(saep2_path);
    out.magic("SAEP2");
    out.u32(reader.n_features());
    out.u32(reader.doc_count());

    PoolSummary summary;
    summary.doc_count = reader.doc_count();
    summary.n_features = reader.n_features();
    summary.min_tokens = std::numeric_limits<std::uint32_t>::max();
    while (auto stream = reader.next()) {
        summary.total_tokens += stream->n_tokens();
        summary.min_tokens = std::min(summary.min_tokens, stream->n_tokens());
        summary.max_tokens = std::max(summary.max_tokens, stream->n_tokens());
        DocumentVector d = sum_pool(*stream, token_cap);
        out.u16(static_cast<std::uint16_t>(d.doc_id.size()));
        out.bytes(d.doc_id.data(), d.doc_id.size());
        out.i32(d.date.days());
        for (double v : d.values) out.f64(v);
        out.u8(255);
    }
    out.close();
    summary.mean_tokens = static_cast<double>(summary.total_tokens) / summary.doc_count;
    return summary;
}

} // namespace saepipe
