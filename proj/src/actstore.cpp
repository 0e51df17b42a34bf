#include "saepipe/actstore.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace saepipe {

namespace {
constexpr std::uint16_t kMaxIdLen = std::numeric_limits<std::uint16_t>::max();
}

void validate_stream(const ActivationStream& stream) {
    for (std::size_t t = 0; t < stream.rows.size(); ++t) {
        const SparseRow& row = stream.rows[t];
        std::int64_t prev = -1;
        for (const SparseEntry& e : row) {
            if (e.index >= stream.n_features)
                throw format_error("doc '" + stream.doc_id + "' token " + std::to_string(t) +
                                   ": feature index " + std::to_string(e.index) +
                                   " >= n_features " + std::to_string(stream.n_features));
            if (static_cast<std::int64_t>(e.index) <= prev)
                throw format_error("doc '" + stream.doc_id + "' token " + std::to_string(t) +
                                   ": feature indices not strictly increasing");
            if (!std::isfinite(e.value) || e.value < 0.0f)
                throw format_error("doc '" + stream.doc_id + "' token " + std::to_string(t) +
                                   ": activation value must be finite and non-negative");
            prev = e.index;
        }
    }
}

void write_activation_file(const std::vector<ActivationStream>& streams,
                           const std::filesystem::path& path) {
    if (streams.empty()) throw format_error("refusing to write an activation file with no documents");
    const std::uint32_t m = streams.front().n_features;
    for (const ActivationStream& s : streams) {
        if (s.n_features != m)
            throw format_error("mixed n_features across documents: doc '" + s.doc_id + "' has " +
                               std::to_string(s.n_features) + ", expected " + std::to_string(m));
        if (s.doc_id.size() > kMaxIdLen)
            throw format_error("doc id longer than " + std::to_string(kMaxIdLen) + " bytes");
        validate_stream(s);
    }

    BinWriter out(path);
    out.magic("SAEF");
    out.u16(kSaefVersion);
    out.u32(m);
    out.u32(static_cast<std::uint32_t>(streams.size()));
    for (const ActivationStream& s : streams) {
        out.u16(static_cast<std::uint16_t>(s.doc_id.size()));
        out.bytes(s.doc_id.data(), s.doc_id.size());
        out.i32(s.date.days());
        out.u32(s.n_tokens());
        for (const SparseRow& row : s.rows) {
            out.u32(static_cast<std::uint32_t>(row.size()));
            for (const SparseEntry& e : row) {
                out.u32(e.index);
                out.f32(e.value);
            }
        }
    }
    out.close();
}

ActivationFileReader::ActivationFileReader(const std::filesystem::path& path) : in_(path) {
    in_.expect_magic("SAEF", "SAEF activation");
    const std::uint16_t version = in_.u16();
    if (version != kSaefVersion)
        throw format_error("'" + in_.path() + "': unsupported SAEF version " + std::to_string(version));
    n_features_ = in_.u32();
    doc_count_ = in_.u32();
}

std::optional<ActivationStream> ActivationFileReader::next() {
    if (docs_read_ == doc_count_) return std::nullopt;
    ActivationStream s;
    const std::uint16_t id_len = in_.u16();
    s.doc_id = in_.str(id_len);
    s.date = Date::from_days(in_.i32());
    s.n_features = n_features_;
    const std::uint32_t n_tokens = in_.u32();
    s.rows.reserve(n_tokens);
    for (std::uint32_t t = 0; t < n_tokens; ++t) {
        const std::uint32_t nnz = in_.u32();
        SparseRow row;
        row.reserve(nnz);
        for (std::uint32_t i = 0; i < nnz; ++i) {
            SparseEntry e;
            e.index = in_.u32();
            e.value = in_.f32();
            row.push_back(e);
        }
        s.rows.push_back(std::move(row));
    }
    validate_stream(s);
    ++docs_read_;
    return s;
}

std::vector<ActivationStream> read_activation_file(const std::filesystem::path& path) {
    ActivationFileReader reader(path);
    std::vector<ActivationStream> out;
    out.reserve(reader.doc_count());
    while (auto s = reader.next()) out.push_back(std::move(*s));
    return out;
}

// --- earnings CSV ---------------------------------------------------------

namespace {

const char* kColumns[4] = {"doc_id", "date", "reported_eps", "analyst_estimates"};

// Splits one CSV line, honoring double quotes ("" unescapes to ").
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_quotes) throw parse_error("unterminated quote", line_no);
    fields.push_back(std::move(cur));
    return fields;
}

double parse_number(const std::string& text, const char* what, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing junk");
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
        return v;
    } catch (const std::exception&) {
        throw parse_error(std::string("non-numeric ") + what + " '" + text + "'", line_no);
    }
}

} // namespace

std::vector<EarningsRecord> read_earnings_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path.string() + "' for reading");

    std::vector<EarningsRecord> out;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line, line_no);

        if (first) {
            first = false;
            if (fields[0] == kColumns[0]) { // header line: check all columns are present
                for (std::size_t i = 0; i < 4; ++i)
                    if (i >= fields.size() || fields[i] != kColumns[i])
                        throw schema_error("missing or misplaced column '" + std::string(kColumns[i]) +
                                           "' in '" + path.string() + "'");
                continue;
            }
        }

        if (fields.size() != 4)
            throw schema_error("line " + std::to_string(line_no) + ": expected 4 columns, got " +
                               std::to_string(fields.size()) + "; missing column '" +
                               kColumns[std::min<std::size_t>(fields.size(), 3)] + "'");

        EarningsRecord rec;
        rec.doc_id = fields[0];
        try {
            rec.date = Date::from_iso(fields[1]);
        } catch (const parse_error& e) {
            throw parse_error(e.what(), line_no);
        }
        rec.reported_eps = parse_number(fields[2], "reported_eps", line_no);

        std::stringstream est(fields[3]);
        std::string item;
        while (std::getline(est, item, ';'))
            if (!item.empty()) rec.analyst_estimates.push_back(parse_number(item, "analyst estimate", line_no));
        if (rec.analyst_estimates.empty())
            throw parse_error("empty analyst_estimates field", line_no);
        out.push_back(std::move(rec));
    }
    return out;
}

void write_earnings_table(const std::vector<EarningsRecord>& records,
                          const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
    out << "doc_id,date,reported_eps,analyst_estimates\n";
    char buf[64];
    for (const EarningsRecord& r : records) {
        out << r.doc_id << ',' << r.date.to_iso() << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", r.reported_eps);
        out << buf << ",\"";
        for (std::size_t i = 0; i < r.analyst_estimates.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", r.analyst_estimates[i]);
            out << (i ? ";" : "") << buf;
        }
        out << "\"\n";
    }
    if (!out) throw io_error("write failed on '" + path.string() + "'");
}

} // namespace saepipe
