#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace saepipe {

// Base class for every error this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be opened/read/written.
struct io_error : error {
    using error::error;
};

// File content violates a format contract (bad magic, wrong version,
// inconsistent dimensions across documents, invalid row data).
struct format_error : error {
    using error::error;
};

// File ended or broke mid-record; carries the byte offset of the failure.
struct corruption_error : format_error {
    corruption_error(const std::string& what, std::uint64_t offset)
        : format_error(what + " (byte offset " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::uint64_t byte_offset;
};

// Tabular input is missing a required column.
struct schema_error : error {
    using error::error;
};

// A field failed to parse; carries the 1-based line number when known.
struct parse_error : error {
    explicit parse_error(const std::string& what, std::size_t line = 0)
        : error(line ? what + " (line " + std::to_string(line) + ")" : what),
          line_number(line) {}
    std::size_t line_number;
};

// Dimension mismatch between an input and what the operation expects.
struct shape_error : error {
    using error::error;
};

// An argument value is outside the operation's domain.
struct value_error : error {
    using error::error;
};

// Training/scoring input contains only one class.
struct class_degenerate_error : error {
    using error::error;
};

// Fewer than two analyst estimates, so the estimate spread is undefined.
struct insufficient_estimates_error : error {
    using error::error;
};

// All analyst estimates identical: zero spread, SUE undefined.
struct degenerate_dispersion_error : error {
    using error::error;
};

} // namespace saepipe
