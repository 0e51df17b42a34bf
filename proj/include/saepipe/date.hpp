#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace saepipe {

// Calendar date stored as days since 1970-01-01 (negative before epoch).
// This is the representation every binary format in the project serializes.
class Date {
public:
    Date() = default;

    static Date from_days(std::int32_t days) { return Date(days); }
    static Date from_ymd(int year, unsigned month, unsigned day);
    // Parses strict ISO-8601 "YYYY-MM-DD"; throws parse_error otherwise.
    static Date from_iso(std::string_view text);

    std::int32_t days() const { return days_; }
    std::string to_iso() const;

    auto operator<=>(const Date&) const = default;

private:
    explicit Date(std::int32_t days) : days_(days) {}
    std::int32_t days_ = 0;
};

} // namespace saepipe
