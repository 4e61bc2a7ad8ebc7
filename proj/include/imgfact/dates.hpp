#pragma once

#include <compare>
#include <optional>
#include <string>

namespace imgfact {

// Calendar date at day granularity. Evidence filtering never needs
// time-of-day or timezone semantics.
struct Date {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const Date&) const = default;

    bool valid() const;
    std::string iso() const; // YYYY-MM-DD
};

// Strict "YYYY-MM-DD"; rejects impossible dates (leap years honored).
std::optional<Date> parse_iso_date(const std::string& text);

} // namespace imgfact
