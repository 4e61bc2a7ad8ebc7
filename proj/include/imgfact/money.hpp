#pragma once

#include <cstdint>
#include <string>

namespace imgfact {

/// Exact decimal USD amount stored as an integer count of nano-dollars
/// (1e-9 USD). Covers per-token prices down to fractions of a micro-dollar
/// and run totals up to ~9.2 billion USD without rounding. All ledger
/// arithmetic happens in this type; doubles are accepted only at the config
/// boundary and rounded once, to the nearest nano-dollar.
class Money {
public:
    static constexpr std::int64_t kScale = 1'000'000'000; // nanos per USD

    constexpr Money() = default;

    static constexpr Money from_nanos(std::int64_t nanos) {
        Money m;
        m.nanos_ = nanos;
        return m;
    }

    /// Parses a decimal string such as "0.003", "12", "-0.25".
    /// Throws FormatError for malformed input or more than 9 fractional
    /// digits (which would require rounding).
    static Money parse(const std::string& text);

    /// Rounds a binary double to the nearest nano-dollar. Meant for JSON
    /// number config values; prefer strings in config for exactness.
    static Money from_double(double usd);

    constexpr std::int64_t nanos() const { return nanos_; }
    double to_double() const { return static_cast<double>(nanos_) / kScale; }

    /// Canonical decimal rendering without a trailing fraction when whole,
    /// e.g. "0.003", "1.5", "0", "-0.054".
    std::string str() const;

    Money operator+(Money o) const { return from_nanos(nanos_ + o.nanos_); }
    Money operator-(Money o) const { return from_nanos(nanos_ - o.nanos_); }
    Money& operator+=(Money o) {
        nanos_ += o.nanos_;
        return *this;
    }

    /// Price times an integer count (searches, pages, tokens).
    /// Throws Error on int64 overflow.
    Money times(std::int64_t count) const;

    auto operator<=>(const Money&) const = default;

private:
    std::int64_t nanos_ = 0;
};

} // namespace imgfact
