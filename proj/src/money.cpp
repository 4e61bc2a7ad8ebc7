#include "imgfact/money.hpp"

#include <cmath>
#include <cstdlib>

#include "imgfact/errors.hpp"

namespace imgfact {

Money Money::parse(const std::string& text) {
    if (text.empty())
        throw FormatError("empty money literal");
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    if (i == text.size())
        throw FormatError("money literal has no digits: '" + text + "'");

    std::int64_t whole = 0;
    bool any_digit = false;
    for (; i < text.size() && text[i] != '.'; ++i) {
        if (text[i] < '0' || text[i] > '9')
            throw FormatError("bad character in money literal: '" + text + "'");
        any_digit = true;
        if (whole > (INT64_MAX - 9) / 10)
            throw FormatError("money literal out of range: '" + text + "'");
        whole = whole * 10 + (text[i] - '0');
    }

    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size()) { // at '.'
        ++i;
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9')
                throw FormatError("bad character in money literal: '" + text + "'");
            any_digit = true;
            if (++frac_digits > 9)
                throw FormatError("money literal finer than 1 nano-USD: '" + text + "'");
            frac = frac * 10 + (text[i] - '0');
        }
    }
    if (!any_digit)
        throw FormatError("money literal has no digits: '" + text + "'");
    for (int d = frac_digits; d < 9; ++d)
        frac *= 10;

    if (whole > INT64_MAX / kScale)
        throw FormatError("money literal out of range: '" + text + "'");
    std::int64_t nanos = whole * kScale + frac;
    return from_nanos(neg ? -nanos : nanos);
}

Money Money::from_double(double usd) {
    double scaled = usd * static_cast<double>(kScale);
    if (!std::isfinite(scaled) || std::abs(scaled) > 9.0e18)
        throw FormatError("money value out of range");
    return from_nanos(static_cast<std::int64_t>(std::llround(scaled)));
}

std::string Money::str() const {
    std::int64_t n = nanos_;
    std::string sign = n < 0 ? "-" : "";
    if (n < 0)
        n = -n;
    std::int64_t whole = n / kScale;
    std::int64_t frac = n % kScale;
    if (frac == 0)
        return sign + std::to_string(whole);
    std::string f = std::to_string(frac);
    f.insert(0, 9 - f.size(), '0');
    while (f.back() == '0')
        f.pop_back();
    return sign + std::to_string(whole) + "." + f;
}

Money Money::times(std::int64_t count) const {
    if (nanos_ != 0 && count != 0) {
        __int128 wide = static_cast<__int128>(nanos_) * count;
        if (wide > INT64_MAX || wide < INT64_MIN)
            throw Error("money multiplication overflow");
        return from_nanos(static_cast<std::int64_t>(wide));
    }
    return Money{};
}

} // namespace imgfact
