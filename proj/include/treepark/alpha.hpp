#pragma once

// Arrival densities come in from the command line as decimal strings. Car
// counts must be floor(alpha * n) computed exactly, so the string is kept
// alongside an exact numerator/denominator instead of trusting a double.

#include <cstdint>
#include <string>
#include <stdexcept>
#include <cstdlib>

namespace treepark {

struct Alpha {
    std::string text;        // the input spelling, echoed verbatim in output
    double value = 0.0;      // rounded value for samplers and closed forms
    std::uint64_t num = 0;   // exact value as num / den
    std::uint64_t den = 1;

    // floor(alpha * n) without any floating point
    std::uint64_t floor_times(std::uint64_t n) const {
        unsigned __int128 prod = static_cast<unsigned __int128>(num) * n;
        return static_cast<std::uint64_t>(prod / den);
    }
};

// Accepts plain decimals: digits, optionally a dot and more digits.
// No exponents, no signs; the use sites all live in [0, 1].
inline Alpha parse_alpha(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("alpha: empty string");
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("alpha: two dots in '" + text + "'");
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9')
            throw std::invalid_argument("alpha: bad character in '" + text + "'");
        seen_digit = true;
        if (num > (UINT64_MAX - 9) / 10 || (seen_dot && den > UINT64_MAX / 10))
            throw std::invalid_argument("alpha: too many digits in '" + text + "'");
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
        if (seen_dot) den *= 10;
    }
    if (!seen_digit) throw std::invalid_argument("alpha: no digits in '" + text + "'");
    Alpha a;
    a.text = text;
    a.num = num;
    a.den = den;
    a.value = std::strtod(text.c_str(), nullptr);
    return a;
}

}  // namespace treepark
