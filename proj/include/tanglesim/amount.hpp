#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace tanglesim {

// Token amounts are unsigned 64-bit counts. All arithmetic on amounts goes
// through the checked helpers below; overflow is never allowed to wrap.
using Amount = std::uint64_t;

struct AmountOverflow : std::runtime_error {
    AmountOverflow() : std::runtime_error("amount arithmetic overflow") {}
};

inline std::optional<Amount> checked_add(Amount a, Amount b) {
    Amount r = a + b;
    if (r < a) return std::nullopt;
    return r;
}

inline std::optional<Amount> checked_sub(Amount a, Amount b) {
    if (b > a) return std::nullopt;
    return a - b;
}

inline std::optional<Amount> checked_mul(Amount a, Amount b) {
    if (a == 0 || b == 0) return Amount(0);
    Amount r = a * b;
    if (r / a != b) return std::nullopt;
    return r;
}

// For contexts where overflow indicates a broken internal invariant rather
// than an untrusted input.
inline Amount must_add(Amount a, Amount b) {
    auto r = checked_add(a, b);
    if (!r) throw AmountOverflow();
    return *r;
}

inline Amount must_sub(Amount a, Amount b) {
    auto r = checked_sub(a, b);
    if (!r) throw AmountOverflow();
    return *r;
}

inline Amount must_mul(Amount a, Amount b) {
    auto r = checked_mul(a, b);
    if (!r) throw AmountOverflow();
    return *r;
}

}  // namespace tanglesim
