#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>

#include "tanglesim/params.hpp"

namespace tanglesim {

// Ledger time: a transaction timestamp is the number of ticks since genesis.
struct Timestamp {
    std::uint64_t ticks = 0;

    std::uint64_t slot() const { return ticks / kTicksPerSlot; }
    std::uint64_t ticks_in_slot() const { return ticks % kTicksPerSlot; }
    bool on_slot_boundary() const { return ticks_in_slot() == 0; }

    auto operator<=>(const Timestamp&) const = default;
};

inline std::uint64_t slot_of(Timestamp ts) { return ts.slot(); }
inline std::uint64_t ticks_of(Timestamp ts) { return ts.ticks_in_slot(); }

// Conversions between ledger time and the real (simulated wall clock) time axis.
struct TimeConversion {
    std::int64_t genesis_time_ms = 0;
    std::uint64_t tick_duration_ms = 80;

    explicit TimeConversion() = default;
    explicit TimeConversion(const LedgerParams& p)
        : genesis_time_ms(p.genesis_time_ms), tick_duration_ms(p.tick_duration_ms) {}

    std::int64_t real_time_of(Timestamp ts) const {
        if (tick_duration_ms != 0 &&
            ts.ticks > std::uint64_t(INT64_MAX - genesis_time_ms) / tick_duration_ms)
            throw std::overflow_error("real_time_of overflows the millisecond axis");
        return genesis_time_ms + std::int64_t(ts.ticks * tick_duration_ms);
    }

    // How long an incoming transaction must wait in the cool-down room.
    std::int64_t cooldown_delay(Timestamp ts, std::int64_t node_local_clock_ms) const {
        std::int64_t due = real_time_of(ts);
        return due > node_local_clock_ms ? due - node_local_clock_ms : 0;
    }

    // Latest whole tick that is not in the future of the given local clock.
    std::uint64_t ticks_at(std::int64_t local_clock_ms) const {
        if (local_clock_ms <= genesis_time_ms) return 0;
        return std::uint64_t(local_clock_ms - genesis_time_ms) / tick_duration_ms;
    }
};

}  // namespace tanglesim
