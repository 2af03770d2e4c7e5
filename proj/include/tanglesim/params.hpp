#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tanglesim/amount.hpp"

namespace tanglesim {

// Ticks per slot is a protocol constant, not a parameter.
inline constexpr std::uint64_t kTicksPerSlot = 128;

enum class BonusMode {
    Random,    // pseudo-random branch inflation bonus, keyed-hash lottery
    Constant,  // every branch claims exactly maxBranchBonus (for A/B experiments)
};

struct LedgerParams {
    std::uint64_t tick_duration_ms = 80;
    std::int64_t genesis_time_ms = 0;
    Amount initial_supply = 1'000'000'000'000'000ull;  // 10^15
    Amount inflation_c = 30'303'030;                   // chain inflation denominator constant
    Amount max_branch_bonus = 10'000'000;              // I_max
    std::uint32_t max_endorsements = 8;                // N
    std::uint64_t sequencer_pace_ticks = 1;
    std::uint64_t user_pace_ticks = 25;
    Amount min_sequencer_amount = 1'000'000'000'000ull;  // initial_supply / 1000
    Amount storage_deposit_per_byte = 1;
    std::uint64_t tag_along_sequencer_window_slots = 12;
    std::uint64_t tag_along_sender_window_slots = 100;
    std::uint64_t max_freeze_slots = 4218;        // ~12h at 10.24s slots
    std::uint64_t revocation_window_slots = 59;   // ~10min
    BonusMode bonus_mode = BonusMode::Random;

    std::uint64_t slot_duration_ms() const { return tick_duration_ms * kTicksPerSlot; }

    // Returns human-readable violations; empty means the parameter set is usable.
    std::vector<std::string> validate() const;
};

}  // namespace tanglesim
