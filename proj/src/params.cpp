#include "tanglesim/params.hpp"

namespace tanglesim {

std::vector<std::string> LedgerParams::validate() const {
    std::vector<std::string> bad;
    auto require = [&](bool ok, const char* msg) {
        if (!ok) bad.emplace_back(msg);
    };
    require(tick_duration_ms > 0, "tickDurationMs must be > 0");
    require(initial_supply > 0, "initialSupply must be > 0");
    require(inflation_c > 0, "inflationC must be > 0");
    require(max_endorsements > 0, "maxEndorsements must be > 0");
    require(sequencer_pace_ticks > 0, "sequencerPaceTicks must be > 0");
    require(user_pace_ticks > 0, "userPaceTicks must be > 0");
    require(min_sequencer_amount > 0, "minSequencerAmount must be > 0");
    require(min_sequencer_amount <= initial_supply,
            "minSequencerAmount must not exceed initialSupply");
    require(storage_deposit_per_byte > 0, "storageDepositPerByte must be > 0");
    require(tag_along_sequencer_window_slots > 0, "tagAlongSequencerWindowSlots must be > 0");
    require(tag_along_sender_window_slots > 0, "tagAlongSenderWindowSlots must be > 0");
    require(max_freeze_slots > 0, "maxFreezeSlots must be > 0");
    require(revocation_window_slots > 0, "revocationWindowSlots must be > 0");
    return bad;
}

}  // namespace tanglesim
