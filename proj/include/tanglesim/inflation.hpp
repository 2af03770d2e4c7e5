#pragma once

#include <cstdint>
#include <utility>

#include "tanglesim/amount.hpp"
#include "tanglesim/identity.hpp"
#include "tanglesim/params.hpp"

namespace tanglesim {

// Chain inflation entitlement for one chain transition. The successor earns
// exactly one slot's worth regardless of the slot gap; same-slot transitions
// earn nothing. Rate is 1/(C + t) with t the predecessor's slot.
Amount chain_inflation(Amount predecessor_amount, std::uint64_t predecessor_slot,
                       std::uint64_t successor_slot, const LedgerParams& params);

struct ProjectedAmount {
    Amount closed_form;    // A + k*floor(A/(C+t)), the analysis-only approximation
    Amount stepped_exact;  // composition of k per-slot transitions (normative)
};

ProjectedAmount projected_amount(Amount amount, std::uint64_t start_slot, std::uint64_t k_slots,
                                 const LedgerParams& params);

// Pseudo-random branch inflation bonus. The VRF is a keyed-hash stand-in with
// the same enforced contract: the seed is the chain's previous branch VRF
// value concatenated with the slot number, so for a fixed identity there is
// exactly one valid (rnd, bonus) pair per (predecessor, slot).
struct BranchBonus {
    Digest rnd{};
    Digest proof{};       // equal to rnd in the stand-in
    Amount bonus = 0;     // rnd mod (I_max + 1), or I_max in constant mode
    Digest seed_pred{};   // predecessor VRF value that went into the seed
    std::uint64_t slot = 0;
};

BranchBonus evaluate_branch_bonus(const Digest& secret, const Digest& predecessor_vrf,
                                  std::uint64_t slot, const LedgerParams& params);

// True iff the claimed (rnd, bonus) is exactly what the registered identity
// must produce for the enforced seed.
bool verify_branch_bonus(const Address& sender, const Digest& predecessor_vrf, std::uint64_t slot,
                         const Digest& claimed_rnd, Amount claimed_bonus,
                         const LedgerParams& params, const IdentityRegistry& registry);

}  // namespace tanglesim
