#include "tanglesim/inflation.hpp"

namespace tanglesim {

Amount chain_inflation(Amount predecessor_amount, std::uint64_t predecessor_slot,
                       std::uint64_t successor_slot, const LedgerParams& params) {
    if (successor_slot <= predecessor_slot) return 0;
    Amount denom = must_add(params.inflation_c, predecessor_slot);
    return predecessor_amount / denom;
}

ProjectedAmount projected_amount(Amount amount, std::uint64_t start_slot, std::uint64_t k_slots,
                                 const LedgerParams& params) {
    ProjectedAmount r{};
    Amount per_slot = amount / must_add(params.inflation_c, start_slot);
    r.closed_form = must_add(amount, must_mul(per_slot, k_slots));
    Amount a = amount;
    for (std::uint64_t i = 0; i < k_slots; ++i)
        a = must_add(a, chain_inflation(a, start_slot + i, start_slot + i + 1, params));
    r.stepped_exact = a;
    return r;
}

namespace {

std::uint64_t digest_to_u64(const Digest& d) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return v;
}

Digest bonus_seed_hash(const Digest& secret, const Digest& predecessor_vrf, std::uint64_t slot) {
    std::vector<std::uint8_t> seed(predecessor_vrf.begin(), predecessor_vrf.end());
    for (int i = 0; i < 8; ++i) seed.push_back(std::uint8_t(slot >> (8 * i)));
    return keyed_hash(secret, seed);
}

}  // namespace

BranchBonus evaluate_branch_bonus(const Digest& secret, const Digest& predecessor_vrf,
                                  std::uint64_t slot, const LedgerParams& params) {
    BranchBonus b;
    b.seed_pred = predecessor_vrf;
    b.slot = slot;
    b.rnd = bonus_seed_hash(secret, predecessor_vrf, slot);
    b.proof = b.rnd;
    if (params.bonus_mode == BonusMode::Constant) {
        b.bonus = params.max_branch_bonus;
    } else {
        b.bonus = digest_to_u64(b.rnd) % (params.max_branch_bonus + 1);
    }
    return b;
}

bool verify_branch_bonus(const Address& sender, const Digest& predecessor_vrf, std::uint64_t slot,
                         const Digest& claimed_rnd, Amount claimed_bonus,
                         const LedgerParams& params, const IdentityRegistry& registry) {
    auto secret = registry.secret_of(sender);
    if (!secret) return false;
    Digest rnd = bonus_seed_hash(*secret, predecessor_vrf, slot);
    if (rnd != claimed_rnd) return false;
    if (params.bonus_mode == BonusMode::Constant) return claimed_bonus == params.max_branch_bonus;
    return claimed_bonus == digest_to_u64(rnd) % (params.max_branch_bonus + 1);
}

}  // namespace tanglesim
