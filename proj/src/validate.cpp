#include "tanglesim/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tanglesim {

const char* to_string(TxError e) {
    switch (e) {
        case TxError::None: return "ok";
        case TxError::Shape: return "shape";
        case TxError::Pace: return "pace";
        case TxError::Balance: return "balance";
        case TxError::InflationExcess: return "inflation-excess";
        case TxError::Signature: return "signature";
        case TxError::EndorsementRule: return "endorsement-rule";
        case TxError::StorageDeposit: return "storage-deposit";
        case TxError::LockViolation: return "lock-violation";
        case TxError::DuplicateSuccessor: return "duplicate-successor";
        case TxError::MissingSuccessor: return "missing-successor";
        case TxError::SequencerRule: return "sequencer-rule";
        case TxError::BaselineRule: return "baseline-rule";
        case TxError::MissingInput: return "missing-input";
        case TxError::Conflict: return "conflict";
        case TxError::BadParent: return "bad-parent";
    }
    return "unknown";
}

namespace {

// Does the transaction consume a chained output with the given (effective) id?
bool consumes_chain(std::span<const ResolvedInput> inputs, const ChainId& target) {
    for (const ResolvedInput& in : inputs)
        if (in.output.chain && in.chain_id() == target) return true;
    return false;
}

const Output* find_successor(const Transaction& tx, const TxId& tx_id, const ChainId& chain) {
    for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
        const Output& o = tx.outputs[i];
        if (!o.chain) continue;
        ChainId c = effective_chain_id(OutputId{tx_id, std::uint16_t(i)}, *o.chain);
        if (c == chain) return &o;
    }
    return nullptr;
}

bool delegation_frozen(const DelegationLock& l, std::uint64_t slot) {
    return l.freeze_until_slot && slot < *l.freeze_until_slot;
}

bool delegation_in_revocation_window(const DelegationLock& l, std::uint64_t slot,
                                     const LedgerParams& params) {
    return l.freeze_until_slot && slot >= *l.freeze_until_slot &&
           slot < *l.freeze_until_slot + params.revocation_window_slots;
}

// Sequencer-side delegation transitions. The successor must keep the covenant
// fields; only the freeze state and the deposited amount may change.
bool delegation_sequencer_transition_ok(const DelegationLock& pred, const Output& pred_out,
                                        const Output& succ, std::uint64_t slot, bool frozen,
                                        const LedgerParams& params) {
    const DelegationLock* next = std::get_if<DelegationLock>(&succ.lock);
    if (!next) return false;
    if (next->owner != pred.owner || next->target != pred.target ||
        next->inflation_advance != pred.inflation_advance ||
        next->max_freeze_slots != pred.max_freeze_slots)
        return false;
    if (frozen) {
        // Unfreeze: the revocation window starts at the current slot.
        if (!next->freeze_until_slot || *next->freeze_until_slot != slot) return false;
        return succ.amount >= pred_out.amount;
    }
    // Freeze: bounded duration, inflation advance deposited up front.
    if (!next->freeze_until_slot) return false;
    std::uint64_t until = *next->freeze_until_slot;
    if (until <= slot) return false;
    std::uint64_t duration = until - slot;
    if (duration > pred.max_freeze_slots || duration > params.max_freeze_slots) return false;
    auto min_amount = checked_add(pred_out.amount, pred.inflation_advance);
    return min_amount && succ.amount >= *min_amount;
}

}  // namespace

bool evaluate_lock(const Transaction& tx, std::span<const ResolvedInput> inputs,
                   std::size_t input_index, const LedgerParams& params) {
    if (input_index >= inputs.size()) return false;
    const ResolvedInput& in = inputs[input_index];
    const std::uint64_t slot = tx.timestamp.slot();

    return std::visit(
        [&](const auto& lock) -> bool {
            using L = std::decay_t<decltype(lock)>;
            if constexpr (std::is_same_v<L, AddressLock>) {
                return tx.sender == lock.address;
            } else if constexpr (std::is_same_v<L, ChainLock>) {
                return consumes_chain(inputs, lock.target);
            } else if constexpr (std::is_same_v<L, StemLock>) {
                return tx.is_branch();
            } else if constexpr (std::is_same_v<L, TagAlongLock>) {
                if (slot < lock.creation_slot) return false;
                std::uint64_t age = slot - lock.creation_slot;
                if (age < params.tag_along_sequencer_window_slots)
                    return consumes_chain(inputs, lock.target);
                if (age < params.tag_along_sequencer_window_slots +
                              params.tag_along_sender_window_slots)
                    return tx.sender == lock.sender;
                return true;  // dust: consumable by anyone
            } else {
                static_assert(std::is_same_v<L, DelegationLock>);
                TxId id = compute_tx_id(tx);
                if (delegation_frozen(lock, slot)) {
                    if (!consumes_chain(inputs, lock.target)) return false;
                    const Output* succ = in.output.chain
                                             ? find_successor(tx, id, in.chain_id())
                                             : nullptr;
                    return succ && delegation_sequencer_transition_ok(lock, in.output, *succ,
                                                                      slot, true, params);
                }
                if (delegation_in_revocation_window(lock, slot, params))
                    return tx.sender == lock.owner;
                // Free state: the owner may do anything; the target sequencer
                // may only freeze.
                if (tx.sender == lock.owner) return true;
                if (!consumes_chain(inputs, lock.target)) return false;
                const Output* succ =
                    in.output.chain ? find_successor(tx, id, in.chain_id()) : nullptr;
                return succ && delegation_sequencer_transition_ok(lock, in.output, *succ, slot,
                                                                  false, params);
            }
        },
        in.output.lock);
}

bool evaluate_lock_produced(const Transaction& tx, std::span<const ResolvedInput> inputs,
                            std::size_t output_index, const LedgerParams& params) {
    const Output& out = tx.outputs[output_index];
    if (const auto* tal = std::get_if<TagAlongLock>(&out.lock)) {
        return tal->creation_slot == tx.timestamp.slot();
    }
    if (const auto* del = std::get_if<DelegationLock>(&out.lock)) {
        if (del->max_freeze_slots == 0 || del->max_freeze_slots > params.max_freeze_slots)
            return false;
        if (del->freeze_until_slot) {
            // A frozen delegation output can only be born as a successor of a
            // consumed delegation output of the same chain.
            if (!out.chain || out.chain->is_origin) return false;
            for (const ResolvedInput& in : inputs)
                if (in.output.chain && std::holds_alternative<DelegationLock>(in.output.lock) &&
                    in.chain_id() == out.chain->id)
                    return true;
            return false;
        }
    }
    return true;
}

Verdict validate_chain_transition(const Transaction& tx, std::span<const ResolvedInput> inputs) {
    TxId id = compute_tx_id(tx);

    std::map<ChainId, std::size_t> consumed;  // chain id -> input index
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!inputs[i].output.chain) continue;
        auto [it, fresh] = consumed.emplace(inputs[i].chain_id(), i);
        if (!fresh)
            return Verdict::fail(TxError::DuplicateSuccessor,
                                 "two consumed outputs carry the same chain id");
    }

    std::map<ChainId, std::size_t> produced;  // chain id -> output index
    for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
        const Output& o = tx.outputs[i];
        if (!o.chain) continue;
        ChainId c = effective_chain_id(OutputId{id, std::uint16_t(i)}, *o.chain);
        auto [it, fresh] = produced.emplace(c, i);
        if (!fresh) return Verdict::fail(TxError::DuplicateSuccessor, "duplicate successor");
        if (!o.chain->is_origin && !consumed.count(c))
            return Verdict::fail(TxError::Shape, "successor without consumed predecessor");
    }

    for (const auto& [c, i] : consumed) {
        bool terminated = tx.inputs[i].terminate_chain;
        bool has_succ = produced.count(c) != 0;
        if (terminated && has_succ)
            return Verdict::fail(TxError::DuplicateSuccessor,
                                 "successor produced for a terminated chain");
        if (!terminated && !has_succ)
            return Verdict::fail(TxError::MissingSuccessor, "chain neither extended nor terminated");
    }
    return Verdict::pass();
}

Verdict validate_sequencer_rules(const Transaction& tx, std::span<const ResolvedInput> inputs,
                                 const LedgerParams& params) {
    auto seq_idx = tx.sequencer_output_index();
    if (!seq_idx) return Verdict::pass();

    const Output& milestone = tx.outputs[*seq_idx];
    if (milestone.amount < params.min_sequencer_amount)
        return Verdict::fail(TxError::SequencerRule, "milestone below minimum sequencer amount");

    std::size_t stem_inputs = 0;
    for (const ResolvedInput& in : inputs)
        if (in.output.stem) ++stem_inputs;
    bool has_stem_output = tx.stem_output_index().has_value();

    if (tx.is_branch()) {
        if (!tx.endorsements.empty())
            return Verdict::fail(TxError::SequencerRule, "branch must not endorse");
        if (stem_inputs != 1)
            return Verdict::fail(TxError::SequencerRule, "branch must consume exactly one stem");
        if (!has_stem_output)
            return Verdict::fail(TxError::SequencerRule, "branch must produce exactly one stem");
        return Verdict::pass();
    }

    if (stem_inputs != 0)
        return Verdict::fail(TxError::SequencerRule, "only branches consume stems");
    if (has_stem_output)
        return Verdict::fail(TxError::SequencerRule, "only branches produce stems");

    // Baseline rules (b)/(c), structural part: a chain predecessor in the same
    // slot or at least one (same-slot) endorsement.
    if (!tx.endorsements.empty()) return Verdict::pass();
    if (milestone.chain && !milestone.chain->is_origin) {
        for (const ResolvedInput& in : inputs) {
            if (!in.output.chain) continue;
            if (in.chain_id() == milestone.chain->id &&
                in.timestamp().slot() == tx.timestamp.slot())
                return Verdict::pass();
        }
    }
    return Verdict::fail(TxError::BaselineRule,
                         "no same-slot chain predecessor and no endorsement");
}

namespace {

Verdict check_shape(const Transaction& tx, std::span<const ResolvedInput> inputs,
                    const LedgerParams& params) {
    if (tx.inputs.empty()) return Verdict::fail(TxError::Shape, "no inputs");
    if (tx.outputs.empty()) return Verdict::fail(TxError::Shape, "no outputs");
    if (tx.inputs.size() != inputs.size())
        return Verdict::fail(TxError::Shape, "unresolved inputs");
    if (tx.outputs.size() > 0xffff) return Verdict::fail(TxError::Shape, "too many outputs");

    std::set<OutputId> seen;
    for (const TxInput& in : tx.inputs)
        if (!seen.insert(in.id).second) return Verdict::fail(TxError::Shape, "duplicate input");

    if (tx.endorsements.size() > params.max_endorsements)
        return Verdict::fail(TxError::Shape, "too many endorsements");
    std::set<TxId> eseen;
    for (const TxId& e : tx.endorsements)
        if (!eseen.insert(e).second) return Verdict::fail(TxError::Shape, "duplicate endorsement");

    std::size_t sequencer_outputs = 0, stem_outputs = 0;
    for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
        const Output& o = tx.outputs[i];
        bool is_stem_lock = std::holds_alternative<StemLock>(o.lock);
        if (o.stem != is_stem_lock)
            return Verdict::fail(TxError::Shape, "stem flag and stem lock must agree");
        if (o.stem && o.amount != 0)
            return Verdict::fail(TxError::Shape, "stem output must have zero amount");
        if (o.sequencer && o.stem)
            return Verdict::fail(TxError::Shape, "output cannot be both milestone and stem");
        if (o.sequencer && !o.chain)
            return Verdict::fail(TxError::Shape, "sequencer milestone must be chained");
        if (o.sequencer && !o.vrf_value)
            return Verdict::fail(TxError::Shape, "sequencer milestone must carry a vrf value");
        if (o.vrf_value && !o.sequencer)
            return Verdict::fail(TxError::Shape, "vrf value only on sequencer milestones");
        if (o.chain && o.chain->is_origin && o.chain->id != ChainId{})
            return Verdict::fail(TxError::Shape, "chain origin must carry a zero chain id");
        if (o.sequencer) ++sequencer_outputs;
        if (o.stem) ++stem_outputs;
        if (!evaluate_lock_produced(tx, inputs, i, params))
            return Verdict::fail(TxError::Shape, "produced output violates its lock constraints");
    }
    if (sequencer_outputs > 1)
        return Verdict::fail(TxError::Shape, "more than one sequencer milestone");
    if (stem_outputs > 1) return Verdict::fail(TxError::Shape, "more than one stem output");
    return Verdict::pass();
}

Verdict check_pace(const Transaction& tx, std::span<const ResolvedInput> inputs,
                   const LedgerParams& params) {
    std::uint64_t pace =
        tx.is_sequencer_tx() ? params.sequencer_pace_ticks : params.user_pace_ticks;
    for (const ResolvedInput& in : inputs) {
        if (in.timestamp().ticks + pace > tx.timestamp.ticks)
            return Verdict::fail(TxError::Pace, "input too recent for the transaction pace");
    }
    for (const TxId& e : tx.endorsements) {
        if (e.ticks() + pace > tx.timestamp.ticks)
            return Verdict::fail(TxError::Pace, "endorsement target too recent");
    }
    return Verdict::pass();
}

Verdict check_endorsements(const Transaction& tx, const LedgerParams&) {
    if (tx.endorsements.empty()) return Verdict::pass();
    if (!tx.is_sequencer_tx())
        return Verdict::fail(TxError::EndorsementRule,
                             "only sequencer transactions may endorse");
    for (const TxId& e : tx.endorsements) {
        if (Timestamp{e.ticks()}.slot() != tx.timestamp.slot())
            return Verdict::fail(TxError::EndorsementRule, "cross-slot endorsement");
    }
    return Verdict::pass();
}

Verdict check_balance(const Transaction& tx, std::span<const ResolvedInput> inputs) {
    Amount in_sum = 0, out_sum = 0, declared = 0;
    for (const ResolvedInput& in : inputs) {
        auto s = checked_add(in_sum, in.output.amount);
        if (!s) return Verdict::fail(TxError::Balance, "input amount overflow");
        in_sum = *s;
    }
    for (const Output& o : tx.outputs) {
        auto s = checked_add(out_sum, o.amount);
        if (!s) return Verdict::fail(TxError::Balance, "output amount overflow");
        out_sum = *s;
        auto d = checked_add(declared, o.declared_inflation);
        if (!d) return Verdict::fail(TxError::Balance, "declared inflation overflow");
        declared = *d;
    }
    auto allowed = checked_add(in_sum, declared);
    if (!allowed) return Verdict::fail(TxError::Balance, "balance overflow");
    if (out_sum > *allowed)
        return Verdict::fail(TxError::Balance, "outputs exceed inputs plus declared inflation");
    return Verdict::pass();
}

// Inflation entitlement per produced chained output, including the branch
// bonus claim on branch milestones and the VRF carry-forward rule.
Verdict check_inflation(const Transaction& tx, std::span<const ResolvedInput> inputs,
                        const LedgerParams& params, const IdentityRegistry& registry) {
    TxId id = compute_tx_id(tx);
    std::uint64_t slot = tx.timestamp.slot();

    for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
        const Output& o = tx.outputs[i];
        if (!o.chain) {
            if (o.declared_inflation != 0)
                return Verdict::fail(TxError::InflationExcess,
                                     "inflation declared on a non-chained output");
            continue;
        }
        ChainId c = effective_chain_id(OutputId{id, std::uint16_t(i)}, *o.chain);
        if (o.chain->is_origin) {
            if (o.declared_inflation != 0)
                return Verdict::fail(TxError::InflationExcess, "inflation on a chain origin");
            if (o.vrf_value && *o.vrf_value != Digest{})
                return Verdict::fail(TxError::InflationExcess,
                                     "chain origin must start with a zero vrf value");
            continue;
        }
        const ResolvedInput* pred = nullptr;
        for (const ResolvedInput& in : inputs)
            if (in.output.chain && in.chain_id() == c) {
                pred = &in;
                break;
            }
        if (!pred) return Verdict::fail(TxError::Shape, "successor without predecessor");

        Amount entitled =
            chain_inflation(pred->output.amount, pred->timestamp().slot(), slot, params);
        Digest pred_vrf = pred->output.vrf_value.value_or(Digest{});

        if (o.sequencer && tx.is_branch()) {
            // Branch milestone: the vrf value is the enforced lottery draw.
            Amount chain_part = entitled;
            if (o.declared_inflation > chain_part) {
                Amount bonus_claim = o.declared_inflation - chain_part;
                if (!verify_branch_bonus(tx.sender, pred_vrf, slot, *o.vrf_value, bonus_claim,
                                         params, registry))
                    return Verdict::fail(TxError::InflationExcess, "branch bonus claim rejected");
            } else {
                // Claiming no bonus is allowed, the draw must still be honest.
                auto secret = registry.secret_of(tx.sender);
                BranchBonus expect =
                    secret ? evaluate_branch_bonus(*secret, pred_vrf, slot, params) : BranchBonus{};
                if (!secret || expect.rnd != *o.vrf_value)
                    return Verdict::fail(TxError::InflationExcess, "branch vrf value rejected");
            }
        } else if (o.sequencer) {
            // Mid-slot milestone: carry the chain's latest branch vrf forward.
            if (*o.vrf_value != pred_vrf)
                return Verdict::fail(TxError::InflationExcess,
                                     "milestone must carry the predecessor vrf value");
            if (o.declared_inflation > entitled)
                return Verdict::fail(TxError::InflationExcess, "declared above entitlement");
        } else {
            if (o.declared_inflation > entitled)
                return Verdict::fail(TxError::InflationExcess, "declared above entitlement");
        }
    }
    return Verdict::pass();
}

Verdict check_storage_deposit(const Transaction& tx, const LedgerParams& params) {
    for (const Output& o : tx.outputs) {
        if (std::holds_alternative<TagAlongLock>(o.lock) ||
            std::holds_alternative<StemLock>(o.lock))
            continue;  // deposit-exempt by design
        auto need = checked_mul(serialized_output_size(o), params.storage_deposit_per_byte);
        if (!need || o.amount < *need)
            return Verdict::fail(TxError::StorageDeposit, "output below storage deposit");
    }
    return Verdict::pass();
}

}  // namespace

Verdict validate_transaction(const Transaction& tx, std::span<const ResolvedInput> inputs,
                             const LedgerParams& params, const IdentityRegistry& registry) {
    if (Verdict v = check_shape(tx, inputs, params); !v.ok()) return v;
    if (!registry.verify_signature(tx))
        return Verdict::fail(TxError::Signature, "signature does not verify");
    if (Verdict v = check_pace(tx, inputs, params); !v.ok()) return v;
    if (Verdict v = check_endorsements(tx, params); !v.ok()) return v;
    if (Verdict v = check_balance(tx, inputs); !v.ok()) return v;
    if (Verdict v = check_inflation(tx, inputs, params, registry); !v.ok()) return v;
    if (Verdict v = check_storage_deposit(tx, params); !v.ok()) return v;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!evaluate_lock(tx, inputs, i, params))
            return Verdict::fail(TxError::LockViolation,
                                 "input " + std::to_string(i) + " not unlockable");
    }
    if (Verdict v = validate_chain_transition(tx, inputs); !v.ok()) return v;
    if (Verdict v = validate_sequencer_rules(tx, inputs, params); !v.ok()) return v;
    return Verdict::pass();
}

}  // namespace tanglesim
