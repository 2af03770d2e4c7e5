#pragma once

#include <map>
#include <vector>

#include "tanglesim/validate.hpp"

namespace tanglesim {

// A ledger state is the set of unspent outputs plus bookkeeping derived from
// it. Value semantics throughout: apply() never mutates its input state.
struct LedgerState {
    std::map<OutputId, Output> outputs;
    std::map<ChainId, OutputId> chain_tips;
    std::uint64_t slot = 0;           // slot of the committing branch
    std::int64_t minted = 0;          // cumulative inflation actually minted

    bool contains(const OutputId& id) const { return outputs.count(id) != 0; }
    const Output* find(const OutputId& id) const;

    Amount total_amount() const;
    Digest commitment() const;
};

// Applies the transaction in place. Checks that every input is present and
// that amounts stay in range; full validity is the caller's concern.
Verdict apply_in_place(LedgerState& state, const Transaction& tx);

inline LedgerState apply(const LedgerState& state, const Transaction& tx,
                         Verdict* verdict = nullptr) {
    LedgerState next = state;
    Verdict v = apply_in_place(next, tx);
    if (verdict) *verdict = v;
    return v.ok() ? next : state;
}

Amount min_storage_deposit(std::size_t output_byte_size, const LedgerParams& params);

// Genesis: all outputs live under the all-zero transaction id.
LedgerState make_genesis(const LedgerParams& params, const std::vector<Output>& outputs);

Output make_genesis_stem();

}  // namespace tanglesim
