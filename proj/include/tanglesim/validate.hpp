#pragma once

#include <span>
#include <string>

#include "tanglesim/identity.hpp"
#include "tanglesim/inflation.hpp"
#include "tanglesim/params.hpp"
#include "tanglesim/tx.hpp"

namespace tanglesim {

enum class TxError {
    None = 0,
    Shape,              // syntactic composition
    Pace,               // timestamp too close to an input or endorsement target
    Balance,            // output sum exceeds input sum plus declared inflation, or overflow
    InflationExcess,    // declared inflation above entitlement, or bad VRF claim
    Signature,          // signature stand-in does not verify
    EndorsementRule,    // endorsement by non-sequencer or across slots
    StorageDeposit,     // produced output below the per-byte minimum
    LockViolation,      // some consumed output's lock rejects the consumption
    DuplicateSuccessor, // more than one successor for a consumed chain
    MissingSuccessor,   // consumed chain neither extended nor terminated
    SequencerRule,      // sequencer/branch structural constraints
    BaselineRule,       // no baseline per the three sequencer baseline rules
    MissingInput,       // input absent from the ledger state (apply)
    Conflict,           // double spend in the consolidated past cone (tangle)
    BadParent,          // depends on a rejected transaction (tangle)
};

const char* to_string(TxError e);

struct Verdict {
    TxError code = TxError::None;
    std::string detail;

    bool ok() const { return code == TxError::None; }
    static Verdict pass() { return {}; }
    static Verdict fail(TxError c, std::string d = {}) { return {c, std::move(d)}; }
};

// An input together with the output it references. The producing transaction's
// timestamp is recoverable from the output id prefix.
struct ResolvedInput {
    OutputId id;
    Output output;

    Timestamp timestamp() const { return Timestamp{id.tx.ticks()}; }
    ChainId chain_id() const { return effective_chain_id(id, *output.chain); }
};

// Consumed-context lock evaluation: may the transaction consume input
// `input_index`? Boolean verdict, never throws.
bool evaluate_lock(const Transaction& tx, std::span<const ResolvedInput> inputs,
                   std::size_t input_index, const LedgerParams& params);

// Produced-context checks for one output (creation-slot stamps, covenant
// fields that must be set at birth).
bool evaluate_lock_produced(const Transaction& tx, std::span<const ResolvedInput> inputs,
                            std::size_t output_index, const LedgerParams& params);

Verdict validate_chain_transition(const Transaction& tx, std::span<const ResolvedInput> inputs);

Verdict validate_sequencer_rules(const Transaction& tx, std::span<const ResolvedInput> inputs,
                                 const LedgerParams& params);

// The full transaction-level validity check (shape, signature, pace, balance,
// inflation entitlements, storage deposit, locks, chain transitions, sequencer
// rules). Past-cone properties (conflicts, baseline resolution) live in the
// tangle module.
Verdict validate_transaction(const Transaction& tx, std::span<const ResolvedInput> inputs,
                             const LedgerParams& params, const IdentityRegistry& registry);

}  // namespace tanglesim
