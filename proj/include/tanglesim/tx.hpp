#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "tanglesim/amount.hpp"
#include "tanglesim/base.hpp"
#include "tanglesim/ledgertime.hpp"

namespace tanglesim {

// The closed set of lock constraints. There is no script engine; each lock's
// unlock rules are built in (see validate.hpp).

struct AddressLock {
    Address address{};
    bool operator==(const AddressLock&) const = default;
};

struct ChainLock {
    ChainId target{};
    bool operator==(const ChainLock&) const = default;
};

// Keyless, always zero amount; consumable only by a branch transaction.
struct StemLock {
    bool operator==(const StemLock&) const = default;
};

struct TagAlongLock {
    ChainId target{};
    Address sender{};
    std::uint32_t creation_slot = 0;
    bool operator==(const TagAlongLock&) const = default;
};

struct DelegationLock {
    Address owner{};
    ChainId target{};
    std::optional<std::uint64_t> freeze_until_slot;  // set once the output has been frozen
    Amount inflation_advance = 0;                    // minimum deposit required per freeze
    std::uint32_t max_freeze_slots = 0;              // owner-set bound on one freeze period
    bool operator==(const DelegationLock&) const = default;
};

using Lock = std::variant<AddressLock, ChainLock, StemLock, TagAlongLock, DelegationLock>;

struct ChainConstraint {
    ChainId id{};          // all-zero on origin outputs; the real id derives from the output id
    bool is_origin = false;
    bool operator==(const ChainConstraint&) const = default;
};

struct Output {
    Amount amount = 0;
    Lock lock = AddressLock{};
    std::optional<ChainConstraint> chain;
    bool sequencer = false;
    bool stem = false;
    Amount declared_inflation = 0;       // chain inflation + branch bonus claimed by the producing tx
    std::optional<Digest> vrf_value;     // sequencer milestones carry the chain's latest branch VRF

    bool operator==(const Output&) const = default;
};

// Chain ids are minted from the origin output's id.
ChainId derive_chain_id(const OutputId& origin);

inline ChainId effective_chain_id(const OutputId& id, const ChainConstraint& c) {
    return c.is_origin ? derive_chain_id(id) : c.id;
}

struct TxInput {
    OutputId id;
    bool terminate_chain = false;  // unlock flag: end the consumed chain instead of extending it

    bool operator==(const TxInput&) const = default;
};

struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<Output> outputs;
    std::vector<TxId> endorsements;
    Timestamp timestamp;
    Address sender{};
    Digest signature{};

    bool operator==(const Transaction&) const = default;

    // Index of the (single) sequencer milestone output, if any.
    std::optional<std::size_t> sequencer_output_index() const;
    std::optional<std::size_t> stem_output_index() const;
    bool is_sequencer_tx() const { return sequencer_output_index().has_value(); }
    bool is_branch() const { return is_sequencer_tx() && timestamp.on_slot_boundary(); }
};

// Canonical serialization (documented in docs/FORMATS.md). The body excludes
// the signature; the full form appends it.
std::vector<std::uint8_t> serialize_body(const Transaction& tx);
std::vector<std::uint8_t> serialize_full(const Transaction& tx);
std::vector<std::uint8_t> serialize_output(const Output& out);
std::size_t serialized_output_size(const Output& out);

TxId compute_tx_id(const Transaction& tx);

}  // namespace tanglesim
