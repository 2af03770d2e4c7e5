#pragma once

#include <random>
#include <string>

#include "tanglesim/tangle.hpp"

namespace tanglesim {

// One scheduler beat of an agent: transactions to submit now, plus the next
// wake time in ledger ticks (0 = the agent is done).
struct AgentStep {
    std::vector<Transaction> txs;
    bool withhold = false;        // attach locally, do not gossip
    std::vector<TxId> release;    // previously withheld transactions to gossip now
    std::uint64_t next_wake_ticks = 0;
};

class Agent {
  public:
    virtual ~Agent() = default;
    virtual AgentStep step(std::uint64_t now_ticks) = 0;
    virtual const std::string& name() const = 0;
    virtual const Address& address() const = 0;
    virtual std::uint64_t first_wake_ticks() const = 0;
    virtual void set_view(const UtxoTangle* view) { view_ = view; }

  protected:
    const UtxoTangle* view_ = nullptr;
};

struct SequencerConfig {
    std::string name;
    Amount amount = 0;                       // genesis grant on the chain origin
    std::uint64_t milestone_pace_ticks = 8;  // strategy pace, >= validity pace
    std::uint32_t endorse_fanout = 1;        // P
    Amount min_tag_along_fee = 0;
    std::uint64_t branch_window_ticks = 16;
    std::uint64_t max_ahead_ticks = 64;
    std::size_t max_candidates_per_beat = 32;
    std::size_t max_tag_alongs_per_tx = 8;
    std::uint64_t freeze_slots = 50;
    std::uint32_t margin_percent = 10;       // share of freeze inflation the sequencer keeps
};

// The generic sequencer strategy: decide a timestamp target, enumerate input
// selections heaviest-first, keep the best-coverage candidate, emit at the
// target's real time; on slot boundaries contend for the branch.
class SequencerAgent : public Agent {
  public:
    SequencerAgent(SequencerConfig cfg, KeyPair key, OutputId genesis_output,
                   const LedgerParams& params);

    AgentStep step(std::uint64_t now_ticks) override;
    const std::string& name() const override { return cfg_.name; }
    const Address& address() const override { return key_.id; }
    std::uint64_t first_wake_ticks() const override { return kTicksPerSlot; }

    const ChainId& chain_id() const { return chain_; }
    const KeyPair& keypair() const { return key_; }

    // Exposed for tests and for the adversary wrapper.
    std::uint64_t decide_timestamp_target(std::uint64_t now_ticks,
                                          std::uint64_t prev_target) const;
    std::optional<Transaction> make_branch(std::uint64_t boundary_ticks);
    std::optional<Transaction> make_milestone(std::uint64_t target_ticks);

  private:
    struct OwnMilestone {
        TxId tx;
        OutputId output;
        std::uint64_t ticks = 0;
        Amount amount = 0;
        TxId baseline{};
    };

    std::optional<OutputId> own_tip_in(const BranchRecord& rec) const;
    void note_emission(const Transaction& tx, const TxId& baseline = {});
    Transaction assemble_milestone(const OutputId& pred_id, const Output& pred,
                                   std::uint64_t target_ticks, const std::vector<TxId>& endorse,
                                   const std::vector<OutputId>& extra) const;

    SequencerConfig cfg_;
    KeyPair key_;
    LedgerParams params_;
    ChainId chain_{};
    std::uint64_t prev_target_ = 0;
    std::vector<OwnMilestone> history_;
};

struct TransferOrder {
    std::uint64_t at_slot = 0;
    Address to{};
    Amount amount = 0;
    ChainId tag_along_target{};
    Amount fee = 0;
};

struct DelegationOrder {
    std::uint64_t at_slot = 0;
    ChainId target{};
    Amount amount = 0;
    Amount inflation_advance = 0;
    std::uint32_t max_freeze_slots = 0;
};

enum class SpamMode { None, Pace, Dust, Rate };

struct SpamOrder {
    SpamMode mode = SpamMode::None;
    std::uint64_t at_slot = 0;
    std::size_t count = 0;
};

struct WalletConfig {
    std::string name;
    Amount amount = 0;
    std::vector<TransferOrder> transfers;
    std::optional<DelegationOrder> delegation;
    SpamOrder spam;
};

class WalletAgent : public Agent {
  public:
    WalletAgent(WalletConfig cfg, KeyPair key, OutputId genesis_output,
                const LedgerParams& params, std::uint64_t rng_seed);

    AgentStep step(std::uint64_t now_ticks) override;
    const std::string& name() const override { return cfg_.name; }
    const Address& address() const override { return key_.id; }
    std::uint64_t first_wake_ticks() const override;

    // Three-output transfer: recipient, tag-along fee, remainder.
    std::optional<Transaction> wallet_transfer(const TransferOrder& order,
                                               std::uint64_t now_ticks);

  private:
    std::uint64_t next_due_slot() const;
    std::vector<Transaction> build_spam(std::uint64_t now_ticks);

    WalletConfig cfg_;
    KeyPair key_;
    LedgerParams params_;
    std::vector<std::pair<OutputId, Output>> spendable_;
    std::uint64_t last_own_ticks_ = 0;
    std::size_t next_transfer_ = 0;
    bool delegated_ = false;
    bool spammed_ = false;
    std::mt19937_64 rng_;
};

struct AdversaryConfig {
    SequencerConfig sequencer;
    std::uint64_t fork_slot = 0;     // first slot boundary built privately
    std::uint64_t release_slot = 0;  // boundary at which the private chain is published
};

// Long-range / double-spend adversary: cooperates until the fork slot, then
// builds a private branch chain from the pre-fork state and releases it later.
// All of its transactions are protocol-legal.
class AdversaryAgent : public Agent {
  public:
    AdversaryAgent(AdversaryConfig cfg, KeyPair key, OutputId genesis_output,
                   const LedgerParams& params);

    AgentStep step(std::uint64_t now_ticks) override;
    const std::string& name() const override { return inner_.name(); }
    const Address& address() const override { return inner_.address(); }
    std::uint64_t first_wake_ticks() const override { return inner_.first_wake_ticks(); }
    void set_view(const UtxoTangle* view) override;

  private:
    std::optional<Transaction> private_branch(std::uint64_t boundary_ticks);

    AdversaryConfig cfg_;
    SequencerAgent inner_;
    LedgerParams params_;
    std::uint64_t prev_target_ = 0;
    std::vector<TxId> withheld_;
    bool released_ = false;
    // Private lineage tip: the milestone/stem the next private branch extends.
    std::optional<OutputId> priv_milestone_;
    std::optional<OutputId> priv_stem_;
    Output priv_milestone_out_;
    Output priv_stem_out_;
};

}  // namespace tanglesim
