#pragma once

#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tanglesim/ledger.hpp"

namespace tanglesim {

enum class VertexStatus { Pending, Valid, Rejected };

const char* to_string(VertexStatus s);

struct Vertex {
    Transaction tx;
    TxId id{};
    VertexStatus status = VertexStatus::Pending;
    TxError reject_code = TxError::None;
    std::string reject_detail;

    // Resolved at validation time for sequencer transactions.
    std::optional<TxId> baseline;          // baseline branch
    std::optional<TxId> stem_predecessor;  // branches only
    std::optional<Amount> delta;
    std::optional<Amount> coverage;
    std::vector<OutputId> rooted;          // sorted

    std::set<TxId> children;               // consumers and endorsers
    std::size_t waiting = 0;               // unresolved parents while pending

    std::uint64_t slot() const { return tx.timestamp.slot(); }
    bool is_branch() const { return tx.is_branch(); }
};

// Set of transactions committed by a branch, as a delta chained to the
// predecessor's set.
struct IncludedSet {
    std::unordered_set<TxId, TxIdHash> delta;
    std::shared_ptr<const IncludedSet> parent;

    bool contains(const TxId& id) const {
        for (const IncludedSet* s = this; s; s = s->parent.get())
            if (s->delta.count(id)) return true;
        return false;
    }
};

struct BranchRecord {
    TxId branch{};      // all-zero for the genesis record
    TxId stem_pred{};
    std::uint64_t slot = 0;
    OutputId stem_output;               // the stem this branch produced
    OutputId milestone;                 // the sequencer output this branch produced
    bool has_milestone = false;         // false only for the genesis record
    LedgerState state;                  // committed state including the branch mutation
    std::shared_ptr<const IncludedSet> included;
    Amount delta = 0;
    Amount coverage = 0;
    // Frozen delegation outputs sitting in `state`, with their target chains.
    std::vector<std::pair<OutputId, ChainId>> frozen;
};

struct AttachResult {
    TxId id{};
    VertexStatus status = VertexStatus::Pending;
    TxError code = TxError::None;
    std::string detail;
    bool duplicate = false;
    std::vector<TxId> missing;      // unresolved parents worth pulling
    std::vector<TxId> newly_valid;  // vertices validated by this attachment (incl. itself)
};

struct CandidateEval {
    Verdict verdict;
    TxId id{};
    std::optional<TxId> baseline;
    Amount delta = 0;
    Amount coverage = 0;

    bool ok() const { return verdict.ok(); }
};

struct PruneStats {
    std::size_t vertices = 0;
    std::size_t branches = 0;
};

struct TangleStats {
    std::size_t valid = 0;
    std::size_t rejected = 0;
    std::size_t pending = 0;
    std::unordered_map<int, std::size_t> rejected_by_code;
};

// The multi-ledger DAG. Single writer: attach() calls must be serialized by
// the caller; const queries may run concurrently between attachments.
class UtxoTangle {
  public:
    UtxoTangle(LedgerParams params, LedgerState genesis,
               std::shared_ptr<const IdentityRegistry> registry);

    AttachResult attach(const Transaction& tx);

    // Evaluates a candidate without inserting it: full validation, baseline
    // resolution, conflict check, coverage.
    CandidateEval evaluate_candidate(const Transaction& tx) const;

    const Vertex* find(const TxId& id) const;
    const Transaction* raw(const TxId& id) const;

    // All vertices reachable over consumption and endorsement edges,
    // including the start vertex. With stop_at_baseline the walk ends at
    // outputs found in the baseline state.
    std::vector<TxId> past_cone(const TxId& id, bool stop_at_baseline) const;

    // Brute-force conflict test over the union of the two full past cones.
    bool is_conflicting(const TxId& a, const TxId& b) const;

    std::optional<TxId> baseline_of(const TxId& id) const;
    std::vector<OutputId> rooted_set(const TxId& id) const;
    Amount coverage_delta(const TxId& id) const;
    Amount coverage_of(const TxId& id) const;

    std::optional<TxId> preferred_branch(std::uint64_t slot) const;
    std::vector<TxId> branches_at(std::uint64_t slot) const;
    std::optional<std::uint64_t> latest_branch_slot() const;
    const BranchRecord* branch_record(const TxId& id) const;
    const BranchRecord& genesis_record() const;

    bool is_included(const TxId& tx_id, const TxId& branch_id) const;

    PruneStats prune(const std::vector<TxId>& keep_chain, std::uint64_t horizon_slots);

    // Drops pending vertices older than the given slot.
    std::size_t expire_pending(std::uint64_t before_slot);

    // Valid sequencer transactions of a slot, heaviest first (coverage, id).
    std::vector<TxId> sequencer_txs_in_slot(std::uint64_t slot) const;

    // Outputs of valid vertices with a tag-along (resp. delegation) lock
    // targeting the chain, not yet consumed by any valid vertex.
    std::vector<OutputId> tag_along_outputs(const ChainId& target) const;
    std::vector<OutputId> delegation_outputs(const ChainId& target) const;
    const Output* output_of(const OutputId& id) const;

    std::vector<TxId> heads() const;            // valid vertices without valid children
    std::vector<TxId> wanted_parents() const;   // parents pending vertices wait for

    const LedgerParams& params() const { return params_; }
    const LedgerState& genesis_state() const { return genesis_record_.state; }
    const IdentityRegistry& registry() const { return *registry_; }
    TangleStats stats() const;

    std::string dump() const;

  private:
    struct Analyzed {
        Verdict verdict;
        std::optional<TxId> baseline;
        std::optional<TxId> stem_pred;
        std::vector<OutputId> rooted;
        Amount delta = 0;
        Amount coverage = 0;
        std::vector<const Vertex*> cone;  // uncommitted cone, including the root placeholder
    };

    bool resolve_inputs(const Transaction& tx, std::vector<ResolvedInput>& out,
                        std::vector<TxId>* missing) const;
    Analyzed analyze(const Transaction& tx, const TxId& id,
                     std::span<const ResolvedInput> inputs) const;
    void validate_now(Vertex& v, std::vector<TxId>& newly_valid);
    void finalize_status(Vertex& v, std::vector<TxId>& newly_valid);
    void make_branch_record(const Vertex& v, const Analyzed& a);
    const BranchRecord* record_of(const TxId& id) const;

    LedgerParams params_;
    std::shared_ptr<const IdentityRegistry> registry_;
    BranchRecord genesis_record_;

    std::unordered_map<TxId, std::unique_ptr<Vertex>, TxIdHash> vertices_;
    std::unordered_map<OutputId, std::vector<TxId>, OutputIdHash> consumers_;
    std::unordered_map<TxId, BranchRecord, TxIdHash> records_;
    std::map<std::uint64_t, std::vector<TxId>> branches_by_slot_;
    std::map<std::uint64_t, std::vector<TxId>> sequencers_by_slot_;
    std::unordered_map<TxId, std::vector<TxId>, TxIdHash> parked_;  // missing -> waiters
    std::unordered_map<Address, std::size_t, DigestHash> pending_per_sender_;
    std::map<ChainId, std::set<OutputId>> tag_alongs_;     // target chain -> unconsumed outputs
    std::map<ChainId, std::set<OutputId>> delegations_;    // target chain -> unconsumed outputs
};

}  // namespace tanglesim
