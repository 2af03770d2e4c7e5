#pragma once

#include <memory>
#include <queue>
#include <random>

#include "tanglesim/scenario.hpp"
#include "tanglesim/trace.hpp"

namespace tanglesim {

// One simulated node: a tangle plus the node-level behaviors (cool-down room,
// per-sender rate limiting, relay bookkeeping).
struct NodeSim {
    std::int32_t id = 0;
    std::string name;
    std::int64_t clock_offset_ms = 0;
    std::unique_ptr<UtxoTangle> tangle;
    std::unordered_map<Address, std::int64_t, DigestHash> last_seen_ms;
    std::unordered_set<TxId, TxIdHash> relayed;
    std::unordered_set<TxId, TxIdHash> withheld;  // locally attached, not yet published
    std::optional<TxId> preferred_tip;

    std::int64_t local_time(std::int64_t global_ms) const { return global_ms + clock_offset_ms; }
};

// Deterministic virtual-time discrete-event simulation. All randomness comes
// from per-subsystem generators derived from the master seed.
class Simulation {
  public:
    explicit Simulation(Scenario scenario);

    Trace run();

    const std::vector<std::unique_ptr<NodeSim>>& nodes() const { return nodes_; }
    const Scenario& scenario() const { return scenario_; }
    const IdentityRegistry& registry() const { return *registry_; }

    // Address/chain lookups used by tests.
    std::optional<ChainId> chain_of(const std::string& sequencer_name) const;

  private:
    struct Event {
        std::int64_t t = 0;
        std::uint64_t seq = 0;
        enum class Kind { AgentWake, Deliver, PullServe, SlotMark, PartitionEdge } kind{};
        std::int32_t node = -1;
        std::int32_t peer = -1;
        std::size_t agent = 0;
        std::shared_ptr<const Transaction> tx;
        TxId tx_id{};
        bool pulled = false;
        bool ready = false;  // already passed rate limit and cool-down
        std::uint64_t slot = 0;
        std::size_t partition = 0;
        bool partition_start = false;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            if (a.t != b.t) return a.t > b.t;
            return a.seq > b.seq;
        }
    };

    void build_world();
    void schedule(Event e);
    bool reachable(std::int32_t a, std::int32_t b, std::int64_t t) const;
    std::int64_t sample_latency(std::int32_t from, std::int32_t to);
    void gossip(std::int32_t from, const std::shared_ptr<const Transaction>& tx,
                std::int64_t now);
    void deliver(Event& e);
    void attach_at(std::int32_t node, const std::shared_ptr<const Transaction>& tx,
                   std::int32_t from, bool pulled, std::int64_t now);
    void agent_wake(const Event& e);
    void slot_mark(const Event& e);
    void anti_entropy(std::int64_t now);
    void note_preferred(NodeSim& node, std::int64_t now);
    void trace_branch(NodeSim& node, const TxId& id, std::int64_t now);

    Scenario scenario_;
    TimeConversion conv_;
    std::shared_ptr<IdentityRegistry> registry_;
    std::vector<std::unique_ptr<NodeSim>> nodes_;
    std::vector<std::unique_ptr<Agent>> agents_;
    std::vector<std::int32_t> agent_node_;
    std::vector<std::set<std::int32_t>> partition_groups_;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::uint64_t next_seq_ = 0;
    std::int64_t end_ms_ = 0;
    std::int64_t drain_ms_ = 0;

    std::mt19937_64 rng_latency_{0};
    std::mt19937_64 rng_pull_{0};

    Trace trace_;
    std::map<std::string, int> transfer_count_;
    bool ran_ = false;
};

// Convenience wrapper: build, run, return the trace.
Trace run_scenario(const Scenario& scenario);

}  // namespace tanglesim
