#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tanglesim/agents.hpp"
#include "tanglesim/params.hpp"

namespace tanglesim {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NodeConfig {
    std::string name;
    std::int64_t clock_offset_ms = 0;
};

struct LatencyConfig {
    std::int64_t base_ms = 50;
    std::int64_t jitter_ms = 0;
    // Optional per-link base matrix (row = from, col = to); overrides base_ms.
    std::vector<std::vector<std::int64_t>> matrix;
};

struct PartitionConfig {
    std::int64_t from_ms = 0;
    std::int64_t to_ms = 0;
    std::vector<std::string> group_a;
};

struct SequencerSpec {
    std::string node;
    SequencerConfig cfg;
};

struct TransferSpec {
    std::uint64_t at_slot = 0;
    std::string to;         // any name; the address derives from it
    Amount amount = 0;
    std::string tag_along;  // sequencer name
    Amount fee = 0;
};

struct DelegationSpec {
    std::uint64_t at_slot = 0;
    std::string target;  // sequencer name
    Amount amount = 0;
    Amount inflation_advance = 0;
    std::uint32_t max_freeze_slots = 0;  // 0 = ledger maximum
};

struct SpamSpec {
    SpamMode mode = SpamMode::None;
    std::uint64_t at_slot = 0;
    std::size_t count = 0;
};

struct WalletSpec {
    std::string name;
    std::string node;
    Amount amount = 0;
    std::vector<TransferSpec> transfers;
    std::optional<DelegationSpec> delegation;
    SpamSpec spam;
};

struct AdversarySpec {
    std::string node;
    SequencerConfig cfg;
    std::uint64_t fork_slot = 0;
    std::uint64_t release_slot = 0;
};

struct Scenario {
    std::string name = "scenario";
    LedgerParams params;
    std::uint64_t duration_slots = 10;
    std::uint64_t master_seed = 1;
    std::vector<NodeConfig> nodes;
    LatencyConfig latency;
    std::vector<PartitionConfig> partitions;
    std::vector<SequencerSpec> sequencers;
    std::vector<WalletSpec> wallets;
    std::vector<AdversarySpec> adversaries;
    std::uint64_t prune_horizon_slots = 0;  // 0 = pruning disabled
};

// Parses the versioned JSON scenario format (docs/FORMATS.md). Throws
// ScenarioError with a human-readable message.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Semantic validation: funding, node references, partition shape.
// Returns violations; empty means runnable.
std::vector<std::string> validate_scenario(const Scenario& s);

}  // namespace tanglesim
