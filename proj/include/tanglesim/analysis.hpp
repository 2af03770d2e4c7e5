#pragma once

#include <iosfwd>
#include <map>
#include <optional>

#include "tanglesim/tangle.hpp"
#include "tanglesim/trace.hpp"

namespace tanglesim {

// Finality parameter as an exact rational, 1/2 < num/den < 1.
struct Theta {
    std::uint64_t num = 2;
    std::uint64_t den = 3;

    bool in_range() const { return 2 * num > den && num < den; }
};

// Accepts "2/3" or a decimal like "0.66".
std::optional<Theta> parse_theta(std::string_view text);

// beta > 2 * theta * totalSupply, in exact integer arithmetic.
bool finality_threshold_met(Amount beta_value, Theta theta, Amount total_supply);

// Geometric-weighted sum of coverage deltas along a stem-predecessor-
// consecutive branch chain (tip first), truncated at 64 terms. Requires the
// transaction to be included in every branch of the chain.
Amount beta(const UtxoTangle& tangle, const TxId& tx, const std::vector<TxId>& branch_chain);

// True iff some observed branch chain containing the transaction satisfies
// the finality rule. Throws std::invalid_argument if theta is out of range.
bool is_final(const UtxoTangle& tangle, const TxId& tx, Theta theta);

// min over the chain of (2 * coverageDelta(B_i) - totalSupply); may be <= 0.
std::int64_t mu_bound(const std::vector<Amount>& chain_deltas, Amount total_supply);

// ---------------------------------------------------------------------------
// Post-hoc trace analysis.

struct SlotNodeRow {
    std::uint64_t slot = 0;
    std::int32_t node = 0;
    std::size_t branch_count = 0;          // slot branches this node saw
    TxId preferred{};                      // node's preferred tip at the slot mark
    Amount preferred_coverage = 0;
    std::uint64_t coverage_ppm = 0;        // preferred coverage / (2*supply), ppm
    std::int64_t slots_to_agreement = -1;  // -1: never agreed / not applicable
    std::size_t orphaned = 0;              // slot branches outside the final chain
    std::uint64_t reorg_depth = 0;         // deepest reorg at this node in the slot
    bool audit_ok = true;
};

struct TrackedReport {
    std::string name;
    TxId id{};
    bool included_final = false;
    // Per node: slot of the branch whose arrival satisfied the finality rule.
    std::map<std::int32_t, std::uint64_t> finalized_slot;
    std::map<std::int32_t, std::int64_t> finalized_ms;
    bool reverted_after_final = false;
};

struct ConvergenceReport {
    std::vector<SlotNodeRow> rows;
    bool all_nodes_agree = false;
    TxId final_tip{};
    std::uint64_t final_chain_length = 0;
    std::size_t slots_measured = 0;
    std::size_t slots_agreed_within = 0;      // slots with agreement <= threshold
    std::int64_t agreement_threshold = 3;
    std::uint64_t mean_agreement_micro = 0;   // mean slots-to-agreement * 1e6
    std::int64_t max_agreement = 0;
    std::size_t orphans_total = 0;
    std::size_t reorg_events = 0;
    std::uint64_t max_reorg_depth = 0;
    bool supply_audit_ok = true;
    std::vector<TrackedReport> tracked;
    // Final-chain per-slot safety margins: 2*delta - supply and the running
    // minimum from the tip (the paper's mu over the suffix chain).
    std::map<std::uint64_t, std::int64_t> slot_margin;
    std::map<std::uint64_t, std::int64_t> mu_from_tip;
    std::map<std::string, std::uint64_t> attach_codes;  // rejects by code
    std::size_t emitted = 0, attached_valid = 0, delayed_rate = 0, delayed_cooldown = 0;
};

ConvergenceReport convergence_metrics(const Trace& trace, Theta theta);

void write_metrics_csv(const ConvergenceReport& report, std::ostream& os);
void write_summary_json(const ConvergenceReport& report, const Trace& trace, std::ostream& os);
std::string analysis_json(const ConvergenceReport& report, const Trace& trace, Theta theta);

}  // namespace tanglesim
