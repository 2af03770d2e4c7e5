#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tanglesim/base.hpp"
#include "tanglesim/amount.hpp"

namespace tanglesim {

enum class TraceKind {
    Emit,       // agent submitted a transaction at its node
    Deliver,    // transaction arrived at a node
    Delay,      // delivery postponed (rate limit or cool-down)
    Attach,     // vertex entered/changed status in a node's tangle
    Branch,     // branch became valid at a node (committed state snapshot)
    Prefer,     // per-slot snapshot of a node's preferred branch
    Reorg,      // node's preferred chain switched to a non-descendant
    Pull,       // node requested a missing parent from a peer
    Partition,  // partition window opened/closed
    SlotMark,   // global slot boundary marker
};

const char* to_string(TraceKind k);

// One flat record; which fields are meaningful depends on the kind.
struct TraceEvent {
    std::int64_t t = 0;
    TraceKind kind = TraceKind::SlotMark;
    std::int32_t node = -1;
    std::int32_t peer = -1;
    std::string agent;
    std::string aux;       // tx kind / delay reason / partition state / "final"
    TxId tx{};
    TxId tx2{};            // stem predecessor, reorg target
    std::uint64_t ticks = 0;
    std::uint64_t slot = 0;
    std::int64_t until = 0;
    Amount delta = 0;
    Amount coverage = 0;
    Amount supply = 0;
    std::int64_t minted = 0;
    std::uint64_t depth = 0;
    bool flag = false;     // withheld / pulled / audit-ok
    std::string code;      // attach status / reject code
    std::vector<std::string> tracked;  // tracked transfers included in a branch state
};

struct TrackedTx {
    std::string name;  // "<wallet>/<index>"
    TxId id{};
    std::int32_t origin_node = -1;
};

struct Trace {
    std::string scenario_name;
    std::uint64_t seed = 0;
    std::uint64_t duration_slots = 0;
    Amount initial_supply = 0;
    std::uint64_t slot_duration_ms = 0;
    std::vector<std::string> node_names;
    std::vector<TrackedTx> tracked;
    std::vector<TraceEvent> events;
};

// Line-delimited JSON, one event per line, preceded by one header line.
void write_trace_log(const Trace& trace, std::ostream& os);
Trace read_trace_log(std::istream& is);

}  // namespace tanglesim
