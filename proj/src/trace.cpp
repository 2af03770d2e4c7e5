#include "tanglesim/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace tanglesim {

using ojson = nlohmann::ordered_json;

const char* to_string(TraceKind k) {
    switch (k) {
        case TraceKind::Emit: return "emit";
        case TraceKind::Deliver: return "deliver";
        case TraceKind::Delay: return "delay";
        case TraceKind::Attach: return "attach";
        case TraceKind::Branch: return "branch";
        case TraceKind::Prefer: return "prefer";
        case TraceKind::Reorg: return "reorg";
        case TraceKind::Pull: return "pull";
        case TraceKind::Partition: return "partition";
        case TraceKind::SlotMark: return "slot";
    }
    return "unknown";
}

namespace {

TraceKind kind_from(const std::string& s) {
    if (s == "emit") return TraceKind::Emit;
    if (s == "deliver") return TraceKind::Deliver;
    if (s == "delay") return TraceKind::Delay;
    if (s == "attach") return TraceKind::Attach;
    if (s == "branch") return TraceKind::Branch;
    if (s == "prefer") return TraceKind::Prefer;
    if (s == "reorg") return TraceKind::Reorg;
    if (s == "pull") return TraceKind::Pull;
    if (s == "partition") return TraceKind::Partition;
    if (s == "slot") return TraceKind::SlotMark;
    throw std::runtime_error("unknown trace event kind: " + s);
}

}  // namespace

void write_trace_log(const Trace& trace, std::ostream& os) {
    ojson header;
    header["format"] = "tanglesim-trace";
    header["version"] = 1;
    header["scenario"] = trace.scenario_name;
    header["seed"] = trace.seed;
    header["durationSlots"] = trace.duration_slots;
    header["initialSupply"] = trace.initial_supply;
    header["slotDurationMs"] = trace.slot_duration_ms;
    header["nodes"] = trace.node_names;
    ojson tracked = ojson::array();
    for (const TrackedTx& t : trace.tracked) {
        ojson tj;
        tj["name"] = t.name;
        tj["id"] = t.id.hex();
        tj["node"] = t.origin_node;
        tracked.push_back(tj);
    }
    header["tracked"] = tracked;
    os << header.dump() << "\n";

    for (const TraceEvent& e : trace.events) {
        ojson j;
        j["t"] = e.t;
        j["ev"] = to_string(e.kind);
        if (e.node >= 0) j["node"] = e.node;
        if (e.peer >= 0) j["peer"] = e.peer;
        if (!e.agent.empty()) j["agent"] = e.agent;
        if (!e.aux.empty()) j["aux"] = e.aux;
        if (!(e.tx == TxId{})) j["tx"] = e.tx.hex();
        if (!(e.tx2 == TxId{})) j["tx2"] = e.tx2.hex();
        if (e.ticks) j["ticks"] = e.ticks;
        switch (e.kind) {
            case TraceKind::Prefer:
            case TraceKind::Branch:
            case TraceKind::SlotMark:
            case TraceKind::Partition:
            case TraceKind::Reorg:
                j["slot"] = e.slot;
                break;
            default:
                if (e.slot) j["slot"] = e.slot;
        }
        if (e.until) j["until"] = e.until;
        if (e.kind == TraceKind::Branch || e.kind == TraceKind::Prefer) {
            j["delta"] = e.delta;
            j["coverage"] = e.coverage;
        }
        if (e.kind == TraceKind::Branch) {
            j["supply"] = e.supply;
            j["minted"] = e.minted;
            j["audit"] = e.flag;
            j["tracked"] = e.tracked;
        } else if (e.flag) {
            j["flag"] = true;
        }
        if (e.depth) j["depth"] = e.depth;
        if (!e.code.empty()) j["code"] = e.code;
        os << j.dump() << "\n";
    }
}

Trace read_trace_log(std::istream& is) {
    Trace trace;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty trace log");
    ojson header = ojson::parse(line);
    if (header.value("format", std::string()) != "tanglesim-trace")
        throw std::runtime_error("not a tanglesim trace log");
    trace.scenario_name = header.value("scenario", std::string());
    trace.seed = header.value("seed", std::uint64_t(0));
    trace.duration_slots = header.value("durationSlots", std::uint64_t(0));
    trace.initial_supply = header.value("initialSupply", Amount(0));
    trace.slot_duration_ms = header.value("slotDurationMs", std::uint64_t(0));
    trace.node_names = header.value("nodes", std::vector<std::string>{});
    if (header.contains("tracked")) {
        for (const auto& tj : header.at("tracked")) {
            TrackedTx t;
            t.name = tj.value("name", std::string());
            if (!TxId::parse(tj.value("id", std::string()), t.id))
                throw std::runtime_error("bad tracked tx id in trace header");
            t.origin_node = tj.value("node", -1);
            trace.tracked.push_back(std::move(t));
        }
    }

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        ojson j = ojson::parse(line);
        TraceEvent e;
        e.t = j.at("t").get<std::int64_t>();
        e.kind = kind_from(j.at("ev").get<std::string>());
        e.node = j.value("node", -1);
        e.peer = j.value("peer", -1);
        e.agent = j.value("agent", std::string());
        e.aux = j.value("aux", std::string());
        if (j.contains("tx")) TxId::parse(j.at("tx").get<std::string>(), e.tx);
        if (j.contains("tx2")) TxId::parse(j.at("tx2").get<std::string>(), e.tx2);
        e.ticks = j.value("ticks", std::uint64_t(0));
        e.slot = j.value("slot", std::uint64_t(0));
        e.until = j.value("until", std::int64_t(0));
        e.delta = j.value("delta", Amount(0));
        e.coverage = j.value("coverage", Amount(0));
        e.supply = j.value("supply", Amount(0));
        e.minted = j.value("minted", std::int64_t(0));
        e.depth = j.value("depth", std::uint64_t(0));
        if (e.kind == TraceKind::Branch)
            e.flag = j.value("audit", false);
        else
            e.flag = j.value("flag", false);
        e.code = j.value("code", std::string());
        e.tracked = j.value("tracked", std::vector<std::string>{});
        trace.events.push_back(std::move(e));
    }
    return trace;
}

}  // namespace tanglesim
