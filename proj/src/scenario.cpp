#include "tanglesim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tanglesim {

namespace {

using nlohmann::json;

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t dflt) {
    if (!j.contains(key)) return dflt;
    return j.at(key).get<std::uint64_t>();
}

std::int64_t get_i64(const json& j, const char* key, std::int64_t dflt) {
    if (!j.contains(key)) return dflt;
    return j.at(key).get<std::int64_t>();
}

LedgerParams parse_params(const json& j) {
    LedgerParams p;
    if (j.contains("ticksPerSlot") && j.at("ticksPerSlot").get<std::uint64_t>() != kTicksPerSlot)
        throw ScenarioError("ticksPerSlot is fixed at 128");
    p.tick_duration_ms = get_u64(j, "tickDurationMs", p.tick_duration_ms);
    p.genesis_time_ms = get_i64(j, "genesisTimeMs", p.genesis_time_ms);
    p.initial_supply = get_u64(j, "initialSupply", p.initial_supply);
    p.inflation_c = get_u64(j, "inflationC", p.inflation_c);
    p.max_branch_bonus = get_u64(j, "maxBranchBonus", p.max_branch_bonus);
    p.max_endorsements = std::uint32_t(get_u64(j, "maxEndorsements", p.max_endorsements));
    p.sequencer_pace_ticks = get_u64(j, "sequencerPaceTicks", p.sequencer_pace_ticks);
    p.user_pace_ticks = get_u64(j, "userPaceTicks", p.user_pace_ticks);
    p.min_sequencer_amount = get_u64(j, "minSequencerAmount", p.min_sequencer_amount);
    p.storage_deposit_per_byte = get_u64(j, "storageDepositPerByte", p.storage_deposit_per_byte);
    p.tag_along_sequencer_window_slots =
        get_u64(j, "tagAlongSequencerWindowSlots", p.tag_along_sequencer_window_slots);
    p.tag_along_sender_window_slots =
        get_u64(j, "tagAlongSenderWindowSlots", p.tag_along_sender_window_slots);
    p.max_freeze_slots = get_u64(j, "maxFreezeSlots", p.max_freeze_slots);
    p.revocation_window_slots = get_u64(j, "revocationWindowSlots", p.revocation_window_slots);
    if (j.contains("bonusMode")) {
        std::string m = j.at("bonusMode").get<std::string>();
        if (m == "random")
            p.bonus_mode = BonusMode::Random;
        else if (m == "constant")
            p.bonus_mode = BonusMode::Constant;
        else
            throw ScenarioError("bonusMode must be \"random\" or \"constant\"");
    }
    return p;
}

SequencerConfig parse_sequencer_cfg(const json& j, const std::string& name) {
    SequencerConfig c;
    c.name = name;
    c.amount = j.at("amount").get<Amount>();
    c.milestone_pace_ticks = get_u64(j, "milestonePaceTicks", c.milestone_pace_ticks);
    c.endorse_fanout = std::uint32_t(get_u64(j, "endorseFanout", c.endorse_fanout));
    c.min_tag_along_fee = get_u64(j, "minTagAlongFee", c.min_tag_along_fee);
    c.branch_window_ticks = get_u64(j, "branchWindowTicks", c.branch_window_ticks);
    c.max_ahead_ticks = get_u64(j, "maxAheadTicks", c.max_ahead_ticks);
    c.max_candidates_per_beat =
        std::size_t(get_u64(j, "maxCandidatesPerBeat", c.max_candidates_per_beat));
    c.freeze_slots = get_u64(j, "freezeSlots", c.freeze_slots);
    c.margin_percent = std::uint32_t(get_u64(j, "marginPercent", c.margin_percent));
    return c;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
    }
    try {
        if (get_u64(j, "version", 0) != 1) throw ScenarioError("scenario version must be 1");

        Scenario s;
        s.name = j.value("name", std::string("scenario"));
        if (j.contains("params")) s.params = parse_params(j.at("params"));
        s.duration_slots = get_u64(j, "durationSlots", s.duration_slots);
        s.master_seed = get_u64(j, "masterSeed", s.master_seed);
        s.prune_horizon_slots = get_u64(j, "pruneHorizonSlots", 0);

        if (!j.contains("nodes")) throw ScenarioError("scenario needs a nodes list");
        for (const json& nj : j.at("nodes")) {
            NodeConfig n;
            n.name = nj.at("name").get<std::string>();
            n.clock_offset_ms = get_i64(nj, "clockOffsetMs", 0);
            s.nodes.push_back(std::move(n));
        }

        if (j.contains("latency")) {
            const json& lj = j.at("latency");
            s.latency.base_ms = get_i64(lj, "baseMs", s.latency.base_ms);
            s.latency.jitter_ms = get_i64(lj, "jitterMs", 0);
            if (lj.contains("matrix"))
                s.latency.matrix =
                    lj.at("matrix").get<std::vector<std::vector<std::int64_t>>>();
        }

        const std::uint64_t slot_ms = s.params.slot_duration_ms();
        if (j.contains("partitions")) {
            for (const json& pj : j.at("partitions")) {
                PartitionConfig p;
                if (pj.contains("fromMs"))
                    p.from_ms = pj.at("fromMs").get<std::int64_t>();
                else
                    p.from_ms = s.params.genesis_time_ms +
                                std::int64_t(pj.at("fromSlot").get<std::uint64_t>() * slot_ms);
                if (pj.contains("toMs"))
                    p.to_ms = pj.at("toMs").get<std::int64_t>();
                else
                    p.to_ms = s.params.genesis_time_ms +
                              std::int64_t(pj.at("toSlot").get<std::uint64_t>() * slot_ms);
                p.group_a = pj.at("groupA").get<std::vector<std::string>>();
                s.partitions.push_back(std::move(p));
            }
        }

        if (j.contains("sequencers")) {
            for (const json& sj : j.at("sequencers")) {
                SequencerSpec spec;
                spec.node = sj.at("node").get<std::string>();
                spec.cfg = parse_sequencer_cfg(sj, sj.at("name").get<std::string>());
                s.sequencers.push_back(std::move(spec));
            }
        }

        if (j.contains("adversaries")) {
            for (const json& aj : j.at("adversaries")) {
                AdversarySpec spec;
                spec.node = aj.at("node").get<std::string>();
                spec.cfg = parse_sequencer_cfg(aj, aj.at("name").get<std::string>());
                spec.fork_slot = aj.at("forkSlot").get<std::uint64_t>();
                spec.release_slot = aj.at("releaseSlot").get<std::uint64_t>();
                s.adversaries.push_back(std::move(spec));
            }
        }

        if (j.contains("wallets")) {
            for (const json& wj : j.at("wallets")) {
                WalletSpec w;
                w.name = wj.at("name").get<std::string>();
                w.node = wj.at("node").get<std::string>();
                w.amount = wj.at("amount").get<Amount>();
                if (wj.contains("transfers")) {
                    for (const json& tj : wj.at("transfers")) {
                        TransferSpec t;
                        t.at_slot = tj.at("atSlot").get<std::uint64_t>();
                        t.to = tj.at("to").get<std::string>();
                        t.amount = tj.at("amount").get<Amount>();
                        t.tag_along = tj.at("tagAlong").get<std::string>();
                        t.fee = get_u64(tj, "fee", 0);
                        w.transfers.push_back(std::move(t));
                    }
                }
                if (wj.contains("delegation")) {
                    const json& dj = wj.at("delegation");
                    DelegationSpec d;
                    d.at_slot = get_u64(dj, "atSlot", 1);
                    d.target = dj.at("target").get<std::string>();
                    d.amount = dj.at("amount").get<Amount>();
                    d.inflation_advance = get_u64(dj, "inflationAdvance", 0);
                    d.max_freeze_slots = std::uint32_t(get_u64(dj, "maxFreezeSlots", 0));
                    w.delegation = d;
                }
                if (wj.contains("spam")) {
                    const json& pj = wj.at("spam");
                    std::string m = pj.at("mode").get<std::string>();
                    if (m == "pace")
                        w.spam.mode = SpamMode::Pace;
                    else if (m == "dust")
                        w.spam.mode = SpamMode::Dust;
                    else if (m == "rate")
                        w.spam.mode = SpamMode::Rate;
                    else
                        throw ScenarioError("spam mode must be pace, dust or rate");
                    w.spam.at_slot = get_u64(pj, "atSlot", 1);
                    w.spam.count = std::size_t(get_u64(pj, "count", 4));
                }
                s.wallets.push_back(std::move(w));
            }
        }
        return s;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario field error: ") + e.what());
    }
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> bad = s.params.validate();
    auto complain = [&](const std::string& msg) { bad.push_back(msg); };

    if (s.nodes.empty()) complain("at least one node is required");
    if (s.duration_slots == 0) complain("durationSlots must be > 0");

    std::set<std::string> node_names;
    for (const NodeConfig& n : s.nodes)
        if (!node_names.insert(n.name).second) complain("duplicate node name: " + n.name);

    std::set<std::string> agent_names;
    Amount granted = 0;
    bool overflow = false;
    auto grant = [&](const std::string& name, Amount a) {
        if (!agent_names.insert(name).second) complain("duplicate agent name: " + name);
        auto sum = checked_add(granted, a);
        if (!sum) overflow = true;
        else granted = *sum;
    };
    auto check_node = [&](const std::string& agent, const std::string& node) {
        if (!node_names.count(node)) complain(agent + " is hosted on unknown node " + node);
    };

    std::set<std::string> sequencer_names;
    for (const SequencerSpec& q : s.sequencers) {
        grant(q.cfg.name, q.cfg.amount);
        check_node(q.cfg.name, q.node);
        sequencer_names.insert(q.cfg.name);
        if (q.cfg.amount < s.params.min_sequencer_amount)
            complain("sequencer " + q.cfg.name +
                     " is funded below minSequencerAmount (sequencer milestone rule)");
        if (q.cfg.milestone_pace_ticks < s.params.sequencer_pace_ticks)
            complain("sequencer " + q.cfg.name + " pace below the validity pace");
        if (q.cfg.endorse_fanout == 0 || q.cfg.endorse_fanout > s.params.max_endorsements)
            complain("sequencer " + q.cfg.name + " endorseFanout out of range");
        if (q.cfg.margin_percent > 100)
            complain("sequencer " + q.cfg.name + " marginPercent above 100");
    }
    for (const AdversarySpec& a : s.adversaries) {
        grant(a.cfg.name, a.cfg.amount);
        check_node(a.cfg.name, a.node);
        sequencer_names.insert(a.cfg.name);
        if (a.cfg.amount < s.params.min_sequencer_amount)
            complain("adversary " + a.cfg.name + " is funded below minSequencerAmount");
        if (a.release_slot < a.fork_slot)
            complain("adversary " + a.cfg.name + " releases before it forks");
        if (a.fork_slot < 2) complain("adversary " + a.cfg.name + " forkSlot must be >= 2");
    }
    for (const WalletSpec& w : s.wallets) {
        grant(w.name, w.amount);
        check_node(w.name, w.node);
        for (const TransferSpec& t : w.transfers) {
            if (!sequencer_names.count(t.tag_along))
                complain("wallet " + w.name + " tags along unknown sequencer " + t.tag_along);
            if (t.at_slot >= s.duration_slots)
                complain("wallet " + w.name + " transfer scheduled past the end of the run");
        }
        if (w.delegation && !sequencer_names.count(w.delegation->target))
            complain("wallet " + w.name + " delegates to unknown sequencer " +
                     w.delegation->target);
    }
    if (overflow || granted > s.params.initial_supply)
        complain("agent grants exceed the initial supply");

    for (const PartitionConfig& p : s.partitions) {
        if (p.to_ms <= p.from_ms) complain("partition window is empty");
        if (p.group_a.empty() || p.group_a.size() >= s.nodes.size())
            complain("partition must split the nodes into two non-empty groups");
        for (const std::string& n : p.group_a)
            if (!node_names.count(n)) complain("partition references unknown node " + n);
    }
    return bad;
}

}  // namespace tanglesim
