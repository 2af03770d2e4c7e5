#include "tanglesim/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace tanglesim {

using ojson = nlohmann::ordered_json;
using Wide = unsigned __int128;

std::optional<Theta> parse_theta(std::string_view text) {
    Theta th;
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        std::uint64_t p = 0, q = 0;
        auto r1 = std::from_chars(text.data(), text.data() + slash, p);
        auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), q);
        if (r1.ec != std::errc() || r2.ec != std::errc() || q == 0) return std::nullopt;
        if (r1.ptr != text.data() + slash || r2.ptr != text.data() + text.size())
            return std::nullopt;
        th.num = p;
        th.den = q;
        return th;
    }
    auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        std::uint64_t p = 0;
        auto r = std::from_chars(text.data(), text.data() + text.size(), p);
        if (r.ec != std::errc() || r.ptr != text.data() + text.size()) return std::nullopt;
        th.num = p;
        th.den = 1;
        return th;  // integer thetas are out of range; caught by the caller
    }
    std::uint64_t whole = 0;
    if (dot > 0) {
        auto r = std::from_chars(text.data(), text.data() + dot, whole);
        if (r.ec != std::errc() || r.ptr != text.data() + dot) return std::nullopt;
    }
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 9) return std::nullopt;
    std::uint64_t f = 0;
    auto r = std::from_chars(frac.data(), frac.data() + frac.size(), f);
    if (r.ec != std::errc() || r.ptr != frac.data() + frac.size()) return std::nullopt;
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    th.num = whole * den + f;
    th.den = den;
    return th;
}

bool finality_threshold_met(Amount beta_value, Theta theta, Amount total_supply) {
    return Wide(beta_value) * theta.den > Wide(2) * theta.num * total_supply;
}

Amount beta(const UtxoTangle& tangle, const TxId& tx, const std::vector<TxId>& branch_chain) {
    if (branch_chain.empty()) throw std::invalid_argument("empty branch chain");
    Amount sum = 0;
    for (std::size_t i = 0; i < branch_chain.size() && i < 64; ++i) {
        const BranchRecord* rec = tangle.branch_record(branch_chain[i]);
        if (!rec) throw std::invalid_argument("unknown branch in chain");
        if (i + 1 < branch_chain.size() && !(rec->stem_pred == branch_chain[i + 1]))
            throw std::invalid_argument("branch chain not consecutive by stem predecessor");
        if (!rec->included->contains(tx))
            throw std::invalid_argument("transaction not included in every branch of the chain");
        sum = must_add(sum, rec->delta >> i);
    }
    return sum;
}

bool is_final(const UtxoTangle& tangle, const TxId& tx, Theta theta) {
    if (!theta.in_range()) throw std::invalid_argument("theta must satisfy 1/2 < theta < 1");
    auto latest = tangle.latest_branch_slot();
    if (!latest) return false;
    const Amount supply = tangle.params().initial_supply;
    for (std::uint64_t s = *latest + 1; s-- > 0;) {
        for (const TxId& b : tangle.branches_at(s)) {
            const BranchRecord* rec = tangle.branch_record(b);
            if (!rec || !rec->included->contains(tx)) continue;
            Amount sum = 0;
            std::size_t i = 0;
            const BranchRecord* cur = rec;
            while (cur && i < 64 && cur->included->contains(tx)) {
                sum = must_add(sum, cur->delta >> i);
                if (finality_threshold_met(sum, theta, supply)) return true;
                if (cur->branch.is_genesis()) break;
                cur = tangle.branch_record(cur->stem_pred);
                ++i;
            }
        }
        if (s == 0) break;
    }
    return false;
}

std::int64_t mu_bound(const std::vector<Amount>& chain_deltas, Amount total_supply) {
    if (chain_deltas.empty()) throw std::invalid_argument("empty branch chain");
    __int128 best = 0;
    bool first = true;
    for (Amount d : chain_deltas) {
        __int128 margin = __int128(2) * d - __int128(total_supply);
        if (first || margin < best) best = margin;
        first = false;
    }
    if (best > INT64_MAX) return INT64_MAX;
    if (best < INT64_MIN) return INT64_MIN;
    return std::int64_t(best);
}

// ---------------------------------------------------------------------------

namespace {

struct BranchInfo {
    TxId id{};
    TxId stem_pred{};
    std::uint64_t slot = 0;
    Amount delta = 0;
    Amount coverage = 0;
    bool audit = true;
    std::set<std::string> tracked;
};

struct PreferSnap {
    TxId tip{};
    std::uint64_t tip_slot = 0;
    Amount coverage = 0;
};

}  // namespace

ConvergenceReport convergence_metrics(const Trace& trace, Theta theta) {
    ConvergenceReport rep;
    const Amount supply = trace.initial_supply;
    const std::size_t n_nodes = trace.node_names.size();

    std::map<TxId, BranchInfo> branches;
    std::map<std::uint64_t, std::set<TxId>> slot_branches;            // slot -> distinct ids
    std::map<std::int32_t, std::map<std::uint64_t, std::set<TxId>>> node_slot_branches;
    std::map<std::int32_t, std::map<std::uint64_t, PreferSnap>> prefers;  // node -> mark -> snap
    std::map<std::int32_t, std::vector<const TraceEvent*>> node_branch_arrivals;
    std::vector<const TraceEvent*> reorgs;

    for (const TraceEvent& e : trace.events) {
        switch (e.kind) {
            case TraceKind::Branch: {
                BranchInfo& b = branches[e.tx];
                b.id = e.tx;
                b.stem_pred = e.tx2;
                b.slot = e.slot;
                b.delta = e.delta;
                b.coverage = e.coverage;
                b.audit = e.flag;
                for (const std::string& t : e.tracked) b.tracked.insert(t);
                if (!e.flag) rep.supply_audit_ok = false;
                slot_branches[e.slot].insert(e.tx);
                node_slot_branches[e.node][e.slot].insert(e.tx);
                node_branch_arrivals[e.node].push_back(&e);
                break;
            }
            case TraceKind::Prefer: {
                PreferSnap snap;
                snap.tip = e.tx;
                snap.tip_slot = e.ticks;
                snap.coverage = e.coverage;
                prefers[e.node][e.slot] = snap;
                break;
            }
            case TraceKind::Reorg:
                reorgs.push_back(&e);
                rep.reorg_events++;
                rep.max_reorg_depth = std::max(rep.max_reorg_depth, e.depth);
                break;
            case TraceKind::Emit:
                rep.emitted++;
                break;
            case TraceKind::Attach:
                if (e.code == "valid")
                    rep.attached_valid++;
                else if (e.code != "pending")
                    rep.attach_codes[e.code]++;
                break;
            case TraceKind::Delay:
                if (e.aux == "rate")
                    rep.delayed_rate++;
                else
                    rep.delayed_cooldown++;
                break;
            default:
                break;
        }
    }

    // Final preferred tips; the last Prefer per node is the post-drain snapshot.
    std::vector<PreferSnap> final_tips(n_nodes);
    for (std::size_t n = 0; n < n_nodes; ++n) {
        auto it = prefers.find(std::int32_t(n));
        if (it != prefers.end() && !it->second.empty()) final_tips[n] = it->second.rbegin()->second;
    }
    rep.all_nodes_agree = n_nodes > 0;
    for (std::size_t n = 1; n < n_nodes; ++n)
        if (!(final_tips[n].tip == final_tips[0].tip)) rep.all_nodes_agree = false;
    rep.final_tip = final_tips.empty() ? TxId{} : final_tips[0].tip;

    // The final chain, slot -> branch id.
    std::map<std::uint64_t, TxId> final_chain;
    {
        TxId cur = rep.final_tip;
        while (!(cur == TxId{})) {
            auto it = branches.find(cur);
            if (it == branches.end()) break;
            final_chain[it->second.slot] = cur;
            if (it->second.stem_pred.is_genesis()) break;
            cur = it->second.stem_pred;
        }
        rep.final_chain_length = final_chain.size();
    }

    // Whether branch `target` (at target_slot) lies in the stem lineage of `tip`.
    auto chain_contains = [&](const TxId& tip, const TxId& target,
                              std::uint64_t target_slot) -> bool {
        TxId cur = tip;
        while (true) {
            if (cur == target) return true;
            auto it = branches.find(cur);
            if (it == branches.end()) return false;
            if (it->second.slot < target_slot) return false;
            if (it->second.stem_pred.is_genesis()) return false;
            cur = it->second.stem_pred;
        }
    };

    // Per-slot agreement: first mark from which every node's preferred chain
    // carries the final-chain branch of that slot, forever.
    std::map<std::uint64_t, std::int64_t> agreement;
    std::uint64_t agreement_sum = 0;
    for (const auto& [slot, id] : final_chain) {
        if (slot == 0) continue;
        std::int64_t last_bad = std::int64_t(slot) - 1;
        bool never = false;
        for (std::size_t n = 0; n < n_nodes && !never; ++n) {
            auto pit = prefers.find(std::int32_t(n));
            if (pit == prefers.end()) {
                never = true;
                break;
            }
            std::int64_t node_last_bad = -1;
            bool seen_good = false;
            for (const auto& [mark, snap] : pit->second) {
                if (mark < slot) continue;
                if (chain_contains(snap.tip, id, slot)) {
                    seen_good = true;
                } else {
                    node_last_bad = std::int64_t(mark);
                    seen_good = false;
                }
            }
            if (!seen_good) never = true;
            last_bad = std::max(last_bad, node_last_bad);
        }
        if (never) {
            agreement[slot] = -1;
        } else {
            std::int64_t value = last_bad + 1 - std::int64_t(slot);
            agreement[slot] = value;
            agreement_sum += std::uint64_t(value);
            rep.slots_measured++;
            if (value <= rep.agreement_threshold) rep.slots_agreed_within++;
            rep.max_agreement = std::max(rep.max_agreement, value);
        }
    }
    if (rep.slots_measured)
        rep.mean_agreement_micro = agreement_sum * 1'000'000 / rep.slots_measured;

    // Rows per (slot, node).
    for (std::uint64_t slot = 1; slot <= trace.duration_slots; ++slot) {
        for (std::size_t n = 0; n < n_nodes; ++n) {
            SlotNodeRow row;
            row.slot = slot;
            row.node = std::int32_t(n);
            auto nb = node_slot_branches.find(std::int32_t(n));
            if (nb != node_slot_branches.end()) {
                auto sit = nb->second.find(slot);
                if (sit != nb->second.end()) row.branch_count = sit->second.size();
            }
            auto pit = prefers.find(std::int32_t(n));
            if (pit != prefers.end()) {
                auto sit = pit->second.find(slot);
                if (sit != pit->second.end()) {
                    row.preferred = sit->second.tip;
                    row.preferred_coverage = sit->second.coverage;
                    if (supply)
                        row.coverage_ppm =
                            std::uint64_t(Wide(sit->second.coverage) * 1'000'000 / supply);
                }
            }
            auto ait = agreement.find(slot);
            row.slots_to_agreement = ait == agreement.end() ? -1 : ait->second;
            auto sb = slot_branches.find(slot);
            if (sb != slot_branches.end()) {
                std::size_t total = sb->second.size();
                bool has_final = final_chain.count(slot) != 0;
                row.orphaned = total - (has_final && total > 0 ? 1 : 0);
            }
            for (const TraceEvent* r : reorgs)
                if (r->node == std::int32_t(n) && r->slot == slot)
                    row.reorg_depth = std::max(row.reorg_depth, r->depth);
            for (const TxId& b : slot_branches[slot])
                if (!branches[b].audit) row.audit_ok = false;
            rep.rows.push_back(row);
        }
    }
    for (const auto& [slot, id] : slot_branches) {
        bool has_final = final_chain.count(slot) != 0;
        rep.orphans_total += id.size() - (has_final && !id.empty() ? 1 : 0);
    }

    // Safety margins along the final chain.
    {
        __int128 running = INT64_MAX;
        for (auto it = final_chain.rbegin(); it != final_chain.rend(); ++it) {
            const BranchInfo& b = branches[it->second];
            __int128 margin = __int128(2) * b.delta - __int128(supply);
            if (margin < running) running = margin;
            auto clamp = [](__int128 v) {
                if (v > INT64_MAX) return std::int64_t(INT64_MAX);
                if (v < INT64_MIN) return std::int64_t(INT64_MIN);
                return std::int64_t(v);
            };
            rep.slot_margin[it->first] = clamp(margin);
            rep.mu_from_tip[it->first] = clamp(running);
        }
    }

    // Tracked transfers: finality per node, final inclusion, reverts.
    for (const TrackedTx& t : trace.tracked) {
        TrackedReport tr;
        tr.name = t.name;
        tr.id = t.id;
        auto fit = branches.find(rep.final_tip);
        if (fit != branches.end()) tr.included_final = fit->second.tracked.count(t.name) != 0;

        std::uint64_t first_included_slot = UINT64_MAX;
        for (const auto& [id, b] : branches)
            if (b.tracked.count(t.name)) first_included_slot = std::min(first_included_slot, b.slot);

        for (std::size_t n = 0; n < n_nodes; ++n) {
            auto ait = node_branch_arrivals.find(std::int32_t(n));
            if (ait == node_branch_arrivals.end()) continue;
            for (const TraceEvent* be : ait->second) {
                const BranchInfo& b = branches[be->tx];
                if (!b.tracked.count(t.name)) continue;
                // Chain from this branch down while the transfer stays included.
                Amount sum = 0;
                std::size_t i = 0;
                const BranchInfo* cur = &b;
                bool final_here = false;
                while (i < 64) {
                    if (!cur->tracked.count(t.name)) break;
                    sum = must_add(sum, cur->delta >> i);
                    if (finality_threshold_met(sum, theta, supply)) {
                        final_here = true;
                        break;
                    }
                    auto nit = branches.find(cur->stem_pred);
                    if (nit == branches.end()) break;
                    cur = &nit->second;
                    ++i;
                }
                if (final_here) {
                    if (!tr.finalized_slot.count(std::int32_t(n))) {
                        tr.finalized_slot[std::int32_t(n)] = b.slot;
                        tr.finalized_ms[std::int32_t(n)] = be->t;
                    }
                    break;
                }
            }
        }

        // Reverted: after a node finalized it, that node's preferred chain
        // (advanced past the inclusion slot) no longer carries it.
        for (const auto& [n, fin_ms] : tr.finalized_ms) {
            auto pit = prefers.find(n);
            if (pit == prefers.end()) continue;
            for (const auto& [mark, snap] : pit->second) {
                std::int64_t mark_ms = std::int64_t(mark * trace.slot_duration_ms);
                if (mark_ms <= fin_ms) continue;
                auto bit = branches.find(snap.tip);
                if (bit == branches.end()) continue;
                if (bit->second.slot < first_included_slot) continue;
                if (!bit->second.tracked.count(t.name)) tr.reverted_after_final = true;
            }
        }
        rep.tracked.push_back(std::move(tr));
    }

    return rep;
}

void write_metrics_csv(const ConvergenceReport& report, std::ostream& os) {
    os << "slot,node,branch_count,preferred_branch,preferred_coverage,coverage_ppm,"
          "slots_to_agreement,orphaned,reorg_depth,audit_ok\n";
    for (const SlotNodeRow& r : report.rows) {
        os << r.slot << "," << r.node << "," << r.branch_count << ","
           << (r.preferred == TxId{} ? std::string("-") : r.preferred.short_hex()) << ","
           << r.preferred_coverage << "," << r.coverage_ppm << "," << r.slots_to_agreement << ","
           << r.orphaned << "," << r.reorg_depth << "," << (r.audit_ok ? 1 : 0) << "\n";
    }
}

namespace {

ojson report_json(const ConvergenceReport& report, const Trace& trace) {
    ojson j;
    j["scenario"] = trace.scenario_name;
    j["seed"] = trace.seed;
    j["durationSlots"] = trace.duration_slots;
    j["nodes"] = trace.node_names;
    j["allNodesAgree"] = report.all_nodes_agree;
    j["finalTip"] = report.final_tip == TxId{} ? std::string("-") : report.final_tip.hex();
    j["finalChainLength"] = report.final_chain_length;
    ojson agree;
    agree["slotsMeasured"] = report.slots_measured;
    agree["threshold"] = report.agreement_threshold;
    agree["withinThreshold"] = report.slots_agreed_within;
    agree["meanMicro"] = report.mean_agreement_micro;
    agree["max"] = report.max_agreement;
    j["agreement"] = agree;
    j["orphanedBranches"] = report.orphans_total;
    ojson reorg;
    reorg["events"] = report.reorg_events;
    reorg["maxDepth"] = report.max_reorg_depth;
    j["reorgs"] = reorg;
    j["supplyAuditOk"] = report.supply_audit_ok;
    ojson counts;
    counts["emitted"] = report.emitted;
    counts["attachedValid"] = report.attached_valid;
    counts["delayedRate"] = report.delayed_rate;
    counts["delayedCooldown"] = report.delayed_cooldown;
    ojson rejects = ojson::object();
    for (const auto& [code, cnt] : report.attach_codes) rejects[code] = cnt;
    counts["rejected"] = rejects;
    j["counts"] = counts;
    ojson tracked = ojson::array();
    for (const TrackedReport& t : report.tracked) {
        ojson tj;
        tj["name"] = t.name;
        tj["id"] = t.id.hex();
        tj["includedFinal"] = t.included_final;
        ojson fin = ojson::object();
        for (const auto& [n, slot] : t.finalized_slot)
            fin[trace.node_names[std::size_t(n)]] = slot;
        tj["finalizedSlot"] = fin;
        tj["revertedAfterFinal"] = t.reverted_after_final;
        tracked.push_back(tj);
    }
    j["tracked"] = tracked;
    return j;
}

}  // namespace

void write_summary_json(const ConvergenceReport& report, const Trace& trace, std::ostream& os) {
    os << report_json(report, trace).dump(2) << "\n";
}

std::string analysis_json(const ConvergenceReport& report, const Trace& trace, Theta theta) {
    ojson j = report_json(report, trace);
    ojson th;
    th["num"] = theta.num;
    th["den"] = theta.den;
    j["theta"] = th;
    ojson mu = ojson::array();
    for (const auto& [slot, margin] : report.slot_margin) {
        ojson row;
        row["slot"] = slot;
        row["margin"] = margin;  // 2*delta - totalSupply for the final-chain branch
        row["muFromTip"] = report.mu_from_tip.at(slot);
        mu.push_back(row);
    }
    j["safetyMargins"] = mu;
    return j.dump(2) + "\n";
}

}  // namespace tanglesim
