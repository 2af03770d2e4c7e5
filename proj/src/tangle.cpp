#include "tanglesim/tangle.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace tanglesim {

namespace {

constexpr std::size_t kMaxPendingPerSender = 128;

Amount shift_div(Amount v, std::uint64_t k) { return k >= 64 ? 0 : v >> k; }

}  // namespace

const char* to_string(VertexStatus s) {
    switch (s) {
        case VertexStatus::Pending: return "pending";
        case VertexStatus::Valid: return "valid";
        case VertexStatus::Rejected: return "rejected";
    }
    return "unknown";
}

UtxoTangle::UtxoTangle(LedgerParams params, LedgerState genesis,
                       std::shared_ptr<const IdentityRegistry> registry)
    : params_(std::move(params)), registry_(std::move(registry)) {
    genesis_record_.branch = kGenesisTxId;
    genesis_record_.slot = 0;
    genesis_record_.state = std::move(genesis);
    genesis_record_.included = std::make_shared<IncludedSet>();
    genesis_record_.delta = 0;
    genesis_record_.coverage = params_.initial_supply;
    genesis_record_.has_milestone = false;
    for (const auto& [oid, out] : genesis_record_.state.outputs) {
        if (out.stem) genesis_record_.stem_output = oid;
    }
}

const Vertex* UtxoTangle::find(const TxId& id) const {
    auto it = vertices_.find(id);
    return it == vertices_.end() ? nullptr : it->second.get();
}

const Transaction* UtxoTangle::raw(const TxId& id) const {
    const Vertex* v = find(id);
    return v ? &v->tx : nullptr;
}

const BranchRecord* UtxoTangle::record_of(const TxId& id) const {
    if (id.is_genesis()) return &genesis_record_;
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

const BranchRecord* UtxoTangle::branch_record(const TxId& id) const { return record_of(id); }

const BranchRecord& UtxoTangle::genesis_record() const { return genesis_record_; }

bool UtxoTangle::resolve_inputs(const Transaction& tx, std::vector<ResolvedInput>& out,
                                std::vector<TxId>* missing) const {
    out.clear();
    bool complete = true;
    for (const TxInput& in : tx.inputs) {
        if (in.id.tx.is_genesis()) {
            const Output* o = genesis_record_.state.find(in.id);
            if (!o) {
                complete = false;
                continue;
            }
            out.push_back(ResolvedInput{in.id, *o});
            continue;
        }
        const Vertex* p = find(in.id.tx);
        if (p) {
            if (in.id.index >= p->tx.outputs.size()) {
                complete = false;
                continue;
            }
            out.push_back(ResolvedInput{in.id, p->tx.outputs[in.id.index]});
            continue;
        }
        // The producer may have been pruned while its output lives on in a
        // committed state; any state carrying the output holds the same value.
        const Output* o = nullptr;
        for (const auto& [bid, rec] : records_) {
            if ((o = rec.state.find(in.id)) != nullptr) break;
        }
        if (o) {
            out.push_back(ResolvedInput{in.id, *o});
        } else {
            complete = false;
            if (missing) missing->push_back(in.id.tx);
        }
    }
    return complete && out.size() == tx.inputs.size();
}

UtxoTangle::Analyzed UtxoTangle::analyze(const Transaction& tx, const TxId& id,
                                         std::span<const ResolvedInput> inputs) const {
    Analyzed a;
    a.verdict = validate_transaction(tx, inputs, params_, *registry_);
    if (!a.verdict.ok()) return a;

    const bool is_seq = tx.is_sequencer_tx();
    const bool is_branch = tx.is_branch();
    const std::uint64_t slot = tx.timestamp.slot();

    ChainId own_chain{};
    if (is_seq) {
        std::size_t seq_idx = *tx.sequencer_output_index();
        const Output& milestone = tx.outputs[seq_idx];
        own_chain = effective_chain_id(OutputId{id, std::uint16_t(seq_idx)}, *milestone.chain);
    }

    const BranchRecord* base = nullptr;
    TxId terminal{};

    if (is_branch) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            if (inputs[i].output.stem) {
                a.stem_pred = inputs[i].id.tx;
                break;
            }
        }
        base = record_of(*a.stem_pred);
        if (!base) {
            a.verdict = Verdict::fail(TxError::SequencerRule, "stem predecessor is not a branch");
            return a;
        }
        if (base->slot >= slot) {
            a.verdict = Verdict::fail(TxError::SequencerRule, "stem predecessor not in an earlier slot");
            return a;
        }
        a.baseline = id;
        terminal = *a.stem_pred;
    } else if (is_seq) {
        // Baseline rules: (b) same-slot chain predecessor, else (c) endorsement.
        std::optional<TxId> baseline;
        for (const ResolvedInput& in : inputs) {
            if (!in.output.chain || in.chain_id() != own_chain) continue;
            if (in.timestamp().slot() != slot) continue;
            const Vertex* p = find(in.id.tx);
            if (p && p->baseline) baseline = p->baseline;
        }
        if (!baseline) {
            for (const TxId& e : tx.endorsements) {
                const Vertex* p = find(e);
                if (p && p->baseline) {
                    baseline = p->baseline;
                    break;
                }
            }
        }
        if (!baseline) {
            a.verdict = Verdict::fail(TxError::BaselineRule, "baseline unresolvable");
            return a;
        }
        a.baseline = baseline;
        base = record_of(*baseline);
        if (!base) {
            a.verdict = Verdict::fail(TxError::BaselineRule, "baseline branch has no record");
            return a;
        }
        terminal = *baseline;
    }

    // Combined walk: collects the uncommitted past cone, detects double
    // spends against both the cone itself and the committed history, and
    // gathers rooted outputs for sequencer transactions.
    std::unordered_set<TxId, TxIdHash> visited;
    std::unordered_map<OutputId, TxId, OutputIdHash> consumed;
    std::set<OutputId> rooted;
    std::vector<std::pair<TxId, const Transaction*>> cone;
    std::vector<const Transaction*> stack;
    std::vector<TxId> stack_ids;

    visited.insert(id);
    cone.emplace_back(id, &tx);
    stack.push_back(&tx);
    stack_ids.push_back(id);

    auto committed = [&](const TxId& p) {
        if (!base) return p.is_genesis();
        return p.is_genesis() || p == terminal || base->included->contains(p);
    };

    while (!stack.empty()) {
        const Transaction* cur = stack.back();
        TxId cur_id = stack_ids.back();
        stack.pop_back();
        stack_ids.pop_back();

        for (const TxInput& in : cur->inputs) {
            auto [it, fresh] = consumed.emplace(in.id, cur_id);
            if (!fresh && it->second != cur_id) {
                a.verdict = Verdict::fail(TxError::Conflict,
                                          "double spend of " + in.id.hex() + " in the past cone");
                return a;
            }
            if (base && base->state.contains(in.id)) {
                // A branch's own chain lineage is superseded by its freshly
                // produced milestone; everything else it reaches is rooted.
                const Output* o = base->state.find(in.id);
                if (!(is_branch && o->chain &&
                      effective_chain_id(in.id, *o->chain) == own_chain))
                    rooted.insert(in.id);
                continue;  // the walk ends at the baseline state
            }
            const TxId& producer = in.id.tx;
            if (committed(producer)) {
                if (base) {
                    a.verdict = Verdict::fail(
                        TxError::Conflict,
                        "input " + in.id.hex() + " already consumed in the committed history");
                    return a;
                }
                continue;  // user tx consuming a genesis output: walk ends here
            }
            if (visited.count(producer)) continue;
            const Vertex* pv = find(producer);
            if (!pv || pv->status != VertexStatus::Valid) {
                a.verdict = Verdict::fail(TxError::MissingInput,
                                          "producer " + producer.hex() + " unavailable");
                return a;
            }
            visited.insert(producer);
            cone.emplace_back(producer, &pv->tx);
            stack.push_back(&pv->tx);
            stack_ids.push_back(producer);
        }
        for (const TxId& e : cur->endorsements) {
            if (committed(e) || visited.count(e)) continue;
            const Vertex* pv = find(e);
            if (!pv || pv->status != VertexStatus::Valid) {
                a.verdict =
                    Verdict::fail(TxError::MissingInput, "endorsed " + e.hex() + " unavailable");
                return a;
            }
            visited.insert(e);
            cone.emplace_back(e, &pv->tx);
            stack.push_back(&pv->tx);
            stack_ids.push_back(e);
        }
    }

    if (is_seq) {
        Amount delta = 0;
        // The baseline's own sequencer output is rooted by definition. For a
        // branch that is its own freshly produced milestone.
        if (is_branch) {
            std::size_t seq_idx = *tx.sequencer_output_index();
            rooted.insert(OutputId{id, std::uint16_t(seq_idx)});
            delta = must_add(delta, tx.outputs[seq_idx].amount);
        } else if (base->has_milestone) {
            rooted.insert(base->milestone);
        }
        // Frozen delegations count while their target chain is covered.
        for (const auto& [oid, target] : base->frozen) {
            const Output* o = base->state.find(oid);
            if (!o) continue;
            const auto* lock = std::get_if<DelegationLock>(&o->lock);
            if (!lock || !lock->freeze_until_slot || *lock->freeze_until_slot <= slot) continue;
            bool covered = false;
            if (is_branch && target == own_chain) covered = true;
            auto tip = base->state.chain_tips.find(target);
            if (!covered && tip != base->state.chain_tips.end() && rooted.count(tip->second))
                covered = true;
            if (covered) rooted.insert(oid);
        }
        for (const OutputId& oid : rooted) {
            if (const Output* o = base->state.find(oid)) delta = must_add(delta, o->amount);
        }
        a.delta = delta;
        if (slot <= 1) {
            a.coverage = params_.initial_supply;
        } else if (is_branch) {
            const BranchRecord* pred = record_of(*a.stem_pred);
            a.coverage = must_add(delta, shift_div(pred->coverage, slot - pred->slot));
        } else {
            a.coverage = must_add(delta, shift_div(base->coverage, slot - base->slot + 1));
        }
        a.rooted.assign(rooted.begin(), rooted.end());
    }

    std::sort(cone.begin(), cone.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    a.cone.clear();
    for (auto& [cid, ctx_] : cone) {
        (void)ctx_;
        const Vertex* v = find(cid);
        if (v) a.cone.push_back(v);
    }
    return a;
}

AttachResult UtxoTangle::attach(const Transaction& tx) {
    AttachResult res;
    res.id = compute_tx_id(tx);

    if (const Vertex* existing = find(res.id)) {
        res.duplicate = true;
        res.status = existing->status;
        res.code = existing->reject_code;
        return res;
    }

    auto v = std::make_unique<Vertex>();
    v->tx = tx;
    v->id = res.id;
    Vertex* vp = v.get();
    vertices_.emplace(res.id, std::move(v));

    // Dependency resolution: producers of inputs and endorsement targets.
    std::set<TxId> parents;
    for (const TxInput& in : tx.inputs)
        if (!in.id.tx.is_genesis()) parents.insert(in.id.tx);
    for (const TxId& e : tx.endorsements) parents.insert(e);

    bool bad_parent = false;
    std::set<TxId> unresolved;
    for (const TxId& p : parents) {
        const Vertex* pv = find(p);
        if (!pv) {
            // Committed-but-pruned producers still resolve through records.
            bool committed = false;
            for (const auto& [bid, rec] : records_) {
                if (rec.included->contains(p)) {
                    committed = true;
                    break;
                }
            }
            if (!committed) unresolved.insert(p);
        } else if (pv->status == VertexStatus::Rejected) {
            bad_parent = true;
        } else if (pv->status == VertexStatus::Pending) {
            unresolved.insert(p);
        }
    }

    std::vector<TxId> newly_valid;
    if (bad_parent) {
        vp->status = VertexStatus::Rejected;
        vp->reject_code = TxError::BadParent;
        vp->reject_detail = "depends on a rejected transaction";
        finalize_status(*vp, newly_valid);
    } else if (!unresolved.empty()) {
        std::size_t& budget = pending_per_sender_[tx.sender];
        if (budget >= kMaxPendingPerSender) {
            vp->status = VertexStatus::Rejected;
            vp->reject_code = TxError::Shape;
            vp->reject_detail = "pending budget exceeded for sender";
            finalize_status(*vp, newly_valid);
        } else {
            ++budget;
            vp->status = VertexStatus::Pending;
            vp->waiting = unresolved.size();
            for (const TxId& p : unresolved) {
                parked_[p].push_back(res.id);
                if (!find(p)) res.missing.push_back(p);
            }
        }
    } else {
        validate_now(*vp, newly_valid);
    }

    res.status = vp->status;
    res.code = vp->reject_code;
    res.detail = vp->reject_detail;
    res.newly_valid = std::move(newly_valid);
    return res;
}

void UtxoTangle::validate_now(Vertex& v, std::vector<TxId>& newly_valid) {
    std::vector<ResolvedInput> inputs;
    std::vector<TxId> missing;
    if (!resolve_inputs(v.tx, inputs, &missing)) {
        v.status = VertexStatus::Rejected;
        v.reject_code = TxError::MissingInput;
        v.reject_detail = "inputs unresolvable";
        finalize_status(v, newly_valid);
        return;
    }
    Analyzed a = analyze(v.tx, v.id, inputs);
    if (!a.verdict.ok()) {
        v.status = VertexStatus::Rejected;
        v.reject_code = a.verdict.code;
        v.reject_detail = a.verdict.detail;
        finalize_status(v, newly_valid);
        return;
    }

    v.status = VertexStatus::Valid;
    v.baseline = a.baseline;
    v.stem_predecessor = a.stem_pred;
    if (v.tx.is_sequencer_tx()) {
        v.delta = a.delta;
        v.coverage = a.coverage;
        v.rooted = a.rooted;
        sequencers_by_slot_[v.slot()].push_back(v.id);
    }

    for (std::size_t i = 0; i < v.tx.inputs.size(); ++i) {
        const TxInput& in = v.tx.inputs[i];
        consumers_[in.id].push_back(v.id);
        if (!in.id.tx.is_genesis()) {
            if (Vertex* p = const_cast<Vertex*>(find(in.id.tx))) p->children.insert(v.id);
        }
        const Output& consumed_out = inputs[i].output;
        if (const auto* tal = std::get_if<TagAlongLock>(&consumed_out.lock)) {
            auto it = tag_alongs_.find(tal->target);
            if (it != tag_alongs_.end()) it->second.erase(in.id);
        } else if (const auto* del = std::get_if<DelegationLock>(&consumed_out.lock)) {
            auto it = delegations_.find(del->target);
            if (it != delegations_.end()) it->second.erase(in.id);
        }
    }
    for (const TxId& e : v.tx.endorsements) {
        if (Vertex* p = const_cast<Vertex*>(find(e))) p->children.insert(v.id);
    }
    for (std::size_t i = 0; i < v.tx.outputs.size(); ++i) {
        const Output& o = v.tx.outputs[i];
        OutputId oid{v.id, std::uint16_t(i)};
        if (const auto* tal = std::get_if<TagAlongLock>(&o.lock)) {
            tag_alongs_[tal->target].insert(oid);
        } else if (const auto* del = std::get_if<DelegationLock>(&o.lock)) {
            delegations_[del->target].insert(oid);
        }
    }

    if (v.is_branch()) make_branch_record(v, a);

    finalize_status(v, newly_valid);
}

void UtxoTangle::finalize_status(Vertex& v, std::vector<TxId>& newly_valid) {
    if (v.status == VertexStatus::Valid) newly_valid.push_back(v.id);

    auto it = parked_.find(v.id);
    if (it == parked_.end()) return;
    std::vector<TxId> waiters = std::move(it->second);
    parked_.erase(it);

    for (const TxId& wid : waiters) {
        Vertex* w = const_cast<Vertex*>(find(wid));
        if (!w || w->status != VertexStatus::Pending) continue;
        auto pb = pending_per_sender_.find(w->tx.sender);
        if (v.status == VertexStatus::Rejected) {
            w->status = VertexStatus::Rejected;
            w->reject_code = TxError::BadParent;
            w->reject_detail = "depends on a rejected transaction";
            if (pb != pending_per_sender_.end() && pb->second > 0) --pb->second;
            finalize_status(*w, newly_valid);
            continue;
        }
        if (--w->waiting == 0) {
            if (pb != pending_per_sender_.end() && pb->second > 0) --pb->second;
            validate_now(*w, newly_valid);
        }
    }
}

void UtxoTangle::make_branch_record(const Vertex& v, const Analyzed& a) {
    const BranchRecord* pred = record_of(*a.stem_pred);
    BranchRecord rec;
    rec.branch = v.id;
    rec.stem_pred = *a.stem_pred;
    rec.slot = v.slot();
    rec.delta = a.delta;
    rec.coverage = a.coverage;
    rec.state = pred->state;

    auto inc = std::make_shared<IncludedSet>();
    inc->parent = pred->included;
    for (const Vertex* cv : a.cone) {
        if (Verdict verdict = apply_in_place(rec.state, cv->tx); !verdict.ok())
            throw std::logic_error("branch replay failed: " + verdict.detail);
        inc->delta.insert(cv->id);
    }
    rec.state.slot = rec.slot;
    rec.included = std::move(inc);

    rec.stem_output = OutputId{v.id, std::uint16_t(*v.tx.stem_output_index())};
    rec.milestone = OutputId{v.id, std::uint16_t(*v.tx.sequencer_output_index())};
    rec.has_milestone = true;

    for (const auto& [oid, out] : rec.state.outputs) {
        if (const auto* del = std::get_if<DelegationLock>(&out.lock)) {
            if (del->freeze_until_slot) rec.frozen.emplace_back(oid, del->target);
        }
    }

    branches_by_slot_[rec.slot].push_back(v.id);
    records_.emplace(v.id, std::move(rec));
}

CandidateEval UtxoTangle::evaluate_candidate(const Transaction& tx) const {
    CandidateEval e;
    e.id = compute_tx_id(tx);
    std::vector<ResolvedInput> inputs;
    if (!resolve_inputs(tx, inputs, nullptr)) {
        e.verdict = Verdict::fail(TxError::MissingInput, "inputs unresolvable");
        return e;
    }
    Analyzed a = analyze(tx, e.id, inputs);
    e.verdict = a.verdict;
    e.baseline = a.baseline;
    e.delta = a.delta;
    e.coverage = a.coverage;
    return e;
}

std::vector<TxId> UtxoTangle::past_cone(const TxId& id, bool stop_at_baseline) const {
    const Vertex* root = find(id);
    if (!root) throw std::out_of_range("unknown transaction " + id.hex());

    const BranchRecord* base = nullptr;
    TxId terminal{};
    if (stop_at_baseline && root->baseline) {
        base = record_of(root->is_branch() ? *root->stem_predecessor : *root->baseline);
        terminal = root->is_branch() ? *root->stem_predecessor : *root->baseline;
    }

    std::unordered_set<TxId, TxIdHash> visited{id};
    std::vector<const Vertex*> stack{root};
    while (!stack.empty()) {
        const Vertex* cur = stack.back();
        stack.pop_back();
        auto descend = [&](const TxId& p) {
            if (p.is_genesis() || visited.count(p)) return;
            if (base && (p == terminal || base->included->contains(p))) return;
            const Vertex* pv = find(p);
            if (!pv) return;
            visited.insert(p);
            stack.push_back(pv);
        };
        for (const TxInput& in : cur->tx.inputs) {
            if (base && base->state.contains(in.id)) continue;
            descend(in.id.tx);
        }
        for (const TxId& e : cur->tx.endorsements) descend(e);
    }
    std::vector<TxId> out(visited.begin(), visited.end());
    std::sort(out.begin(), out.end());
    return out;
}

bool UtxoTangle::is_conflicting(const TxId& a, const TxId& b) const {
    if (!find(a) || !find(b)) throw std::out_of_range("unknown transaction");
    if (a == b) return false;

    std::unordered_set<TxId, TxIdHash> visited;
    std::unordered_map<OutputId, TxId, OutputIdHash> consumed;
    std::vector<const Vertex*> stack;

    auto seed = [&](const TxId& id) {
        if (visited.insert(id).second) stack.push_back(find(id));
    };
    seed(a);
    seed(b);
    while (!stack.empty()) {
        const Vertex* cur = stack.back();
        stack.pop_back();
        for (const TxInput& in : cur->tx.inputs) {
            auto [it, fresh] = consumed.emplace(in.id, cur->id);
            if (!fresh && it->second != cur->id) return true;
            if (in.id.tx.is_genesis() || visited.count(in.id.tx)) continue;
            if (const Vertex* pv = find(in.id.tx)) {
                visited.insert(in.id.tx);
                stack.push_back(pv);
            }
        }
        for (const TxId& e : cur->tx.endorsements) {
            if (visited.count(e)) continue;
            if (const Vertex* pv = find(e)) {
                visited.insert(e);
                stack.push_back(pv);
            }
        }
    }
    return false;
}

std::optional<TxId> UtxoTangle::baseline_of(const TxId& id) const {
    const Vertex* v = find(id);
    return v ? v->baseline : std::nullopt;
}

std::vector<OutputId> UtxoTangle::rooted_set(const TxId& id) const {
    const Vertex* v = find(id);
    if (!v) throw std::out_of_range("unknown transaction");
    return v->rooted;
}

Amount UtxoTangle::coverage_delta(const TxId& id) const {
    const Vertex* v = find(id);
    if (!v || !v->delta) throw std::out_of_range("no coverage delta for " + id.hex());
    return *v->delta;
}

Amount UtxoTangle::coverage_of(const TxId& id) const {
    const Vertex* v = find(id);
    if (!v || !v->coverage) throw std::out_of_range("no coverage for " + id.hex());
    return *v->coverage;
}

std::optional<TxId> UtxoTangle::preferred_branch(std::uint64_t slot) const {
    auto it = branches_by_slot_.find(slot);
    if (it == branches_by_slot_.end() || it->second.empty()) return std::nullopt;
    const TxId* best = nullptr;
    Amount best_cov = 0;
    for (const TxId& b : it->second) {
        const Vertex* v = find(b);
        if (!v || v->status != VertexStatus::Valid) continue;
        Amount cov = v->coverage.value_or(0);
        if (!best || cov > best_cov || (cov == best_cov && b > *best)) {
            best = &b;
            best_cov = cov;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

std::vector<TxId> UtxoTangle::branches_at(std::uint64_t slot) const {
    auto it = branches_by_slot_.find(slot);
    if (it == branches_by_slot_.end()) return {};
    std::vector<TxId> out = it->second;
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::uint64_t> UtxoTangle::latest_branch_slot() const {
    if (branches_by_slot_.empty()) return std::nullopt;
    return branches_by_slot_.rbegin()->first;
}

bool UtxoTangle::is_included(const TxId& tx_id, const TxId& branch_id) const {
    const BranchRecord* rec = record_of(branch_id);
    if (!rec) throw std::out_of_range("unknown branch " + branch_id.hex());
    if (!find(tx_id) && !tx_id.is_genesis()) {
        bool known = false;
        for (const auto& [bid, r] : records_)
            if (r.included->contains(tx_id)) known = true;
        if (!known) throw std::out_of_range("unknown transaction " + tx_id.hex());
    }
    return rec->included->contains(tx_id);
}

std::vector<TxId> UtxoTangle::sequencer_txs_in_slot(std::uint64_t slot) const {
    auto it = sequencers_by_slot_.find(slot);
    if (it == sequencers_by_slot_.end()) return {};
    std::vector<TxId> out;
    for (const TxId& id : it->second) {
        const Vertex* v = find(id);
        if (v && v->status == VertexStatus::Valid) out.push_back(id);
    }
    std::sort(out.begin(), out.end(), [this](const TxId& x, const TxId& y) {
        Amount cx = find(x)->coverage.value_or(0);
        Amount cy = find(y)->coverage.value_or(0);
        if (cx != cy) return cx > cy;
        return x > y;
    });
    return out;
}

std::vector<OutputId> UtxoTangle::tag_along_outputs(const ChainId& target) const {
    auto it = tag_alongs_.find(target);
    if (it == tag_alongs_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<OutputId> UtxoTangle::delegation_outputs(const ChainId& target) const {
    auto it = delegations_.find(target);
    if (it == delegations_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

const Output* UtxoTangle::output_of(const OutputId& id) const {
    if (id.tx.is_genesis()) return genesis_record_.state.find(id);
    const Vertex* v = find(id.tx);
    if (!v || id.index >= v->tx.outputs.size()) return nullptr;
    return &v->tx.outputs[id.index];
}

std::vector<TxId> UtxoTangle::heads() const {
    std::vector<TxId> out;
    for (const auto& [id, v] : vertices_) {
        if (v->status != VertexStatus::Valid) continue;
        bool leaf = true;
        for (const TxId& c : v->children) {
            const Vertex* cv = find(c);
            if (cv && cv->status == VertexStatus::Valid) {
                leaf = false;
                break;
            }
        }
        if (leaf) out.push_back(id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TxId> UtxoTangle::wanted_parents() const {
    std::vector<TxId> out;
    for (const auto& [missing, waiters] : parked_) {
        if (find(missing)) continue;
        bool live = false;
        for (const TxId& w : waiters) {
            const Vertex* wv = find(w);
            if (wv && wv->status == VertexStatus::Pending) live = true;
        }
        if (live) out.push_back(missing);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t UtxoTangle::expire_pending(std::uint64_t before_slot) {
    std::vector<TxId> drop;
    for (const auto& [id, v] : vertices_) {
        if (v->status == VertexStatus::Pending && v->slot() < before_slot) drop.push_back(id);
    }
    for (const TxId& id : drop) {
        const Vertex* v = find(id);
        auto pb = pending_per_sender_.find(v->tx.sender);
        if (pb != pending_per_sender_.end() && pb->second > 0) --pb->second;
        vertices_.erase(id);
    }
    return drop.size();
}

PruneStats UtxoTangle::prune(const std::vector<TxId>& keep_chain, std::uint64_t horizon_slots) {
    PruneStats stats;
    if (branches_by_slot_.empty()) return stats;
    std::uint64_t latest = branches_by_slot_.rbegin()->first;
    std::uint64_t cutoff = latest > horizon_slots ? latest - horizon_slots : 0;

    std::shared_ptr<const IncludedSet> kept_included;
    std::uint64_t kept_slot = 0;
    std::unordered_set<TxId, TxIdHash> keep_branches(keep_chain.begin(), keep_chain.end());
    for (const TxId& b : keep_chain) {
        const BranchRecord* rec = record_of(b);
        if (rec && (!kept_included || rec->slot >= kept_slot)) {
            kept_included = rec->included;
            kept_slot = rec->slot;
        }
    }

    std::vector<TxId> drop;
    for (const auto& [id, v] : vertices_) {
        if (v->slot() >= cutoff) continue;
        if (kept_included && kept_included->contains(id)) continue;
        if (keep_branches.count(id)) continue;
        drop.push_back(id);
    }

    std::unordered_set<TxId, TxIdHash> dropped(drop.begin(), drop.end());
    for (const TxId& id : drop) {
        const Vertex* v = find(id);
        for (const TxInput& in : v->tx.inputs) {
            auto it = consumers_.find(in.id);
            if (it != consumers_.end()) {
                auto& vec = it->second;
                vec.erase(std::remove(vec.begin(), vec.end(), id), vec.end());
                if (vec.empty()) consumers_.erase(it);
            }
        }
        for (std::size_t i = 0; i < v->tx.outputs.size(); ++i) {
            OutputId oid{id, std::uint16_t(i)};
            const Output& o = v->tx.outputs[i];
            if (const auto* tal = std::get_if<TagAlongLock>(&o.lock)) {
                auto it = tag_alongs_.find(tal->target);
                if (it != tag_alongs_.end()) it->second.erase(oid);
            } else if (const auto* del = std::get_if<DelegationLock>(&o.lock)) {
                auto it = delegations_.find(del->target);
                if (it != delegations_.end()) it->second.erase(oid);
            }
        }
        if (v->is_branch() && records_.count(id)) {
            records_.erase(id);
            ++stats.branches;
        }
        vertices_.erase(id);
        ++stats.vertices;
    }

    for (auto& [slot, ids] : branches_by_slot_)
        ids.erase(std::remove_if(ids.begin(), ids.end(),
                                 [&](const TxId& x) { return dropped.count(x) != 0; }),
                  ids.end());
    for (auto& [slot, ids] : sequencers_by_slot_)
        ids.erase(std::remove_if(ids.begin(), ids.end(),
                                 [&](const TxId& x) { return dropped.count(x) != 0; }),
                  ids.end());
    for (auto& [id, v] : vertices_) {
        for (const TxId& d : drop) v->children.erase(d);
    }
    return stats;
}

TangleStats UtxoTangle::stats() const {
    TangleStats s;
    for (const auto& [id, v] : vertices_) {
        switch (v->status) {
            case VertexStatus::Valid: ++s.valid; break;
            case VertexStatus::Pending: ++s.pending; break;
            case VertexStatus::Rejected:
                ++s.rejected;
                ++s.rejected_by_code[int(v->reject_code)];
                break;
        }
    }
    return s;
}

std::string UtxoTangle::dump() const {
    std::vector<TxId> ids;
    ids.reserve(vertices_.size());
    for (const auto& [id, v] : vertices_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    std::ostringstream os;
    for (const TxId& id : ids) {
        const Vertex* v = find(id);
        os << v->id.short_hex() << " ts=" << v->tx.timestamp.ticks << " slot=" << v->slot()
           << " tick=" << v->tx.timestamp.ticks_in_slot() << " " << to_string(v->status);
        if (v->status == VertexStatus::Rejected)
            os << "(" << to_string(v->reject_code) << ")";
        os << " in=[";
        for (std::size_t i = 0; i < v->tx.inputs.size(); ++i) {
            if (i) os << ",";
            os << v->tx.inputs[i].id.tx.short_hex() << "." << v->tx.inputs[i].id.index;
        }
        os << "] endorse=[";
        for (std::size_t i = 0; i < v->tx.endorsements.size(); ++i) {
            if (i) os << ",";
            os << v->tx.endorsements[i].short_hex();
        }
        os << "]";
        if (v->baseline) os << " baseline=" << v->baseline->short_hex();
        if (v->delta) os << " delta=" << *v->delta;
        if (v->coverage) os << " coverage=" << *v->coverage;
        if (v->is_branch()) os << " branch";
        os << "\n";
    }
    return os.str();
}

}  // namespace tanglesim
