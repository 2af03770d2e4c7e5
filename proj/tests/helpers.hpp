#pragma once

// Shared test utilities: transaction factories, a random tangle generator,
// and a from-scratch coverage oracle that recomputes baseline states, rooted
// sets and coverage straight from raw transactions and the definitions,
// independently of the incremental bookkeeping inside UtxoTangle.

#include <map>
#include <random>
#include <set>

#include "tanglesim/inflation.hpp"
#include "tanglesim/ledger.hpp"
#include "tanglesim/tangle.hpp"

namespace tanglesim::test {

inline LedgerParams small_params(Amount supply = 1'000'000, Amount min_seq = 100'000) {
    LedgerParams p;
    p.initial_supply = supply;
    p.min_sequencer_amount = min_seq;
    p.max_branch_bonus = 97;
    return p;
}

// A small world: keys, genesis layout, tx builders.
struct World {
    LedgerParams params;
    std::shared_ptr<IdentityRegistry> registry = std::make_shared<IdentityRegistry>();
    std::vector<Output> genesis_outputs;
    std::map<std::string, KeyPair> keys;
    std::map<std::string, OutputId> grants;  // name -> genesis output

    explicit World(LedgerParams p) : params(std::move(p)) {
        genesis_outputs.push_back(make_genesis_stem());
    }

    KeyPair key(const std::string& name) {
        auto it = keys.find(name);
        if (it != keys.end()) return it->second;
        KeyPair k = derive_keypair("test/" + name);
        registry->add(k);
        keys[name] = k;
        return k;
    }

    OutputId add_sequencer(const std::string& name, Amount amount) {
        KeyPair k = key(name);
        Output o;
        o.amount = amount;
        o.lock = AddressLock{k.id};
        o.chain = ChainConstraint{ChainId{}, true};
        o.sequencer = true;
        o.vrf_value = Digest{};
        genesis_outputs.push_back(std::move(o));
        OutputId oid{kGenesisTxId, std::uint16_t(genesis_outputs.size() - 1)};
        grants[name] = oid;
        return oid;
    }

    OutputId add_wallet(const std::string& name, Amount amount) {
        KeyPair k = key(name);
        Output o;
        o.amount = amount;
        o.lock = AddressLock{k.id};
        genesis_outputs.push_back(std::move(o));
        OutputId oid{kGenesisTxId, std::uint16_t(genesis_outputs.size() - 1)};
        grants[name] = oid;
        return oid;
    }

    LedgerState genesis() const {
        Amount sum = 0;
        for (const Output& o : genesis_outputs) sum = must_add(sum, o.amount);
        std::vector<Output> all = genesis_outputs;
        if (sum < params.initial_supply) {
            Output rest;
            rest.amount = params.initial_supply - sum;
            rest.lock = AddressLock{derive_keypair("test/reserve").id};
            all.push_back(std::move(rest));
        }
        return make_genesis(params, all);
    }

    std::unique_ptr<UtxoTangle> tangle() const {
        return std::make_unique<UtxoTangle>(params, genesis(), registry);
    }

    ChainId chain_of(const std::string& name) const {
        return derive_chain_id(grants.at(name));
    }

    Transaction branch_tx(const UtxoTangle& t, const std::string& who, const OutputId& pred_id,
                          const OutputId& stem_id, std::uint64_t boundary_ticks,
                          const ChainId& chain) {
        const Output* pred = t.output_of(pred_id);
        KeyPair k = key(who);
        std::uint64_t slot = boundary_ticks / kTicksPerSlot;
        Amount chain_part =
            chain_inflation(pred->amount, Timestamp{pred_id.tx.ticks()}.slot(), slot, params);
        BranchBonus bonus = evaluate_branch_bonus(k.secret, pred->vrf_value.value_or(Digest{}),
                                                  slot, params);
        Transaction tx;
        tx.timestamp = Timestamp{boundary_ticks};
        tx.inputs.push_back(TxInput{pred_id, false});
        tx.inputs.push_back(TxInput{stem_id, false});
        Output m;
        m.amount = must_add(pred->amount, must_add(chain_part, bonus.bonus));
        m.lock = AddressLock{k.id};
        m.chain = ChainConstraint{chain, false};
        m.sequencer = true;
        m.declared_inflation = must_add(chain_part, bonus.bonus);
        m.vrf_value = bonus.rnd;
        tx.outputs.push_back(std::move(m));
        tx.outputs.push_back(make_genesis_stem());
        sign_transaction(k, tx);
        return tx;
    }

    Transaction milestone_tx(const UtxoTangle& t, const std::string& who, const OutputId& pred_id,
                             std::uint64_t ticks, const ChainId& chain, std::vector<TxId> endorse,
                             std::vector<OutputId> extra = {}) {
        const Output* pred = t.output_of(pred_id);
        KeyPair k = key(who);
        std::uint64_t slot = Timestamp{ticks}.slot();
        Amount chain_part =
            chain_inflation(pred->amount, Timestamp{pred_id.tx.ticks()}.slot(), slot, params);
        Transaction tx;
        tx.timestamp = Timestamp{ticks};
        tx.inputs.push_back(TxInput{pred_id, false});
        Amount fees = 0;
        for (const OutputId& x : extra) {
            tx.inputs.push_back(TxInput{x, false});
            fees = must_add(fees, t.output_of(x)->amount);
        }
        tx.endorsements = std::move(endorse);
        Output m;
        m.amount = must_add(must_add(pred->amount, chain_part), fees);
        m.lock = AddressLock{k.id};
        m.chain = ChainConstraint{chain, false};
        m.sequencer = true;
        m.declared_inflation = chain_part;
        m.vrf_value = pred->vrf_value.value_or(Digest{});
        tx.outputs.push_back(std::move(m));
        sign_transaction(k, tx);
        return tx;
    }

    Transaction transfer_tx(const std::string& who, const std::vector<OutputId>& inputs,
                            Amount in_total, const Address& to, Amount amount,
                            const ChainId& tag_target, Amount fee, std::uint64_t ticks) {
        KeyPair k = key(who);
        Transaction tx;
        tx.timestamp = Timestamp{ticks};
        for (const OutputId& i : inputs) tx.inputs.push_back(TxInput{i, false});
        Output pay;
        pay.amount = amount;
        pay.lock = AddressLock{to};
        Output tag;
        tag.amount = fee;
        tag.lock = TagAlongLock{tag_target, k.id, std::uint32_t(Timestamp{ticks}.slot())};
        Output rest;
        rest.amount = must_sub(must_sub(in_total, amount), fee);
        rest.lock = AddressLock{k.id};
        tx.outputs.push_back(std::move(pay));
        tx.outputs.push_back(std::move(tag));
        if (rest.amount > 0) tx.outputs.push_back(std::move(rest));
        sign_transaction(k, tx);
        return tx;
    }
};

inline TxId attach_ok(UtxoTangle& t, const Transaction& tx) {
    AttachResult r = t.attach(tx);
    if (r.status != VertexStatus::Valid)
        throw std::logic_error(std::string("expected valid attach, got ") +
                               (r.status == VertexStatus::Pending ? "pending" : r.detail));
    return r.id;
}

// ---------------------------------------------------------------------------
// From-scratch oracle.

class CoverageOracle {
  public:
    CoverageOracle(const UtxoTangle& tangle, const LedgerParams& params)
        : tangle_(tangle), params_(params) {}

    // Full past cone from raw transactions (ids only, includes the root).
    std::set<TxId> full_cone(const TxId& id) const {
        std::set<TxId> seen;
        std::vector<TxId> stack{id};
        while (!stack.empty()) {
            TxId cur = stack.back();
            stack.pop_back();
            if (!seen.insert(cur).second) continue;
            const Transaction* tx = tangle_.raw(cur);
            if (!tx) throw std::logic_error("oracle: missing raw tx");
            for (const TxInput& in : tx->inputs)
                if (!in.id.tx.is_genesis()) stack.push_back(in.id.tx);
            for (const TxId& e : tx->endorsements) stack.push_back(e);
        }
        return seen;
    }

    // Committed state of a branch: genesis plus the branch's full cone applied
    // in timestamp order.
    LedgerState committed_state(const TxId& branch) const {
        LedgerState state = tangle_.genesis_state();
        if (branch.is_genesis()) return state;
        std::vector<TxId> order;
        for (const TxId& id : full_cone(branch)) order.push_back(id);
        std::sort(order.begin(), order.end());  // id order is timestamp-major
        for (const TxId& id : order) {
            Verdict v = apply_in_place(state, *tangle_.raw(id));
            if (!v.ok()) throw std::logic_error("oracle replay failed: " + v.detail);
        }
        return state;
    }

    TxId baseline(const TxId& id) const {
        const Transaction* tx = tangle_.raw(id);
        if (!tx->is_sequencer_tx()) throw std::logic_error("oracle: not a sequencer tx");
        if (tx->is_branch()) return id;
        std::size_t seq_idx = *tx->sequencer_output_index();
        ChainId own = effective_chain_id(OutputId{id, std::uint16_t(seq_idx)},
                                         *tx->outputs[seq_idx].chain);
        for (const TxInput& in : tx->inputs) {
            if (in.id.tx.is_genesis()) continue;
            const Transaction* p = tangle_.raw(in.id.tx);
            if (!p || in.id.index >= p->outputs.size()) continue;
            const Output& o = p->outputs[in.id.index];
            if (!o.chain || effective_chain_id(in.id, *o.chain) != own) continue;
            if (Timestamp{in.id.tx.ticks()}.slot() != tx->timestamp.slot()) continue;
            if (p->is_sequencer_tx()) return baseline(in.id.tx);
        }
        for (const TxId& e : tx->endorsements) return baseline(e);
        throw std::logic_error("oracle: baseline unresolvable");
    }

    TxId stem_pred(const TxId& branch) const {
        const Transaction* tx = tangle_.raw(branch);
        for (const TxInput& in : tx->inputs) {
            if (in.id.tx.is_genesis()) {
                const Output* o = tangle_.genesis_state().find(in.id);
                if (o && o->stem) return kGenesisTxId;
            } else {
                const Transaction* p = tangle_.raw(in.id.tx);
                if (p && in.id.index < p->outputs.size() && p->outputs[in.id.index].stem)
                    return in.id.tx;
            }
        }
        throw std::logic_error("oracle: branch without stem input");
    }

    std::set<OutputId> rooted(const TxId& id) const {
        const Transaction* tx = tangle_.raw(id);
        bool is_branch = tx->is_branch();
        TxId base = is_branch ? stem_pred(id) : baseline(id);
        LedgerState g = committed_state(base);

        std::size_t seq_idx = *tx->sequencer_output_index();
        ChainId own = effective_chain_id(OutputId{id, std::uint16_t(seq_idx)},
                                         *tx->outputs[seq_idx].chain);

        std::set<OutputId> out;
        // Any output of the reference state consumed anywhere in the full cone
        // is rooted; consumers inside the committed history consumed outputs
        // that are no longer in the state, so no explicit truncation is needed.
        for (const TxId& cid : full_cone(id)) {
            const Transaction* c = tangle_.raw(cid);
            for (const TxInput& in : c->inputs) {
                const Output* o = g.find(in.id);
                if (!o) continue;
                if (is_branch && o->chain && effective_chain_id(in.id, *o->chain) == own)
                    continue;
                out.insert(in.id);
            }
        }
        if (is_branch) {
            out.insert(OutputId{id, std::uint16_t(seq_idx)});
        } else {
            const Transaction* b = tangle_.raw(base);
            out.insert(OutputId{base, std::uint16_t(*b->sequencer_output_index())});
        }
        // Frozen delegations whose target chain is covered.
        std::uint64_t slot = tx->timestamp.slot();
        for (const auto& [oid, o] : g.outputs) {
            const auto* del = std::get_if<DelegationLock>(&o.lock);
            if (!del || !del->freeze_until_slot || *del->freeze_until_slot <= slot) continue;
            bool covered = is_branch && del->target == own;
            auto tip = g.chain_tips.find(del->target);
            if (!covered && tip != g.chain_tips.end() && out.count(tip->second)) covered = true;
            if (covered) out.insert(oid);
        }
        return out;
    }

    Amount delta(const TxId& id) const {
        const Transaction* tx = tangle_.raw(id);
        bool is_branch = tx->is_branch();
        TxId base = is_branch ? stem_pred(id) : baseline(id);
        LedgerState g = committed_state(base);
        Amount sum = 0;
        for (const OutputId& oid : rooted(id)) {
            if (oid.tx == id) {
                sum = must_add(sum, tx->outputs[oid.index].amount);
            } else {
                const Output* o = g.find(oid);
                if (!o) throw std::logic_error("oracle: rooted output not in state");
                sum = must_add(sum, o->amount);
            }
        }
        return sum;
    }

    Amount coverage(const TxId& id) const {
        const Transaction* tx = tangle_.raw(id);
        std::uint64_t slot = tx->timestamp.slot();
        if (slot <= 1) return params_.initial_supply;
        auto shift = [](Amount v, std::uint64_t k) { return k >= 64 ? 0 : v >> k; };
        if (tx->is_branch()) {
            TxId pred = stem_pred(id);
            std::uint64_t pred_slot = pred.is_genesis() ? 0 : Timestamp{pred.ticks()}.slot();
            Amount pred_cov = pred.is_genesis() ? params_.initial_supply : coverage(pred);
            return must_add(delta(id), shift(pred_cov, slot - pred_slot));
        }
        TxId base = baseline(id);
        return must_add(delta(id), shift(coverage(base), 1));
    }

  private:
    const UtxoTangle& tangle_;
    const LedgerParams& params_;
};

// ---------------------------------------------------------------------------
// Random well-formed tangles for property tests: several sequencers building
// branches and milestones over a few slots, wallets tagging along.

struct RandomTangle {
    World world;
    std::unique_ptr<UtxoTangle> tangle;
    std::vector<Transaction> txs;  // emission order
};

inline RandomTangle make_random_tangle(std::mt19937_64& rng, std::size_t max_txs) {
    const std::size_t n_seq = 1 + rng() % 3;
    World world(small_params(1'000'000, 50'000));
    std::vector<std::string> seq_names;
    for (std::size_t i = 0; i < n_seq; ++i) {
        std::string name = "s" + std::to_string(i);
        world.add_sequencer(name, 100'000 + rng() % 50'000);
        seq_names.push_back(name);
    }
    world.add_wallet("w", 10'000);

    RandomTangle rt{std::move(world), nullptr, {}};
    rt.tangle = rt.world.tangle();
    UtxoTangle& t = *rt.tangle;

    auto submit = [&](const Transaction& tx) {
        attach_ok(t, tx);
        rt.txs.push_back(tx);
    };

    struct SeqState {
        OutputId tip;
        std::uint64_t tip_ticks = 0;
    };
    std::map<std::string, SeqState> seq_state;
    for (const auto& name : seq_names)
        seq_state[name] = SeqState{rt.world.grants.at(name), 0};

    OutputId wallet_out = rt.world.grants.at("w");
    Amount wallet_amount = 10'000;
    std::uint64_t wallet_ticks = 0;
    std::vector<OutputId> pending_tags;

    const std::uint64_t slots = 2 + rng() % 3;
    for (std::uint64_t slot = 1; slot <= slots && rt.txs.size() < max_txs; ++slot) {
        std::uint64_t boundary = slot * kTicksPerSlot;
        // Random subset of sequencers branch; at least one.
        std::vector<TxId> slot_txs;
        bool branched = false;
        for (const auto& name : seq_names) {
            if (rt.txs.size() >= max_txs) break;
            if (branched && rng() % 2 == 0) continue;
            const BranchRecord* stem_rec = nullptr;
            for (std::uint64_t s = slot; s-- > 0;) {
                if (auto pref = t.preferred_branch(s)) {
                    stem_rec = t.branch_record(*pref);
                    break;
                }
                if (s == 0) break;
            }
            if (!stem_rec) stem_rec = &t.genesis_record();
            // The sequencer's consistent tip: from the stem state if needed.
            OutputId pred = seq_state[name].tip;
            CandidateEval eval;
            Transaction btx = rt.world.branch_tx(t, name, pred, stem_rec->stem_output, boundary,
                                                 rt.world.chain_of(name));
            eval = t.evaluate_candidate(btx);
            if (!eval.ok()) {
                auto tip_it = stem_rec->state.chain_tips.find(rt.world.chain_of(name));
                if (tip_it == stem_rec->state.chain_tips.end()) continue;
                pred = tip_it->second;
                btx = rt.world.branch_tx(t, name, pred, stem_rec->stem_output, boundary,
                                         rt.world.chain_of(name));
                if (!t.evaluate_candidate(btx).ok()) continue;
            }
            submit(btx);
            TxId bid = compute_tx_id(btx);
            seq_state[name] = SeqState{OutputId{bid, 0}, boundary};
            slot_txs.push_back(bid);
            branched = true;
        }
        if (!branched) break;

        // Wallet emits a transfer with a tag-along to a random sequencer.
        if (rt.txs.size() < max_txs && rng() % 2 == 0 && wallet_amount > 2'000) {
            std::uint64_t ticks = std::max(boundary + 1, wallet_ticks + 25);
            const std::string& target = seq_names[rng() % seq_names.size()];
            Amount fee = 10 + rng() % 50;
            Amount pay = 500;
            Transaction wtx = rt.world.transfer_tx(
                "w", {wallet_out}, wallet_amount, derive_keypair("test/recv").id, pay,
                rt.world.chain_of(target), fee, ticks);
            if (t.evaluate_candidate(wtx).ok()) {
                submit(wtx);
                TxId wid = compute_tx_id(wtx);
                pending_tags.push_back(OutputId{wid, 1});
                wallet_out = OutputId{wid, 2};
                wallet_amount = wallet_amount - pay - fee;
                wallet_ticks = ticks;
            }
        }

        // A few milestones with random endorsements and tag-along pickups.
        std::uint64_t ticks = boundary + 1;
        std::size_t beats = 1 + rng() % 4;
        for (std::size_t b = 0; b < beats && rt.txs.size() < max_txs; ++b) {
            const std::string& name = seq_names[rng() % seq_names.size()];
            ticks += 1 + rng() % 6;
            if (ticks >= boundary + kTicksPerSlot) break;
            std::vector<TxId> endorse;
            if (!slot_txs.empty() && rng() % 2 == 0) {
                TxId target = slot_txs[rng() % slot_txs.size()];
                if (target.ticks() + 1 <= ticks) endorse.push_back(target);
            }
            std::vector<OutputId> extra;
            if (!pending_tags.empty() && rng() % 2 == 0) {
                extra.push_back(pending_tags.back());
            }
            Transaction mtx = rt.world.milestone_tx(t, name, seq_state[name].tip, ticks,
                                                    rt.world.chain_of(name), endorse, extra);
            CandidateEval eval = t.evaluate_candidate(mtx);
            if (!eval.ok() && !extra.empty()) {
                extra.clear();
                mtx = rt.world.milestone_tx(t, name, seq_state[name].tip, ticks,
                                            rt.world.chain_of(name), endorse, {});
                eval = t.evaluate_candidate(mtx);
            }
            if (!eval.ok()) continue;
            submit(mtx);
            TxId mid = compute_tx_id(mtx);
            if (!extra.empty()) pending_tags.pop_back();
            seq_state[name] = SeqState{OutputId{mid, 0}, ticks};
            slot_txs.push_back(mid);
        }
    }
    return rt;
}

}  // namespace tanglesim::test
