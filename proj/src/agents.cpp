#include "tanglesim/agents.hpp"

#include <algorithm>

namespace tanglesim {

namespace {

constexpr std::size_t kHistoryLimit = 64;

// Effective chain id of the sequencer milestone produced by a valid vertex.
std::optional<ChainId> milestone_chain_of(const UtxoTangle& view, const TxId& id) {
    const Vertex* v = view.find(id);
    if (!v) return std::nullopt;
    auto idx = v->tx.sequencer_output_index();
    if (!idx) return std::nullopt;
    const Output& o = v->tx.outputs[*idx];
    return effective_chain_id(OutputId{id, std::uint16_t(*idx)}, *o.chain);
}

}  // namespace

SequencerAgent::SequencerAgent(SequencerConfig cfg, KeyPair key, OutputId genesis_output,
                               const LedgerParams& params)
    : cfg_(std::move(cfg)), key_(key), params_(params) {
    chain_ = derive_chain_id(genesis_output);
    OwnMilestone origin;
    origin.tx = genesis_output.tx;
    origin.output = genesis_output;
    origin.ticks = 0;
    origin.amount = cfg_.amount;
    history_.push_back(origin);
}

std::optional<OutputId> SequencerAgent::own_tip_in(const BranchRecord& rec) const {
    auto it = rec.state.chain_tips.find(chain_);
    if (it == rec.state.chain_tips.end()) return std::nullopt;
    return it->second;
}

void SequencerAgent::note_emission(const Transaction& tx, const TxId& baseline) {
    TxId id = compute_tx_id(tx);
    std::size_t seq_idx = *tx.sequencer_output_index();
    OwnMilestone m;
    m.tx = id;
    m.output = OutputId{id, std::uint16_t(seq_idx)};
    m.ticks = tx.timestamp.ticks;
    m.amount = tx.outputs[seq_idx].amount;
    m.baseline = tx.is_branch() ? id : baseline;
    history_.push_back(m);
    if (history_.size() > kHistoryLimit)
        history_.erase(history_.begin(), history_.begin() + (history_.size() - kHistoryLimit));
}

std::uint64_t SequencerAgent::decide_timestamp_target(std::uint64_t now_ticks,
                                                      std::uint64_t prev_target) const {
    std::uint64_t tip = history_.empty() ? 0 : history_.back().ticks;
    std::uint64_t t = std::max(now_ticks, tip + cfg_.milestone_pace_ticks);
    if (prev_target) t = std::max(t, prev_target + 1);
    if (t > now_ticks + cfg_.max_ahead_ticks) {
        t = std::max({now_ticks + cfg_.max_ahead_ticks, tip + params_.sequencer_pace_ticks,
                      prev_target + 1});
    }
    if (t % kTicksPerSlot == 0) return t;
    std::uint64_t boundary = (t / kTicksPerSlot + 1) * kTicksPerSlot;
    if (t + cfg_.branch_window_ticks >= boundary) return boundary;  // contend for the branch
    return t;
}

Transaction SequencerAgent::assemble_milestone(const OutputId& pred_id, const Output& pred,
                                               std::uint64_t target_ticks,
                                               const std::vector<TxId>& endorse,
                                               const std::vector<OutputId>& extra) const {
    const std::uint64_t slot = Timestamp{target_ticks}.slot();
    Transaction tx;
    tx.timestamp = Timestamp{target_ticks};
    tx.inputs.push_back(TxInput{pred_id, false});
    tx.endorsements = endorse;

    Amount chain_part =
        chain_inflation(pred.amount, Timestamp{pred_id.tx.ticks()}.slot(), slot, params_);
    Amount milestone_amount = must_add(pred.amount, chain_part);

    std::vector<Output> tail;  // delegation successors
    for (const OutputId& xid : extra) {
        const Output* xo = view_->output_of(xid);
        if (!xo) continue;
        tx.inputs.push_back(TxInput{xid, false});
        if (const auto* tal = std::get_if<TagAlongLock>(&xo->lock)) {
            (void)tal;
            milestone_amount = must_add(milestone_amount, xo->amount);  // collect the fee
            continue;
        }
        const auto* del = std::get_if<DelegationLock>(&xo->lock);
        if (!del) continue;
        Output succ = *xo;
        succ.chain = ChainConstraint{effective_chain_id(xid, *xo->chain), false};
        auto& lock = std::get<DelegationLock>(succ.lock);
        if (del->freeze_until_slot && slot < *del->freeze_until_slot) {
            // Unfreeze at period end; split one slot of inflation per the margin.
            Amount entitled = chain_inflation(xo->amount, Timestamp{xid.tx.ticks()}.slot(),
                                              slot, params_);
            Amount own_share = entitled * cfg_.margin_percent / 100;
            Amount delegator_share = entitled - own_share;
            lock.freeze_until_slot = slot;  // revocation window starts now
            succ.amount = must_add(xo->amount, delegator_share);
            succ.declared_inflation = entitled;
            milestone_amount = must_add(milestone_amount, own_share);
        } else {
            // Freeze: deposit the advance, bounded duration.
            std::uint64_t d = std::min<std::uint64_t>(
                {cfg_.freeze_slots, del->max_freeze_slots, params_.max_freeze_slots});
            lock.freeze_until_slot = slot + d;
            succ.amount = must_add(xo->amount, del->inflation_advance);
            succ.declared_inflation = 0;
            milestone_amount = must_sub(milestone_amount, del->inflation_advance);
        }
        tail.push_back(std::move(succ));
    }

    Output milestone;
    milestone.amount = milestone_amount;
    milestone.lock = AddressLock{key_.id};
    milestone.chain = ChainConstraint{chain_, false};
    milestone.sequencer = true;
    milestone.declared_inflation = chain_part;
    milestone.vrf_value = pred.vrf_value.value_or(Digest{});
    tx.outputs.push_back(std::move(milestone));
    for (Output& o : tail) tx.outputs.push_back(std::move(o));

    sign_transaction(key_, tx);
    return tx;
}

std::optional<Transaction> SequencerAgent::make_milestone(std::uint64_t target_ticks) {
    const std::uint64_t slot = Timestamp{target_ticks}.slot();

    // Candidate endorsement targets, heaviest first, other chains only.
    std::vector<TxId> targets;
    for (const TxId& id : view_->sequencer_txs_in_slot(slot)) {
        if (id.ticks() + params_.sequencer_pace_ticks > target_ticks) continue;
        auto c = milestone_chain_of(*view_, id);
        if (c && *c != chain_) targets.push_back(id);
        if (targets.size() >= cfg_.max_candidates_per_beat) break;
    }

    // Pending tag-along outputs inside the sequencer window paying the fee.
    std::vector<OutputId> tags;
    for (const OutputId& oid : view_->tag_along_outputs(chain_)) {
        const Output* o = view_->output_of(oid);
        if (!o) continue;
        const auto* tal = std::get_if<TagAlongLock>(&o->lock);
        if (!tal || o->amount < cfg_.min_tag_along_fee) continue;
        if (slot < tal->creation_slot ||
            slot - tal->creation_slot >= params_.tag_along_sequencer_window_slots)
            continue;
        if (oid.tx.ticks() + params_.sequencer_pace_ticks > target_ticks) continue;
        tags.push_back(oid);
        if (tags.size() >= cfg_.max_tag_alongs_per_tx) break;
    }

    // Delegation outputs: freeze free ones, unfreeze expiring ones.
    std::vector<OutputId> dels;
    for (const OutputId& oid : view_->delegation_outputs(chain_)) {
        const Output* o = view_->output_of(oid);
        if (!o) continue;
        const auto* del = std::get_if<DelegationLock>(&o->lock);
        if (!del) continue;
        if (oid.tx.ticks() + params_.sequencer_pace_ticks > target_ticks) continue;
        if (!del->freeze_until_slot) {
            dels.push_back(oid);  // fresh: freeze it
        } else if (slot + 1 == *del->freeze_until_slot) {
            dels.push_back(oid);  // last frozen slot: unfreeze
        } else if (slot >= *del->freeze_until_slot + params_.revocation_window_slots) {
            dels.push_back(oid);  // revocation window passed unused: freeze again
        }
        if (dels.size() >= cfg_.max_tag_alongs_per_tx) break;
    }

    struct Candidate {
        Transaction tx;
        Amount coverage = 0;
        Amount delta = 0;
        TxId id{};
        TxId baseline{};
        bool valid = false;
    };
    Candidate best;
    std::size_t tried = 0;

    auto consider = [&](const OutputId& pred_id, const Output& pred,
                        const std::vector<TxId>& endorse) {
        if (tried >= cfg_.max_candidates_per_beat) return;
        std::vector<std::vector<OutputId>> extra_options;
        std::vector<OutputId> extras = tags;
        extras.insert(extras.end(), dels.begin(), dels.end());
        extra_options.push_back(extras);
        if (!extras.empty()) extra_options.push_back({});
        for (const auto& extra : extra_options) {
            if (tried++ >= cfg_.max_candidates_per_beat) return;
            Transaction tx = assemble_milestone(pred_id, pred, target_ticks, endorse, extra);
            if (tx.outputs[0].amount < params_.min_sequencer_amount) continue;
            CandidateEval eval = view_->evaluate_candidate(tx);
            if (!eval.ok()) continue;
            // Coverage decides; ties fall back to the delta (the slot-1 base
            // case flattens coverage) and then the id.
            auto better = [&] {
                if (!best.valid) return true;
                if (eval.coverage != best.coverage) return eval.coverage > best.coverage;
                if (eval.delta != best.delta) return eval.delta > best.delta;
                return eval.id > best.id;
            };
            if (better())
                best = Candidate{std::move(tx), eval.coverage, eval.delta,
                                 eval.id,       eval.baseline.value_or(TxId{}), true};
            return;  // extras fit; no need to try the reduced option
        }
    };

    // Self-extension: own tip already in this slot.
    const OwnMilestone& tip = history_.back();
    if (Timestamp{tip.ticks}.slot() == slot &&
        tip.ticks + params_.sequencer_pace_ticks <= target_ticks) {
        const Output* tip_out = view_->output_of(tip.output);
        if (tip_out) consider(tip.output, *tip_out, {});
    }

    for (const TxId& target : targets) {
        if (tried >= cfg_.max_candidates_per_beat) break;
        const Vertex* tv = view_->find(target);
        if (!tv || !tv->baseline) continue;

        std::vector<TxId> endorse{target};
        for (const TxId& more : targets) {
            if (endorse.size() >= cfg_.endorse_fanout) break;
            if (more == target) continue;
            auto c = milestone_chain_of(*view_, more);
            auto c0 = milestone_chain_of(*view_, target);
            if (c && c0 && *c != *c0) endorse.push_back(more);
        }

        auto endorsed_target = [&] {
            return best.valid && !best.tx.endorsements.empty() &&
                   best.tx.endorsements.front() == target;
        };

        // Own milestone consistent with the target, newest first (§8.5 revert).
        // Baselines recorded at emission time prune incompatible lineages
        // without spending candidate budget on them.
        for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
            if (it->ticks + params_.sequencer_pace_ticks > target_ticks) continue;
            if (it->tx.is_genesis()) break;
            if (!(it->baseline == *tv->baseline)) continue;
            const Vertex* mv = view_->find(it->tx);
            if (!mv || mv->status != VertexStatus::Valid) continue;
            const Output* mo = view_->output_of(it->output);
            if (!mo) continue;
            consider(it->output, *mo, endorse);
            if (endorsed_target()) break;
        }
        if (!endorsed_target()) {
            // Revert: the own chain output in the target's baseline state is
            // always consistent with the target.
            const BranchRecord* rec = view_->branch_record(*tv->baseline);
            if (rec) {
                if (auto tip_id = own_tip_in(*rec)) {
                    const Output* o = rec->state.find(*tip_id);
                    if (o) {
                        consider(*tip_id, *o, endorse);
                        if (!endorsed_target() && endorse.size() > 1)
                            consider(*tip_id, *o, {target});
                    }
                }
            }
        }
        // Keep enumerating: a lighter target may still grow the union more.
    }

    if (!best.valid) return std::nullopt;
    note_emission(best.tx, best.baseline);
    return best.tx;
}

std::optional<Transaction> SequencerAgent::make_branch(std::uint64_t boundary_ticks) {
    const std::uint64_t slot = boundary_ticks / kTicksPerSlot;

    auto build = [&](const OutputId& pred_id, const Output& pred,
                     const OutputId& stem_id) -> Transaction {
        Amount chain_part =
            chain_inflation(pred.amount, Timestamp{pred_id.tx.ticks()}.slot(), slot, params_);
        BranchBonus bonus =
            evaluate_branch_bonus(key_.secret, pred.vrf_value.value_or(Digest{}), slot, params_);
        Amount declared = must_add(chain_part, bonus.bonus);

        Transaction tx;
        tx.timestamp = Timestamp{boundary_ticks};
        tx.inputs.push_back(TxInput{pred_id, false});
        tx.inputs.push_back(TxInput{stem_id, false});

        Output milestone;
        milestone.amount = must_add(pred.amount, declared);
        milestone.lock = AddressLock{key_.id};
        milestone.chain = ChainConstraint{chain_, false};
        milestone.sequencer = true;
        milestone.declared_inflation = declared;
        milestone.vrf_value = bonus.rnd;
        tx.outputs.push_back(std::move(milestone));
        tx.outputs.push_back(make_genesis_stem());
        sign_transaction(key_, tx);
        return tx;
    };

    struct Candidate {
        Transaction tx;
        Amount coverage = 0;
        Amount delta = 0;
        bool valid = false;
    };
    Candidate best;
    std::size_t tried = 0;

    auto consider = [&](const OutputId& pred_id, const Output& pred, const OutputId& stem_id) {
        if (tried++ >= cfg_.max_candidates_per_beat) return;
        Transaction tx = build(pred_id, pred, stem_id);
        CandidateEval eval = view_->evaluate_candidate(tx);
        if (!eval.ok()) return;
        if (!best.valid || eval.coverage > best.coverage ||
            (eval.coverage == best.coverage && eval.delta > best.delta)) {
            best = Candidate{std::move(tx), eval.coverage, eval.delta, true};
        }
    };

    // Extend the newest own milestone per distinct baseline, consuming the
    // stem of that milestone's own baseline branch.
    std::set<TxId> seen_baselines;
    for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
        if (it->tx.is_genesis()) break;
        if (it->ticks + params_.sequencer_pace_ticks > boundary_ticks) continue;
        if (it->baseline == TxId{} || !seen_baselines.insert(it->baseline).second) continue;
        const BranchRecord* rec = view_->branch_record(it->baseline);
        if (!rec || rec->slot >= slot) continue;
        const Vertex* mv = view_->find(it->tx);
        if (!mv || mv->status != VertexStatus::Valid) continue;
        const Output* mo = view_->output_of(it->output);
        if (!mo) continue;
        consider(it->output, *mo, rec->stem_output);
        if (seen_baselines.size() >= 4) break;
    }

    // The preferred branch's stem with the own chain tip from its state (the
    // bootstrap and deep-revert path).
    const BranchRecord* pref_rec = nullptr;
    for (std::uint64_t s = slot; s-- > 0;) {
        if (auto pref = view_->preferred_branch(s)) {
            pref_rec = view_->branch_record(*pref);
            break;
        }
        if (s == 0) break;
    }
    if (!pref_rec) pref_rec = &view_->genesis_record();
    if (auto tip_id = own_tip_in(*pref_rec)) {
        const Output* o = pref_rec->state.find(*tip_id);
        if (o) consider(*tip_id, *o, pref_rec->stem_output);
    }

    if (!best.valid) return std::nullopt;
    note_emission(best.tx);
    return best.tx;
}

AgentStep SequencerAgent::step(std::uint64_t now_ticks) {
    AgentStep out;
    std::uint64_t target = prev_target_ ? prev_target_ : kTicksPerSlot;
    if (now_ticks > target) target = now_ticks;

    std::optional<Transaction> tx = (target % kTicksPerSlot == 0) ? make_branch(target)
                                                                  : make_milestone(target);
    if (tx) out.txs.push_back(std::move(*tx));

    prev_target_ = decide_timestamp_target(target, target);
    out.next_wake_ticks = prev_target_;
    return out;
}

// ---------------------------------------------------------------------------

WalletAgent::WalletAgent(WalletConfig cfg, KeyPair key, OutputId genesis_output,
                         const LedgerParams& params, std::uint64_t rng_seed)
    : cfg_(std::move(cfg)), key_(key), params_(params), rng_(rng_seed) {
    Output grant;
    grant.amount = cfg_.amount;
    grant.lock = AddressLock{key_.id};
    spendable_.emplace_back(genesis_output, grant);
    std::sort(cfg_.transfers.begin(), cfg_.transfers.end(),
              [](const TransferOrder& a, const TransferOrder& b) { return a.at_slot < b.at_slot; });
}

std::uint64_t WalletAgent::next_due_slot() const {
    std::uint64_t due = UINT64_MAX;
    if (next_transfer_ < cfg_.transfers.size())
        due = std::min(due, cfg_.transfers[next_transfer_].at_slot);
    if (cfg_.delegation && !delegated_) due = std::min(due, cfg_.delegation->at_slot);
    if (cfg_.spam.mode != SpamMode::None && !spammed_) due = std::min(due, cfg_.spam.at_slot);
    return due;
}

std::uint64_t WalletAgent::first_wake_ticks() const {
    std::uint64_t due = next_due_slot();
    if (due == UINT64_MAX) return 0;
    std::uint64_t base = due * kTicksPerSlot;
    return base ? base : params_.user_pace_ticks;
}

std::optional<Transaction> WalletAgent::wallet_transfer(const TransferOrder& order,
                                                        std::uint64_t now_ticks) {
    std::uint64_t ts = std::max(now_ticks, last_own_ticks_ + params_.user_pace_ticks);
    Amount total = 0;
    std::vector<TxInput> ins;
    for (const auto& [oid, out] : spendable_) {
        if (oid.tx.ticks() + params_.user_pace_ticks > ts) continue;
        ins.push_back(TxInput{oid, false});
        total = must_add(total, out.amount);
    }
    Amount need = must_add(order.amount, order.fee);
    if (ins.empty() || total < need) return std::nullopt;

    Transaction tx;
    tx.timestamp = Timestamp{ts};
    tx.inputs = std::move(ins);

    Output to_recipient;
    to_recipient.amount = order.amount;
    to_recipient.lock = AddressLock{order.to};

    Output tag;
    tag.amount = order.fee;
    tag.lock = TagAlongLock{order.tag_along_target, key_.id, std::uint32_t(tx.timestamp.slot())};

    Amount remainder = total - need;
    Output back;
    back.amount = remainder;
    back.lock = AddressLock{key_.id};
    if (remainder > 0 && remainder < min_storage_deposit(serialized_output_size(back), params_)) {
        // Fold an un-parkable remainder into the (deposit-exempt) fee.
        tag.amount = must_add(tag.amount, remainder);
        remainder = 0;
    }
    if (to_recipient.amount <
        min_storage_deposit(serialized_output_size(to_recipient), params_))
        return std::nullopt;

    tx.outputs.push_back(std::move(to_recipient));
    tx.outputs.push_back(std::move(tag));
    if (remainder > 0) tx.outputs.push_back(std::move(back));
    sign_transaction(key_, tx);

    TxId id = compute_tx_id(tx);
    std::erase_if(spendable_, [&](const auto& p) {
        for (const TxInput& in : tx.inputs)
            if (in.id == p.first) return true;
        return false;
    });
    if (remainder > 0)
        spendable_.emplace_back(OutputId{id, std::uint16_t(tx.outputs.size() - 1)},
                                tx.outputs.back());
    last_own_ticks_ = ts;
    return tx;
}

std::vector<Transaction> WalletAgent::build_spam(std::uint64_t now_ticks) {
    std::vector<Transaction> out;
    const std::size_t n = std::max<std::size_t>(1, cfg_.spam.count);
    const std::uint64_t pace = params_.user_pace_ticks;
    if (spendable_.empty()) return out;
    auto [seed_id, seed_out] = spendable_.front();
    spendable_.erase(spendable_.begin());

    if (cfg_.spam.mode == SpamMode::Rate) {
        // Valid pace-respecting chain, emitted as one burst in real time.
        std::uint64_t base = std::max(last_own_ticks_ + pace, seed_id.tx.ticks() + pace);
        if (base + pace * n > now_ticks) return out;  // keep all timestamps in the past
        OutputId prev_id = seed_id;
        Amount amount = seed_out.amount;
        for (std::size_t i = 0; i < n; ++i) {
            Transaction tx;
            tx.timestamp = Timestamp{base + i * pace};
            tx.inputs.push_back(TxInput{prev_id, false});
            Output o;
            o.amount = amount;
            o.lock = AddressLock{key_.id};
            tx.outputs.push_back(std::move(o));
            sign_transaction(key_, tx);
            prev_id = OutputId{compute_tx_id(tx), 0};
            last_own_ticks_ = tx.timestamp.ticks;
            out.push_back(std::move(tx));
        }
        spendable_.emplace_back(prev_id, out.back().outputs[0]);
        return out;
    }

    // Fan out the seed into n slices, then violate per slice.
    std::uint64_t ts0 = std::max({now_ticks, last_own_ticks_ + pace, seed_id.tx.ticks() + pace});
    Transaction fan;
    fan.timestamp = Timestamp{ts0};
    fan.inputs.push_back(TxInput{seed_id, false});
    Amount slice = seed_out.amount / n;
    Amount rest = seed_out.amount;
    for (std::size_t i = 0; i < n; ++i) {
        Output o;
        o.amount = (i + 1 == n) ? rest : slice;
        rest -= o.amount;
        o.lock = AddressLock{key_.id};
        fan.outputs.push_back(std::move(o));
    }
    sign_transaction(key_, fan);
    TxId fan_id = compute_tx_id(fan);
    last_own_ticks_ = ts0;
    out.push_back(fan);

    for (std::size_t i = 0; i < n; ++i) {
        Transaction tx;
        if (cfg_.spam.mode == SpamMode::Pace) {
            tx.timestamp = Timestamp{ts0 + pace - 1};  // one tick short of legal
            tx.inputs.push_back(TxInput{OutputId{fan_id, std::uint16_t(i)}, false});
            Output o;
            o.amount = fan.outputs[i].amount;
            o.lock = AddressLock{key_.id};
            tx.outputs.push_back(std::move(o));
        } else {  // Dust
            tx.timestamp = Timestamp{ts0 + pace * (i + 1)};
            tx.inputs.push_back(TxInput{OutputId{fan_id, std::uint16_t(i)}, false});
            Output dust;
            dust.amount = 1;  // far below the storage deposit
            dust.lock = AddressLock{key_.id};
            Output back;
            back.amount = fan.outputs[i].amount - 1;
            back.lock = AddressLock{key_.id};
            tx.outputs.push_back(std::move(dust));
            tx.outputs.push_back(std::move(back));
            last_own_ticks_ = tx.timestamp.ticks;
        }
        sign_transaction(key_, tx);
        out.push_back(std::move(tx));
    }
    return out;
}

AgentStep WalletAgent::step(std::uint64_t now_ticks) {
    AgentStep out;
    const std::uint64_t slot = Timestamp{now_ticks}.slot();

    if (cfg_.spam.mode != SpamMode::None && !spammed_ && slot >= cfg_.spam.at_slot) {
        out.txs = build_spam(now_ticks);
        if (!out.txs.empty() || cfg_.spam.mode != SpamMode::Rate) spammed_ = true;
    } else if (cfg_.delegation && !delegated_ && slot >= cfg_.delegation->at_slot) {
        const DelegationOrder& o = *cfg_.delegation;
        std::uint64_t ts = std::max(now_ticks, last_own_ticks_ + params_.user_pace_ticks);
        Amount total = 0;
        std::vector<TxInput> ins;
        for (const auto& [oid, sout] : spendable_) {
            if (oid.tx.ticks() + params_.user_pace_ticks > ts) continue;
            ins.push_back(TxInput{oid, false});
            total = must_add(total, sout.amount);
        }
        if (!ins.empty() && total >= o.amount) {
            Transaction tx;
            tx.timestamp = Timestamp{ts};
            tx.inputs = std::move(ins);
            Output del;
            del.amount = o.amount;
            del.lock = DelegationLock{key_.id, o.target, std::nullopt, o.inflation_advance,
                                      o.max_freeze_slots ? o.max_freeze_slots
                                                         : std::uint32_t(params_.max_freeze_slots)};
            del.chain = ChainConstraint{ChainId{}, true};
            tx.outputs.push_back(std::move(del));
            Amount rest = total - o.amount;
            if (rest > 0) {
                Output back;
                back.amount = rest;
                back.lock = AddressLock{key_.id};
                tx.outputs.push_back(std::move(back));
            }
            sign_transaction(key_, tx);
            TxId id = compute_tx_id(tx);
            spendable_.clear();
            if (rest > 0)
                spendable_.emplace_back(OutputId{id, std::uint16_t(tx.outputs.size() - 1)},
                                        tx.outputs.back());
            last_own_ticks_ = ts;
            out.txs.push_back(std::move(tx));
            delegated_ = true;
        } else {
            delegated_ = true;  // unfunded order: drop it
        }
    } else if (next_transfer_ < cfg_.transfers.size() &&
               slot >= cfg_.transfers[next_transfer_].at_slot) {
        auto tx = wallet_transfer(cfg_.transfers[next_transfer_], now_ticks);
        ++next_transfer_;
        if (tx) out.txs.push_back(std::move(*tx));
    }

    std::uint64_t due = next_due_slot();
    if (due != UINT64_MAX) {
        std::uint64_t base = std::max(due * kTicksPerSlot, now_ticks + params_.user_pace_ticks);
        out.next_wake_ticks = base + rng_() % 8;
    }
    return out;
}

// ---------------------------------------------------------------------------

AdversaryAgent::AdversaryAgent(AdversaryConfig cfg, KeyPair key, OutputId genesis_output,
                               const LedgerParams& params)
    : cfg_(cfg), inner_(cfg.sequencer, key, genesis_output, params), params_(params) {}

void AdversaryAgent::set_view(const UtxoTangle* view) {
    Agent::set_view(view);
    inner_.set_view(view);
}

std::optional<Transaction> AdversaryAgent::private_branch(std::uint64_t boundary_ticks) {
    const std::uint64_t slot = boundary_ticks / kTicksPerSlot;

    OutputId pred_id;
    Output pred;
    OutputId stem_id;
    if (!priv_milestone_) {
        // Fork point: the preferred public branch strictly before the fork slot.
        const BranchRecord* rec = nullptr;
        for (std::uint64_t s = cfg_.fork_slot; s-- > 0;) {
            if (auto pref = view_->preferred_branch(s)) {
                rec = view_->branch_record(*pref);
                break;
            }
            if (s == 0) break;
        }
        if (!rec) rec = &view_->genesis_record();
        auto own = rec->state.chain_tips.find(inner_.chain_id());
        if (own == rec->state.chain_tips.end()) return std::nullopt;
        pred_id = own->second;
        const Output* o = rec->state.find(pred_id);
        if (!o) return std::nullopt;
        pred = *o;
        stem_id = rec->stem_output;
    } else {
        pred_id = *priv_milestone_;
        pred = priv_milestone_out_;
        stem_id = *priv_stem_;
    }

    const KeyPair& key = inner_.keypair();
    Amount chain_part =
        chain_inflation(pred.amount, Timestamp{pred_id.tx.ticks()}.slot(), slot, params_);
    BranchBonus bonus =
        evaluate_branch_bonus(key.secret, pred.vrf_value.value_or(Digest{}), slot, params_);
    Amount declared = must_add(chain_part, bonus.bonus);

    Transaction tx;
    tx.timestamp = Timestamp{boundary_ticks};
    tx.inputs.push_back(TxInput{pred_id, false});
    tx.inputs.push_back(TxInput{stem_id, false});
    Output milestone;
    milestone.amount = must_add(pred.amount, declared);
    milestone.lock = AddressLock{key.id};
    milestone.chain = ChainConstraint{inner_.chain_id(), false};
    milestone.sequencer = true;
    milestone.declared_inflation = declared;
    milestone.vrf_value = bonus.rnd;
    tx.outputs.push_back(std::move(milestone));
    tx.outputs.push_back(make_genesis_stem());
    sign_transaction(key, tx);

    TxId id = compute_tx_id(tx);
    priv_milestone_ = OutputId{id, 0};
    priv_milestone_out_ = tx.outputs[0];
    priv_stem_ = OutputId{id, 1};
    priv_stem_out_ = tx.outputs[1];
    return tx;
}

AgentStep AdversaryAgent::step(std::uint64_t now_ticks) {
    const std::uint64_t fork_ticks = cfg_.fork_slot * kTicksPerSlot;
    if (now_ticks < fork_ticks) {
        AgentStep out = inner_.step(now_ticks);
        if (out.next_wake_ticks == 0 || out.next_wake_ticks > fork_ticks)
            out.next_wake_ticks = fork_ticks;
        return out;
    }

    AgentStep out;
    std::uint64_t boundary = (now_ticks / kTicksPerSlot) * kTicksPerSlot;
    if (boundary < now_ticks) boundary += kTicksPerSlot;  // defensive; wakes land on boundaries
    const std::uint64_t slot = boundary / kTicksPerSlot;

    if (auto tx = private_branch(boundary)) {
        if (slot < cfg_.release_slot) {
            out.withhold = true;
            withheld_.push_back(compute_tx_id(*tx));
        }
        out.txs.push_back(std::move(*tx));
    }
    if (!released_ && slot >= cfg_.release_slot) {
        out.release = withheld_;
        released_ = true;
    }
    out.next_wake_ticks = boundary + kTicksPerSlot;
    return out;
}

}  // namespace tanglesim
