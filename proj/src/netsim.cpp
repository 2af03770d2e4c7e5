#include "tanglesim/netsim.hpp"

#include <algorithm>

namespace tanglesim {

namespace {

constexpr std::uint64_t kPendingExpirySlots = 4;
constexpr std::size_t kAntiEntropyHeads = 32;

std::uint64_t sub_seed(std::uint64_t master, std::string_view tag) {
    std::vector<std::uint8_t> buf(tag.begin(), tag.end());
    for (int i = 0; i < 8; ++i) buf.push_back(std::uint8_t(master >> (8 * i)));
    Digest d = hash_bytes(buf);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return v;
}

std::string tx_kind_of(const Transaction& tx) {
    if (tx.is_branch()) return "branch";
    if (tx.is_sequencer_tx()) return "milestone";
    for (const Output& o : tx.outputs)
        if (std::holds_alternative<DelegationLock>(o.lock)) return "delegation";
    for (const Output& o : tx.outputs)
        if (std::holds_alternative<TagAlongLock>(o.lock)) return "transfer";
    return "plain";
}

}  // namespace

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)), conv_(scenario_.params) {
    build_world();
}

void Simulation::build_world() {
    auto violations = validate_scenario(scenario_);
    if (!violations.empty()) throw ScenarioError("invalid scenario: " + violations.front());

    registry_ = std::make_shared<IdentityRegistry>();

    // Genesis layout: stem first, then sequencers, adversaries, wallets, and
    // the inert reserve for any remainder of the supply.
    std::vector<Output> genesis_outputs;
    genesis_outputs.push_back(make_genesis_stem());

    struct PendingAgent {
        enum class Kind { Sequencer, Adversary, Wallet } kind;
        std::size_t spec_index;
        OutputId genesis_output;
        KeyPair key;
    };
    std::vector<PendingAgent> pending;

    Amount granted = 0;
    auto push_grant = [&](Output out) {
        granted = must_add(granted, out.amount);
        genesis_outputs.push_back(std::move(out));
        return OutputId{kGenesisTxId, std::uint16_t(genesis_outputs.size() - 1)};
    };

    for (std::size_t i = 0; i < scenario_.sequencers.size(); ++i) {
        const SequencerSpec& spec = scenario_.sequencers[i];
        KeyPair key = derive_keypair(spec.cfg.name);
        registry_->add(key);
        Output origin;
        origin.amount = spec.cfg.amount;
        origin.lock = AddressLock{key.id};
        origin.chain = ChainConstraint{ChainId{}, true};
        origin.sequencer = true;
        origin.vrf_value = Digest{};
        OutputId oid = push_grant(std::move(origin));
        pending.push_back({PendingAgent::Kind::Sequencer, i, oid, key});
    }
    for (std::size_t i = 0; i < scenario_.adversaries.size(); ++i) {
        const AdversarySpec& spec = scenario_.adversaries[i];
        KeyPair key = derive_keypair(spec.cfg.name);
        registry_->add(key);
        Output origin;
        origin.amount = spec.cfg.amount;
        origin.lock = AddressLock{key.id};
        origin.chain = ChainConstraint{ChainId{}, true};
        origin.sequencer = true;
        origin.vrf_value = Digest{};
        OutputId oid = push_grant(std::move(origin));
        pending.push_back({PendingAgent::Kind::Adversary, i, oid, key});
    }
    for (std::size_t i = 0; i < scenario_.wallets.size(); ++i) {
        const WalletSpec& spec = scenario_.wallets[i];
        KeyPair key = derive_keypair(spec.name);
        registry_->add(key);
        Output grant;
        grant.amount = spec.amount;
        grant.lock = AddressLock{key.id};
        OutputId oid = push_grant(std::move(grant));
        pending.push_back({PendingAgent::Kind::Wallet, i, oid, key});
    }
    if (granted < scenario_.params.initial_supply) {
        KeyPair reserve = derive_keypair("reserve");
        registry_->add(reserve);
        Output rest;
        rest.amount = scenario_.params.initial_supply - granted;
        rest.lock = AddressLock{reserve.id};
        genesis_outputs.push_back(std::move(rest));
    }

    LedgerState genesis = make_genesis(scenario_.params, genesis_outputs);

    auto node_index = [&](const std::string& name) -> std::int32_t {
        for (std::size_t i = 0; i < scenario_.nodes.size(); ++i)
            if (scenario_.nodes[i].name == name) return std::int32_t(i);
        throw ScenarioError("unknown node: " + name);
    };

    for (std::size_t i = 0; i < scenario_.nodes.size(); ++i) {
        auto node = std::make_unique<NodeSim>();
        node->id = std::int32_t(i);
        node->name = scenario_.nodes[i].name;
        node->clock_offset_ms = scenario_.nodes[i].clock_offset_ms;
        node->tangle = std::make_unique<UtxoTangle>(scenario_.params, genesis, registry_);
        nodes_.push_back(std::move(node));
    }

    // Resolve name references now that chain ids are known.
    auto chain_by_name = [&](const std::string& name) -> std::optional<ChainId> {
        for (const PendingAgent& p : pending) {
            if (p.kind == PendingAgent::Kind::Sequencer &&
                scenario_.sequencers[p.spec_index].cfg.name == name)
                return derive_chain_id(p.genesis_output);
            if (p.kind == PendingAgent::Kind::Adversary &&
                scenario_.adversaries[p.spec_index].cfg.name == name)
                return derive_chain_id(p.genesis_output);
        }
        return std::nullopt;
    };

    std::uint64_t wallet_seed = sub_seed(scenario_.master_seed, "agents");
    for (const PendingAgent& p : pending) {
        std::unique_ptr<Agent> agent;
        std::int32_t host = 0;
        switch (p.kind) {
            case PendingAgent::Kind::Sequencer: {
                const SequencerSpec& spec = scenario_.sequencers[p.spec_index];
                host = node_index(spec.node);
                agent = std::make_unique<SequencerAgent>(spec.cfg, p.key, p.genesis_output,
                                                         scenario_.params);
                break;
            }
            case PendingAgent::Kind::Adversary: {
                const AdversarySpec& spec = scenario_.adversaries[p.spec_index];
                host = node_index(spec.node);
                AdversaryConfig cfg;
                cfg.sequencer = spec.cfg;
                cfg.fork_slot = spec.fork_slot;
                cfg.release_slot = spec.release_slot;
                agent = std::make_unique<AdversaryAgent>(cfg, p.key, p.genesis_output,
                                                         scenario_.params);
                break;
            }
            case PendingAgent::Kind::Wallet: {
                const WalletSpec& spec = scenario_.wallets[p.spec_index];
                host = node_index(spec.node);
                WalletConfig cfg;
                cfg.name = spec.name;
                cfg.amount = spec.amount;
                for (const TransferSpec& t : spec.transfers) {
                    TransferOrder order;
                    order.at_slot = t.at_slot;
                    order.to = derive_keypair(t.to).id;
                    order.amount = t.amount;
                    auto chain = chain_by_name(t.tag_along);
                    if (!chain) throw ScenarioError("unknown tag-along target " + t.tag_along);
                    order.tag_along_target = *chain;
                    order.fee = t.fee;
                    cfg.transfers.push_back(order);
                }
                if (spec.delegation) {
                    DelegationOrder order;
                    order.at_slot = spec.delegation->at_slot;
                    auto chain = chain_by_name(spec.delegation->target);
                    if (!chain)
                        throw ScenarioError("unknown delegation target " +
                                            spec.delegation->target);
                    order.target = *chain;
                    order.amount = spec.delegation->amount;
                    order.inflation_advance = spec.delegation->inflation_advance;
                    order.max_freeze_slots = spec.delegation->max_freeze_slots;
                    cfg.delegation = order;
                }
                cfg.spam.mode = spec.spam.mode;
                cfg.spam.at_slot = spec.spam.at_slot;
                cfg.spam.count = spec.spam.count;
                agent = std::make_unique<WalletAgent>(cfg, p.key, p.genesis_output,
                                                      scenario_.params, wallet_seed++);
                break;
            }
        }
        agent->set_view(nodes_[host]->tangle.get());
        agents_.push_back(std::move(agent));
        agent_node_.push_back(host);
    }

    partition_groups_.resize(scenario_.partitions.size());
    for (std::size_t i = 0; i < scenario_.partitions.size(); ++i) {
        for (const std::string& n : scenario_.partitions[i].group_a)
            partition_groups_[i].insert(node_index(n));
    }

    rng_latency_.seed(sub_seed(scenario_.master_seed, "latency"));
    rng_pull_.seed(sub_seed(scenario_.master_seed, "pull"));

    end_ms_ = scenario_.params.genesis_time_ms +
              std::int64_t(scenario_.duration_slots * scenario_.params.slot_duration_ms());
    drain_ms_ = std::int64_t(2 * scenario_.params.slot_duration_ms());

    trace_.scenario_name = scenario_.name;
    trace_.seed = scenario_.master_seed;
    trace_.duration_slots = scenario_.duration_slots;
    trace_.initial_supply = scenario_.params.initial_supply;
    trace_.slot_duration_ms = scenario_.params.slot_duration_ms();
    for (const auto& n : scenario_.nodes) trace_.node_names.push_back(n.name);
}

void Simulation::schedule(Event e) {
    e.seq = next_seq_++;
    queue_.push(std::move(e));
}

bool Simulation::reachable(std::int32_t a, std::int32_t b, std::int64_t t) const {
    for (std::size_t i = 0; i < scenario_.partitions.size(); ++i) {
        const PartitionConfig& p = scenario_.partitions[i];
        if (t < p.from_ms || t >= p.to_ms) continue;
        bool a_in = partition_groups_[i].count(a) != 0;
        bool b_in = partition_groups_[i].count(b) != 0;
        if (a_in != b_in) return false;
    }
    return true;
}

std::int64_t Simulation::sample_latency(std::int32_t from, std::int32_t to) {
    std::int64_t base = scenario_.latency.base_ms;
    if (!scenario_.latency.matrix.empty()) base = scenario_.latency.matrix[from][to];
    std::int64_t j = scenario_.latency.jitter_ms;
    std::int64_t jitter = 0;
    if (j > 0) jitter = std::int64_t(rng_latency_() % std::uint64_t(2 * j + 1)) - j;
    return std::max<std::int64_t>(1, base + jitter);
}

void Simulation::gossip(std::int32_t from, const std::shared_ptr<const Transaction>& tx,
                        std::int64_t now) {
    for (const auto& node : nodes_) {
        if (node->id == from) continue;
        if (!reachable(from, node->id, now)) continue;
        Event e;
        e.t = now + sample_latency(from, node->id);
        e.kind = Event::Kind::Deliver;
        e.node = node->id;
        e.peer = from;
        e.tx = tx;
        schedule(std::move(e));
    }
}

void Simulation::trace_branch(NodeSim& node, const TxId& id, std::int64_t now) {
    const BranchRecord* rec = node.tangle->branch_record(id);
    if (!rec) return;
    TraceEvent ev;
    ev.t = now;
    ev.kind = TraceKind::Branch;
    ev.node = node.id;
    ev.tx = id;
    ev.tx2 = rec->stem_pred;
    ev.slot = rec->slot;
    ev.delta = rec->delta;
    ev.coverage = rec->coverage;
    ev.supply = rec->state.total_amount();
    ev.minted = rec->state.minted;
    using Wide = __int128;
    ev.flag = Wide(ev.supply) == Wide(scenario_.params.initial_supply) + Wide(rec->state.minted);
    for (const TrackedTx& t : trace_.tracked)
        if (rec->included->contains(t.id)) ev.tracked.push_back(t.name);
    trace_.events.push_back(std::move(ev));
}

void Simulation::note_preferred(NodeSim& node, std::int64_t now) {
    auto latest = node.tangle->latest_branch_slot();
    if (!latest) return;

    // Chain containment: does the candidate's stem lineage pass through the
    // current tip?
    auto contains = [&](const TxId& tip, const TxId& target) {
        const BranchRecord* r = node.tangle->branch_record(tip);
        const BranchRecord* t = node.tangle->branch_record(target);
        if (!r || !t) return false;
        while (r && r->slot >= t->slot) {
            if (r->branch == target) return true;
            if (r->branch.is_genesis()) break;
            r = node.tangle->branch_record(r->stem_pred);
        }
        return false;
    };

    std::optional<TxId> pref;
    const BranchRecord* cur =
        node.preferred_tip ? node.tangle->branch_record(*node.preferred_tip) : nullptr;
    std::uint64_t floor_slot = cur ? cur->slot : 0;
    for (std::uint64_t s = *latest + 1; s-- > floor_slot;) {
        auto candidate = node.tangle->preferred_branch(s);
        if (!candidate) {
            if (s == 0) break;
            continue;
        }
        if (!cur) {
            pref = candidate;
            break;
        }
        if (*candidate == cur->branch) break;
        const BranchRecord* cand = node.tangle->branch_record(*candidate);
        // Adopt a pure extension of the current chain, or a genuinely heavier
        // fork; a light branch that merely sits in a newer slot is ignored.
        if (contains(*candidate, cur->branch) || cand->coverage > cur->coverage ||
            (cand->coverage == cur->coverage && *candidate > cur->branch)) {
            pref = candidate;
            break;
        }
        if (s == 0) break;
    }
    if (!pref) return;
    if (node.preferred_tip && *node.preferred_tip == *pref) return;

    if (node.preferred_tip) {
        // Reorg depth: slots between the old tip and the fork point.
        const BranchRecord* old_rec = node.tangle->branch_record(*node.preferred_tip);
        const BranchRecord* new_rec = node.tangle->branch_record(*pref);
        if (old_rec && new_rec) {
            // Walk both stem lineages down to a common branch.
            std::set<TxId> old_chain;
            const BranchRecord* r = old_rec;
            while (r) {
                old_chain.insert(r->branch);
                if (r->branch.is_genesis()) break;
                r = node.tangle->branch_record(r->stem_pred);
            }
            const BranchRecord* fork = new_rec;
            while (fork && !old_chain.count(fork->branch)) {
                if (fork->branch.is_genesis()) break;
                fork = node.tangle->branch_record(fork->stem_pred);
            }
            if (fork && !(fork->branch == *node.preferred_tip)) {
                std::uint64_t depth = old_rec->slot > fork->slot ? old_rec->slot - fork->slot : 0;
                if (depth > 0) {
                    TraceEvent ev;
                    ev.t = now;
                    ev.kind = TraceKind::Reorg;
                    ev.node = node.id;
                    ev.tx = *node.preferred_tip;
                    ev.tx2 = *pref;
                    ev.slot = new_rec->slot;
                    ev.depth = depth;
                    trace_.events.push_back(std::move(ev));
                }
            }
        }
    }
    node.preferred_tip = pref;
}

void Simulation::attach_at(std::int32_t node_id, const std::shared_ptr<const Transaction>& tx,
                           std::int32_t from, bool pulled, std::int64_t now) {
    NodeSim& node = *nodes_[node_id];
    AttachResult res = node.tangle->attach(*tx);
    if (res.duplicate) return;

    TraceEvent ev;
    ev.t = now;
    ev.kind = TraceKind::Attach;
    ev.node = node_id;
    ev.tx = res.id;
    ev.ticks = tx->timestamp.ticks;
    ev.code = res.status == VertexStatus::Rejected ? to_string(res.code)
                                                   : to_string(res.status);
    trace_.events.push_back(ev);

    for (const TxId& id : res.newly_valid) {
        if (!(id == res.id)) {
            TraceEvent wev;
            wev.t = now;
            wev.kind = TraceKind::Attach;
            wev.node = node_id;
            wev.tx = id;
            wev.aux = "woken";
            wev.code = "valid";
            trace_.events.push_back(wev);
        }
        const Vertex* v = node.tangle->find(id);
        if (v && v->is_branch()) trace_branch(node, id, now);
    }
    if (!res.newly_valid.empty()) note_preferred(node, now);

    // Pull missing parents from a random reachable peer.
    for (const TxId& missing : res.missing) {
        std::vector<std::int32_t> peers;
        for (const auto& other : nodes_)
            if (other->id != node_id && reachable(node_id, other->id, now))
                peers.push_back(other->id);
        if (peers.empty()) continue;
        std::int32_t peer = peers[rng_pull_() % peers.size()];
        TraceEvent pev;
        pev.t = now;
        pev.kind = TraceKind::Pull;
        pev.node = node_id;
        pev.peer = peer;
        pev.tx = missing;
        trace_.events.push_back(pev);
        Event e;
        e.t = now + sample_latency(node_id, peer);
        e.kind = Event::Kind::PullServe;
        e.node = peer;
        e.peer = node_id;
        e.tx_id = missing;
        schedule(std::move(e));
    }

    // Relay: forward newly seen, not-rejected transactions to other peers.
    if (from >= 0 && res.status != VertexStatus::Rejected &&
        !node.relayed.count(res.id)) {
        node.relayed.insert(res.id);
        for (const auto& other : nodes_) {
            if (other->id == node_id || other->id == from) continue;
            if (!reachable(node_id, other->id, now)) continue;
            Event e;
            e.t = now + sample_latency(node_id, other->id);
            e.kind = Event::Kind::Deliver;
            e.node = other->id;
            e.peer = node_id;
            e.tx = tx;
            schedule(std::move(e));
        }
    }
    (void)pulled;
}

void Simulation::deliver(Event& e) {
    NodeSim& node = *nodes_[e.node];
    TxId id = compute_tx_id(*e.tx);
    if (node.tangle->find(id)) return;

    const std::int64_t local = node.local_time(e.t);

    if (!e.ready) {
        // Per-sender rate limit; pulled transactions are exempt.
        if (!e.pulled) {
            std::uint64_t pace = e.tx->is_sequencer_tx() ? scenario_.params.sequencer_pace_ticks
                                                         : scenario_.params.user_pace_ticks;
            std::int64_t pace_ms = std::int64_t(pace * scenario_.params.tick_duration_ms);
            auto it = node.last_seen_ms.find(e.tx->sender);
            if (it != node.last_seen_ms.end() && local - it->second < pace_ms) {
                std::int64_t wait = pace_ms - (local - it->second);
                TraceEvent ev;
                ev.t = e.t;
                ev.kind = TraceKind::Delay;
                ev.node = e.node;
                ev.tx = id;
                ev.aux = "rate";
                ev.until = e.t + wait;
                trace_.events.push_back(std::move(ev));
                Event again = e;
                again.t = e.t + wait;
                schedule(std::move(again));
                return;
            }
            node.last_seen_ms[e.tx->sender] = local;
        }
        // Cool-down room for transactions from the future.
        std::int64_t wait = conv_.cooldown_delay(e.tx->timestamp, local);
        if (wait > 0) {
            TraceEvent ev;
            ev.t = e.t;
            ev.kind = TraceKind::Delay;
            ev.node = e.node;
            ev.tx = id;
            ev.aux = "cooldown";
            ev.until = e.t + wait;
            trace_.events.push_back(std::move(ev));
            Event again = e;
            again.t = e.t + wait;
            again.ready = true;
            schedule(std::move(again));
            return;
        }
    }

    TraceEvent ev;
    ev.t = e.t;
    ev.kind = TraceKind::Deliver;
    ev.node = e.node;
    ev.peer = e.peer;
    ev.tx = id;
    ev.flag = e.pulled;
    trace_.events.push_back(std::move(ev));

    attach_at(e.node, e.tx, e.peer, e.pulled, e.t);
}

void Simulation::agent_wake(const Event& e) {
    Agent& agent = *agents_[e.agent];
    NodeSim& node = *nodes_[agent_node_[e.agent]];
    const std::int64_t local = node.local_time(e.t);
    const std::uint64_t now_ticks = conv_.ticks_at(local);

    AgentStep step = agent.step(now_ticks);

    for (Transaction& tx : step.txs) {
        auto shared = std::make_shared<const Transaction>(std::move(tx));
        TxId id = compute_tx_id(*shared);
        std::string kind = tx_kind_of(*shared);
        if (kind == "transfer") {
            TrackedTx t;
            t.name = agent.name() + "/" + std::to_string(transfer_count_[agent.name()]++);
            t.id = id;
            t.origin_node = node.id;
            trace_.tracked.push_back(std::move(t));
        }
        TraceEvent ev;
        ev.t = e.t;
        ev.kind = TraceKind::Emit;
        ev.node = node.id;
        ev.agent = agent.name();
        ev.tx = id;
        ev.ticks = shared->timestamp.ticks;
        ev.aux = kind;
        ev.flag = step.withhold;
        trace_.events.push_back(std::move(ev));

        attach_at(node.id, shared, -1, false, e.t);
        const Vertex* v = node.tangle->find(id);
        bool rejected = v && v->status == VertexStatus::Rejected;
        if (step.withhold) {
            node.withheld.insert(id);
        } else if (!rejected) {
            gossip(node.id, shared, e.t);
        }
    }
    for (const TxId& id : step.release) {
        node.withheld.erase(id);
        const Transaction* raw = node.tangle->raw(id);
        if (raw) gossip(node.id, std::make_shared<const Transaction>(*raw), e.t);
    }

    if (step.next_wake_ticks > 0 &&
        step.next_wake_ticks <= scenario_.duration_slots * kTicksPerSlot) {
        Event next;
        next.t = conv_.real_time_of(Timestamp{step.next_wake_ticks}) - node.clock_offset_ms;
        next.kind = Event::Kind::AgentWake;
        next.agent = e.agent;
        if (next.t <= e.t) next.t = e.t + 1;
        schedule(std::move(next));
    }
}

void Simulation::anti_entropy(std::int64_t now) {
    // Tip exchange: peers pull heads they have not seen.
    for (const auto& from : nodes_) {
        std::vector<TxId> heads = from->tangle->heads();
        if (heads.size() > kAntiEntropyHeads)
            heads.erase(heads.begin(), heads.end() - kAntiEntropyHeads);
        for (const auto& to : nodes_) {
            if (from->id == to->id || !reachable(from->id, to->id, now)) continue;
            for (const TxId& h : heads) {
                if (from->withheld.count(h)) continue;
                if (to->tangle->find(h)) continue;
                const Transaction* raw = from->tangle->raw(h);
                if (!raw) continue;
                Event e;
                e.t = now + sample_latency(from->id, to->id);
                e.kind = Event::Kind::Deliver;
                e.node = to->id;
                e.peer = from->id;
                e.tx = std::make_shared<const Transaction>(*raw);
                e.pulled = true;
                schedule(std::move(e));
            }
        }
        // Re-request parents that are still missing.
        for (const TxId& missing : from->tangle->wanted_parents()) {
            std::vector<std::int32_t> peers;
            for (const auto& other : nodes_)
                if (other->id != from->id && reachable(from->id, other->id, now))
                    peers.push_back(other->id);
            if (peers.empty()) continue;
            std::int32_t peer = peers[rng_pull_() % peers.size()];
            Event e;
            e.t = now + sample_latency(from->id, peer);
            e.kind = Event::Kind::PullServe;
            e.node = peer;
            e.peer = from->id;
            e.tx_id = missing;
            schedule(std::move(e));
        }
    }
}

void Simulation::slot_mark(const Event& e) {
    TraceEvent mark;
    mark.t = e.t;
    mark.kind = TraceKind::SlotMark;
    mark.slot = e.slot;
    if (!e.tx_id.is_genesis()) mark.aux = "final";
    trace_.events.push_back(std::move(mark));

    for (const auto& node : nodes_) {
        note_preferred(*node, e.t);
        TraceEvent ev;
        ev.t = e.t;
        ev.kind = TraceKind::Prefer;
        ev.node = node->id;
        ev.slot = e.slot;
        if (node->preferred_tip) {
            ev.tx = *node->preferred_tip;
            const BranchRecord* rec = node->tangle->branch_record(*node->preferred_tip);
            if (rec) {
                ev.ticks = rec->slot;  // slot of the preferred tip
                ev.delta = rec->delta;
                ev.coverage = rec->coverage;
            }
        }
        trace_.events.push_back(std::move(ev));

        if (e.slot >= kPendingExpirySlots)
            node->tangle->expire_pending(e.slot - kPendingExpirySlots);
        if (scenario_.prune_horizon_slots > 0 && node->preferred_tip) {
            std::vector<TxId> keep;
            const BranchRecord* r = node->tangle->branch_record(*node->preferred_tip);
            while (r) {
                keep.push_back(r->branch);
                if (r->branch.is_genesis()) break;
                r = node->tangle->branch_record(r->stem_pred);
            }
            node->tangle->prune(keep, scenario_.prune_horizon_slots);
        }
    }
    anti_entropy(e.t);
}

Trace Simulation::run() {
    if (ran_) throw std::logic_error("simulation already ran");
    ran_ = true;

    for (std::size_t i = 0; i < agents_.size(); ++i) {
        std::uint64_t first = agents_[i]->first_wake_ticks();
        if (first == 0 || first > scenario_.duration_slots * kTicksPerSlot) continue;
        Event e;
        e.t = conv_.real_time_of(Timestamp{first}) - nodes_[agent_node_[i]]->clock_offset_ms;
        e.kind = Event::Kind::AgentWake;
        e.agent = i;
        schedule(std::move(e));
    }
    for (std::uint64_t s = 1; s <= scenario_.duration_slots; ++s) {
        Event e;
        e.t = scenario_.params.genesis_time_ms +
              std::int64_t(s * scenario_.params.slot_duration_ms());
        e.kind = Event::Kind::SlotMark;
        e.slot = s;
        schedule(std::move(e));
    }
    for (std::size_t i = 0; i < scenario_.partitions.size(); ++i) {
        Event a;
        a.t = scenario_.partitions[i].from_ms;
        a.kind = Event::Kind::PartitionEdge;
        a.partition = i;
        a.partition_start = true;
        schedule(std::move(a));
        Event b;
        b.t = scenario_.partitions[i].to_ms;
        b.kind = Event::Kind::PartitionEdge;
        b.partition = i;
        b.partition_start = false;
        schedule(std::move(b));
    }

    while (!queue_.empty()) {
        Event e = queue_.top();
        queue_.pop();
        if (e.t > end_ms_ + drain_ms_) break;

        switch (e.kind) {
            case Event::Kind::AgentWake:
                agent_wake(e);
                break;
            case Event::Kind::Deliver:
                deliver(e);
                break;
            case Event::Kind::PullServe: {
                NodeSim& server = *nodes_[e.node];
                if (server.withheld.count(e.tx_id)) break;
                const Transaction* raw = server.tangle->raw(e.tx_id);
                if (!raw) break;
                if (!reachable(e.node, e.peer, e.t)) break;
                Event d;
                d.t = e.t + sample_latency(e.node, e.peer);
                d.kind = Event::Kind::Deliver;
                d.node = e.peer;
                d.peer = e.node;
                d.tx = std::make_shared<const Transaction>(*raw);
                d.pulled = true;
                schedule(std::move(d));
                break;
            }
            case Event::Kind::SlotMark:
                slot_mark(e);
                break;
            case Event::Kind::PartitionEdge: {
                TraceEvent ev;
                ev.t = e.t;
                ev.kind = TraceKind::Partition;
                ev.aux = e.partition_start ? "start" : "end";
                ev.slot = std::uint64_t(e.partition);
                trace_.events.push_back(std::move(ev));
                if (!e.partition_start) anti_entropy(e.t);
                break;
            }
        }
    }

    // Final snapshot after the drain window.
    Event fin;
    fin.t = end_ms_ + drain_ms_;
    fin.slot = scenario_.duration_slots;
    fin.tx_id = TxId::make(1, Digest{});  // marks the snapshot as final
    slot_mark(fin);

    return trace_;
}

std::optional<ChainId> Simulation::chain_of(const std::string& sequencer_name) const {
    std::size_t index = 1;  // genesis output 0 is the stem
    for (const SequencerSpec& s : scenario_.sequencers) {
        if (s.cfg.name == sequencer_name)
            return derive_chain_id(OutputId{kGenesisTxId, std::uint16_t(index)});
        ++index;
    }
    for (const AdversarySpec& a : scenario_.adversaries) {
        if (a.cfg.name == sequencer_name)
            return derive_chain_id(OutputId{kGenesisTxId, std::uint16_t(index)});
        ++index;
    }
    return std::nullopt;
}

Trace run_scenario(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run();
}

}  // namespace tanglesim
