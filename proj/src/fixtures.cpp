#include "tanglesim/fixtures.hpp"

#include <sstream>
#include <stdexcept>

#include "tanglesim/inflation.hpp"

namespace tanglesim {

namespace {

struct Builder {
    Fixture fx;

    explicit Builder(std::string name, Amount supply, Amount min_seq) {
        fx.name = std::move(name);
        fx.params.initial_supply = supply;
        fx.params.min_sequencer_amount = min_seq;
        fx.params.max_branch_bonus = 7;  // keep the table values small
        fx.registry = std::make_shared<IdentityRegistry>();
    }

    void finish_genesis(std::vector<Output> outputs) {
        Amount sum = 0;
        for (const Output& o : outputs) sum = must_add(sum, o.amount);
        if (sum < fx.params.initial_supply) {
            KeyPair reserve = derive_keypair(fx.name + "/reserve");
            fx.registry->add(reserve);
            Output rest;
            rest.amount = fx.params.initial_supply - sum;
            rest.lock = AddressLock{reserve.id};
            outputs.push_back(std::move(rest));
        }
        fx.tangle = std::make_unique<UtxoTangle>(fx.params,
                                                 make_genesis(fx.params, outputs), fx.registry);
    }

    KeyPair key(const std::string& who) {
        KeyPair k = derive_keypair(fx.name + "/" + who);
        fx.registry->add(k);
        return k;
    }

    TxId attach(const std::string& label, const Transaction& tx) {
        AttachResult res = fx.tangle->attach(tx);
        if (res.status != VertexStatus::Valid)
            throw std::logic_error("fixture " + fx.name + " vertex " + label +
                                   " did not validate: " + res.detail);
        fx.labels[label] = res.id;
        return res.id;
    }

    const Output& out_of(const OutputId& id) const {
        const Output* o = fx.tangle->output_of(id);
        if (!o) throw std::logic_error("fixture output missing");
        return *o;
    }

    // A branch extending `pred` (a milestone output) with the stem of `stem_rec`.
    Transaction branch_tx(const KeyPair& k, const ChainId& chain, const OutputId& pred_id,
                          const BranchRecord& stem_rec, std::uint64_t boundary_ticks) {
        const Output& pred = out_of(pred_id);
        std::uint64_t slot = boundary_ticks / kTicksPerSlot;
        Amount chain_part = chain_inflation(pred.amount, Timestamp{pred_id.tx.ticks()}.slot(),
                                            slot, fx.params);
        BranchBonus bonus = evaluate_branch_bonus(k.secret, pred.vrf_value.value_or(Digest{}),
                                                  slot, fx.params);
        Transaction tx;
        tx.timestamp = Timestamp{boundary_ticks};
        tx.inputs.push_back(TxInput{pred_id, false});
        tx.inputs.push_back(TxInput{stem_rec.stem_output, false});
        Output milestone;
        milestone.amount = must_add(pred.amount, must_add(chain_part, bonus.bonus));
        milestone.lock = AddressLock{k.id};
        milestone.chain = ChainConstraint{chain, false};
        milestone.sequencer = true;
        milestone.declared_inflation = must_add(chain_part, bonus.bonus);
        milestone.vrf_value = bonus.rnd;
        tx.outputs.push_back(std::move(milestone));
        tx.outputs.push_back(make_genesis_stem());
        sign_transaction(k, tx);
        return tx;
    }

    Transaction milestone_tx(const KeyPair& k, const ChainId& chain, const OutputId& pred_id,
                             std::uint64_t ticks, std::vector<TxId> endorse,
                             std::vector<OutputId> extra = {}) {
        const Output& pred = out_of(pred_id);
        std::uint64_t slot = Timestamp{ticks}.slot();
        Amount chain_part = chain_inflation(pred.amount, Timestamp{pred_id.tx.ticks()}.slot(),
                                            slot, fx.params);
        Transaction tx;
        tx.timestamp = Timestamp{ticks};
        tx.inputs.push_back(TxInput{pred_id, false});
        Amount fees = 0;
        for (const OutputId& xid : extra) {
            tx.inputs.push_back(TxInput{xid, false});
            fees = must_add(fees, out_of(xid).amount);
        }
        tx.endorsements = std::move(endorse);
        Output milestone;
        milestone.amount = must_add(must_add(pred.amount, chain_part), fees);
        milestone.lock = AddressLock{k.id};
        milestone.chain = ChainConstraint{chain, false};
        milestone.sequencer = true;
        milestone.declared_inflation = chain_part;
        milestone.vrf_value = pred.vrf_value.value_or(Digest{});
        tx.outputs.push_back(std::move(milestone));
        sign_transaction(k, tx);
        return tx;
    }
};

// The chain-building walkthrough: two branches fork the slot, milestone 3
// extends branch 4, and sequencer B forks its own chain into milestones 5
// and 8 by endorsing the competing branches from the same predecessor 6.
std::unique_ptr<Fixture> make_fig_branches() {
    Builder b("fig-branches", 10'000, 1'000);
    KeyPair ka = b.key("A");
    KeyPair kb = b.key("B");
    KeyPair kc = b.key("C");

    auto origin = [&](const KeyPair& k) {
        Output o;
        o.amount = 1'000;
        o.lock = AddressLock{k.id};
        o.chain = ChainConstraint{ChainId{}, true};
        o.sequencer = true;
        o.vrf_value = Digest{};
        return o;
    };
    b.finish_genesis({make_genesis_stem(), origin(ka), origin(kb), origin(kc)});

    OutputId a0{kGenesisTxId, 1}, b0{kGenesisTxId, 2}, c0{kGenesisTxId, 3};
    ChainId chain_a = derive_chain_id(a0);
    ChainId chain_b = derive_chain_id(b0);
    ChainId chain_c = derive_chain_id(c0);

    // Slot 1: branch by A; milestone 6 is chain B's tip of the previous slot.
    TxId b1 = b.attach("B1", b.branch_tx(ka, chain_a, a0, b.fx.tangle->genesis_record(), 128));
    const BranchRecord* rec_b1 = b.fx.tangle->branch_record(b1);
    TxId m6 = b.attach("6", b.milestone_tx(kb, chain_b, b0, 130, {b1}));

    // Slot 2: branches 4 (chain A) and 9 (chain C) consume the same stem.
    TxId br4 = b.attach("4", b.branch_tx(ka, chain_a, OutputId{b1, 0}, *rec_b1, 256));
    TxId br9 = b.attach("9", b.branch_tx(kc, chain_c, c0, *rec_b1, 256));

    // Milestone 3 extends branch 4 inside the slot.
    TxId m3 = b.attach("3", b.milestone_tx(ka, chain_a, OutputId{br4, 0}, 258, {}));

    // Sequencer B continues from milestone 6 twice: milestone 8 endorses
    // branch 9, milestone 5 endorses milestone 3 (baseline branch 4).
    b.attach("8", b.milestone_tx(kb, chain_b, OutputId{m6, 0}, 258, {br9}));
    b.attach("5", b.milestone_tx(kb, chain_b, OutputId{m6, 0}, 260, {m3}));

    return std::make_unique<Fixture>(std::move(b.fx));
}

// Rooted-set and coverage arithmetic on a small ledger: a wallet tags along
// two fee outputs; the second is consumed straight out of the baseline state.
std::unique_ptr<Fixture> make_coverage_basic() {
    Builder b("coverage-basic", 10'000, 1'000);
    KeyPair ks = b.key("S");
    KeyPair kw = b.key("w");
    KeyPair krecv = b.key("recv");

    Output seq_origin;
    seq_origin.amount = 1'000;
    seq_origin.lock = AddressLock{ks.id};
    seq_origin.chain = ChainConstraint{ChainId{}, true};
    seq_origin.sequencer = true;
    seq_origin.vrf_value = Digest{};

    Output grant;
    grant.amount = 500;
    grant.lock = AddressLock{kw.id};

    b.finish_genesis({make_genesis_stem(), seq_origin, grant});
    OutputId s0{kGenesisTxId, 1}, w0{kGenesisTxId, 2};
    ChainId chain_s = derive_chain_id(s0);

    // Wallet transfer with two tag-along fee outputs.
    Transaction wtx;
    wtx.timestamp = Timestamp{25};
    wtx.inputs.push_back(TxInput{w0, false});
    Output pay;
    pay.amount = 100;
    pay.lock = AddressLock{krecv.id};
    Output tag_a;
    tag_a.amount = 30;
    tag_a.lock = TagAlongLock{chain_s, kw.id, 0};
    Output tag_b;
    tag_b.amount = 20;
    tag_b.lock = TagAlongLock{chain_s, kw.id, 0};
    Output rest;
    rest.amount = 350;
    rest.lock = AddressLock{kw.id};
    wtx.outputs = {pay, tag_a, tag_b, rest};
    sign_transaction(kw, wtx);
    TxId w = b.attach("W", wtx);

    TxId br1 = b.attach("B1", b.branch_tx(ks, chain_s, s0, b.fx.tangle->genesis_record(), 128));
    TxId m1 =
        b.attach("M1", b.milestone_tx(ks, chain_s, OutputId{br1, 0}, 129, {}, {OutputId{w, 1}}));
    const BranchRecord* rec1 = b.fx.tangle->branch_record(br1);
    TxId br2 = b.attach("B2", b.branch_tx(ks, chain_s, OutputId{m1, 0}, *rec1, 256));
    TxId m2 =
        b.attach("M2", b.milestone_tx(ks, chain_s, OutputId{br2, 0}, 257, {}, {OutputId{w, 2}}));
    const BranchRecord* rec2 = b.fx.tangle->branch_record(br2);
    TxId br3 = b.attach("B3", b.branch_tx(ks, chain_s, OutputId{m2, 0}, *rec2, 384));
    (void)br3;

    return std::make_unique<Fixture>(std::move(b.fx));
}

}  // namespace

std::vector<std::string> fixture_names() { return {"fig-branches", "coverage-basic"}; }

std::unique_ptr<Fixture> make_fixture(const std::string& name) {
    if (name == "fig-branches") return make_fig_branches();
    if (name == "coverage-basic") return make_coverage_basic();
    return nullptr;
}

std::string Fixture::describe() const {
    std::ostringstream os;
    os << "fixture: " << name << "\n\n" << tangle->dump() << "\nlabels:\n";
    for (const auto& [label, id] : labels) os << "  " << label << " = " << id.short_hex() << "\n";

    os << "\ncoverage:\n";
    os << "  label slot delta coverage\n";
    for (const auto& [label, id] : labels) {
        const Vertex* v = tangle->find(id);
        if (!v || !v->delta) continue;
        os << "  " << label << " " << v->slot() << " " << *v->delta << " "
           << v->coverage.value_or(0) << "\n";
    }

    os << "\nconflicts:\n";
    for (auto a = labels.begin(); a != labels.end(); ++a) {
        auto b = a;
        for (++b; b != labels.end(); ++b) {
            if (tangle->is_conflicting(a->second, b->second))
                os << "  " << a->first << " <-> " << b->first << " conflicting\n";
        }
    }
    return os.str();
}

}  // namespace tanglesim
