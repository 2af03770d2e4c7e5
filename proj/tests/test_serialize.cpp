#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "tanglesim/identity.hpp"
#include "tanglesim/ledger.hpp"

using namespace tanglesim;

TEST_SUITE_BEGIN("serialize");

namespace {

Digest fixed_digest(std::uint8_t fill) {
    Digest d;
    d.fill(fill);
    return d;
}

// Reference transactions exercising every lock type and optional field; the
// golden file freezes their canonical ids.
std::vector<std::pair<std::string, Transaction>> golden_transactions() {
    std::vector<std::pair<std::string, Transaction>> out;

    KeyPair alice = derive_keypair("golden/alice");
    KeyPair seq = derive_keypair("golden/sequencer");

    {
        Transaction tx;
        tx.timestamp = Timestamp{25};
        tx.inputs.push_back(TxInput{OutputId{kGenesisTxId, 2}, false});
        Output pay;
        pay.amount = 1000;
        pay.lock = AddressLock{fixed_digest(0xAA)};
        Output tag;
        tag.amount = 5;
        tag.lock = TagAlongLock{fixed_digest(0xBB), alice.id, 0};
        Output rest;
        rest.amount = 500;
        rest.lock = AddressLock{alice.id};
        tx.outputs = {pay, tag, rest};
        sign_transaction(alice, tx);
        out.emplace_back("transfer", tx);
    }
    {
        Transaction tx;
        tx.timestamp = Timestamp{130};
        tx.inputs.push_back(TxInput{OutputId{TxId::make(128, fixed_digest(0x11)), 0}, false});
        tx.endorsements.push_back(TxId::make(129, fixed_digest(0x22)));
        Output milestone;
        milestone.amount = 123456;
        milestone.lock = AddressLock{seq.id};
        milestone.chain = ChainConstraint{fixed_digest(0x33), false};
        milestone.sequencer = true;
        milestone.declared_inflation = 7;
        milestone.vrf_value = fixed_digest(0x44);
        tx.outputs = {milestone};
        sign_transaction(seq, tx);
        out.emplace_back("milestone", tx);
    }
    {
        Transaction tx;
        tx.timestamp = Timestamp{256};
        tx.inputs.push_back(TxInput{OutputId{TxId::make(130, fixed_digest(0x55)), 1}, true});
        Output del;
        del.amount = 50'000;
        del.lock = DelegationLock{alice.id, fixed_digest(0x66), 300, 77, 4218};
        del.chain = ChainConstraint{ChainId{}, true};
        Output stem = make_genesis_stem();
        tx.outputs = {del, stem};
        sign_transaction(alice, tx);
        out.emplace_back("delegation", tx);
    }
    return out;
}

}  // namespace

TEST_CASE("identical transactions serialize to identical ids") {
    for (const auto& [name, tx] : golden_transactions()) {
        Transaction copy = tx;
        CHECK(compute_tx_id(tx) == compute_tx_id(copy));
        CHECK(serialize_full(tx) == serialize_full(copy));
    }
}

TEST_CASE("any single-field change changes the id") {
    Transaction base = golden_transactions()[0].second;
    TxId id = compute_tx_id(base);

    Transaction t1 = base;
    t1.timestamp.ticks += 1;
    CHECK(compute_tx_id(t1) != id);

    Transaction t2 = base;
    t2.outputs[0].amount += 1;
    CHECK(compute_tx_id(t2) != id);

    Transaction t3 = base;
    t3.inputs[0].terminate_chain = !t3.inputs[0].terminate_chain;
    CHECK(compute_tx_id(t3) != id);

    Transaction t4 = base;
    t4.sender[0] ^= 1;
    CHECK(compute_tx_id(t4) != id);
}

TEST_CASE("timestamp is the id prefix, ids order by time first") {
    Transaction tx = golden_transactions()[1].second;
    TxId id = compute_tx_id(tx);
    CHECK(id.ticks() == tx.timestamp.ticks);

    Transaction later = tx;
    later.timestamp.ticks += 1000;
    sign_transaction(derive_keypair("golden/sequencer"), later);
    CHECK(compute_tx_id(later) > id);
}

// Regenerate with:
//   build/tests/unit_tests -ts=serialize -tc=regen-golden-vectors -ns
TEST_CASE("regen-golden-vectors" * doctest::skip()) {
    nlohmann::ordered_json out;
    for (const auto& [name, tx] : golden_transactions()) {
        out[name]["body"] = to_hex(serialize_body(tx));
        out[name]["id"] = compute_tx_id(tx).hex();
    }
    std::ofstream f(std::string(TANGLESIM_SOURCE_DIR) + "/tests/golden/txid_vectors.json");
    REQUIRE(f.good());
    f << out.dump(2) << "\n";
}

TEST_CASE("golden id vectors") {
    std::ifstream f(std::string(TANGLESIM_SOURCE_DIR) + "/tests/golden/txid_vectors.json");
    REQUIRE_MESSAGE(f.good(), "golden vector file missing");
    nlohmann::json golden = nlohmann::json::parse(f);

    auto txs = golden_transactions();
    REQUIRE(golden.size() == txs.size());
    for (const auto& [name, tx] : txs) {
        CAPTURE(name);
        REQUIRE(golden.contains(name));
        CHECK(golden[name]["body"] == to_hex(serialize_body(tx)));
        CHECK(golden[name]["id"] == compute_tx_id(tx).hex());
    }
}

TEST_CASE("checked amount arithmetic refuses to wrap") {
    CHECK(checked_add(UINT64_MAX, 1) == std::nullopt);
    CHECK(checked_sub(0, 1) == std::nullopt);
    CHECK(checked_mul(UINT64_MAX / 2, 3) == std::nullopt);
    CHECK(*checked_add(2, 3) == 5);
    CHECK_THROWS_AS(must_add(UINT64_MAX, 1), AmountOverflow);
}

TEST_SUITE_END();
