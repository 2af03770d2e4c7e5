#include "tanglesim/ledger.hpp"

#include <stdexcept>

namespace tanglesim {

const Output* LedgerState::find(const OutputId& id) const {
    auto it = outputs.find(id);
    return it == outputs.end() ? nullptr : &it->second;
}

Amount LedgerState::total_amount() const {
    Amount sum = 0;
    for (const auto& [id, out] : outputs) sum = must_add(sum, out.amount);
    return sum;
}

Digest LedgerState::commitment() const {
    std::vector<std::uint8_t> buf;
    buf.reserve(outputs.size() * 96);
    for (const auto& [id, out] : outputs) {
        buf.insert(buf.end(), id.tx.bytes.begin(), id.tx.bytes.end());
        buf.push_back(std::uint8_t(id.index));
        buf.push_back(std::uint8_t(id.index >> 8));
        auto ob = serialize_output(out);
        buf.insert(buf.end(), ob.begin(), ob.end());
    }
    return hash_bytes(buf);
}

Verdict apply_in_place(LedgerState& state, const Transaction& tx) {
    TxId id = compute_tx_id(tx);

    Amount in_sum = 0, out_sum = 0;
    for (const TxInput& in : tx.inputs) {
        const Output* o = state.find(in.id);
        if (!o) return Verdict::fail(TxError::MissingInput, "input " + in.id.hex() + " not in state");
        auto s = checked_add(in_sum, o->amount);
        if (!s) return Verdict::fail(TxError::Balance, "input amount overflow");
        in_sum = *s;
    }
    for (const Output& o : tx.outputs) {
        auto s = checked_add(out_sum, o.amount);
        if (!s) return Verdict::fail(TxError::Balance, "output amount overflow");
        out_sum = *s;
    }

    for (const TxInput& in : tx.inputs) {
        auto it = state.outputs.find(in.id);
        if (it->second.chain) {
            state.chain_tips.erase(effective_chain_id(in.id, *it->second.chain));
        }
        state.outputs.erase(it);
    }
    for (std::size_t i = 0; i < tx.outputs.size(); ++i) {
        OutputId oid{id, std::uint16_t(i)};
        const Output& o = tx.outputs[i];
        state.outputs.emplace(oid, o);
        if (o.chain) state.chain_tips[effective_chain_id(oid, *o.chain)] = oid;
    }
    state.minted += std::int64_t(out_sum) - std::int64_t(in_sum);
    return Verdict::pass();
}

Amount min_storage_deposit(std::size_t output_byte_size, const LedgerParams& params) {
    if (output_byte_size == 0) throw std::invalid_argument("output byte size must be positive");
    return must_mul(Amount(output_byte_size), params.storage_deposit_per_byte);
}

LedgerState make_genesis(const LedgerParams& params, const std::vector<Output>& outputs) {
    Amount sum = 0;
    for (const Output& o : outputs) sum = must_add(sum, o.amount);
    if (sum != params.initial_supply)
        throw std::invalid_argument("genesis outputs must sum to the initial supply");

    LedgerState state;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        OutputId oid{kGenesisTxId, std::uint16_t(i)};
        state.outputs.emplace(oid, outputs[i]);
        if (outputs[i].chain)
            state.chain_tips[effective_chain_id(oid, *outputs[i].chain)] = oid;
    }
    return state;
}

Output make_genesis_stem() {
    Output stem;
    stem.amount = 0;
    stem.lock = StemLock{};
    stem.stem = true;
    return stem;
}

}  // namespace tanglesim
