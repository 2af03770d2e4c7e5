#include "tanglesim/tx.hpp"

namespace tanglesim {

namespace {

void put_u8(std::vector<std::uint8_t>& buf, std::uint8_t v) { buf.push_back(v); }

void put_u16(std::vector<std::uint8_t>& buf, std::uint16_t v) {
    buf.push_back(std::uint8_t(v));
    buf.push_back(std::uint8_t(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(std::uint8_t(v >> (8 * i)));
}

void put_bytes(std::vector<std::uint8_t>& buf, std::span<const std::uint8_t> b) {
    buf.insert(buf.end(), b.begin(), b.end());
}

void put_lock(std::vector<std::uint8_t>& buf, const Lock& lock) {
    std::visit(
        [&](const auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, AddressLock>) {
                put_u8(buf, 0);
                put_bytes(buf, l.address);
            } else if constexpr (std::is_same_v<L, ChainLock>) {
                put_u8(buf, 1);
                put_bytes(buf, l.target);
            } else if constexpr (std::is_same_v<L, StemLock>) {
                put_u8(buf, 2);
            } else if constexpr (std::is_same_v<L, TagAlongLock>) {
                put_u8(buf, 3);
                put_bytes(buf, l.target);
                put_bytes(buf, l.sender);
                put_u32(buf, l.creation_slot);
            } else {
                put_u8(buf, 4);
                put_bytes(buf, l.owner);
                put_bytes(buf, l.target);
                put_u8(buf, l.freeze_until_slot ? 1 : 0);
                if (l.freeze_until_slot) put_u64(buf, *l.freeze_until_slot);
                put_u64(buf, l.inflation_advance);
                put_u32(buf, l.max_freeze_slots);
            }
        },
        lock);
}

void put_output(std::vector<std::uint8_t>& buf, const Output& out) {
    put_u64(buf, out.amount);
    put_lock(buf, out.lock);
    put_u8(buf, out.chain ? 1 : 0);
    if (out.chain) {
        put_bytes(buf, out.chain->id);
        put_u8(buf, out.chain->is_origin ? 1 : 0);
    }
    std::uint8_t flags = 0;
    if (out.sequencer) flags |= 1;
    if (out.stem) flags |= 2;
    put_u8(buf, flags);
    put_u64(buf, out.declared_inflation);
    put_u8(buf, out.vrf_value ? 1 : 0);
    if (out.vrf_value) put_bytes(buf, *out.vrf_value);
}

}  // namespace

ChainId derive_chain_id(const OutputId& origin) {
    std::vector<std::uint8_t> buf;
    buf.reserve(42);
    put_bytes(buf, origin.tx.bytes);
    put_u16(buf, origin.index);
    return hash_bytes(buf);
}

std::optional<std::size_t> Transaction::sequencer_output_index() const {
    for (std::size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].sequencer) return i;
    return std::nullopt;
}

std::optional<std::size_t> Transaction::stem_output_index() const {
    for (std::size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].stem) return i;
    return std::nullopt;
}

std::vector<std::uint8_t> serialize_output(const Output& out) {
    std::vector<std::uint8_t> buf;
    put_output(buf, out);
    return buf;
}

std::size_t serialized_output_size(const Output& out) { return serialize_output(out).size(); }

std::vector<std::uint8_t> serialize_body(const Transaction& tx) {
    std::vector<std::uint8_t> buf;
    buf.reserve(128 + 48 * tx.inputs.size() + 96 * tx.outputs.size());
    put_u32(buf, std::uint32_t(tx.inputs.size()));
    for (const TxInput& in : tx.inputs) {
        put_bytes(buf, in.id.tx.bytes);
        put_u16(buf, in.id.index);
        put_u8(buf, in.terminate_chain ? 1 : 0);
    }
    put_u32(buf, std::uint32_t(tx.outputs.size()));
    for (const Output& out : tx.outputs) put_output(buf, out);
    put_u32(buf, std::uint32_t(tx.endorsements.size()));
    for (const TxId& e : tx.endorsements) put_bytes(buf, e.bytes);
    put_u64(buf, tx.timestamp.ticks);
    put_bytes(buf, tx.sender);
    return buf;
}

std::vector<std::uint8_t> serialize_full(const Transaction& tx) {
    std::vector<std::uint8_t> buf = serialize_body(tx);
    put_bytes(buf, tx.signature);
    return buf;
}

TxId compute_tx_id(const Transaction& tx) {
    return TxId::make(tx.timestamp.ticks, hash_bytes(serialize_full(tx)));
}

}  // namespace tanglesim
