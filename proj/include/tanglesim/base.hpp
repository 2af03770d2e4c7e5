#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace tanglesim {

// BLAKE2b-256 digest. All identifiers in the ledger (addresses, chain ids,
// commitments, signature stand-ins) are values of this type.
using Digest = std::array<std::uint8_t, 32>;

inline constexpr Digest kZeroDigest{};

using Address = Digest;
using ChainId = Digest;

Digest hash_bytes(std::span<const std::uint8_t> data);
Digest keyed_hash(const Digest& key, std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);
bool from_hex(std::string_view hex, std::span<std::uint8_t> out);

// Transaction id: 8-byte big-endian tick count followed by the content digest.
// Bytewise comparison therefore orders transactions by ledger time first,
// which makes id order a topological-friendly total order.
struct TxId {
    std::array<std::uint8_t, 40> bytes{};

    static TxId make(std::uint64_t ticks, const Digest& digest);

    std::uint64_t ticks() const;
    bool is_genesis() const { return bytes == std::array<std::uint8_t, 40>{}; }

    auto operator<=>(const TxId&) const = default;

    std::string hex() const { return to_hex(bytes); }
    std::string short_hex() const { return to_hex(bytes).substr(0, 16); }
    static bool parse(std::string_view hex, TxId& out);
};

inline constexpr TxId kGenesisTxId{};

struct OutputId {
    TxId tx;
    std::uint16_t index = 0;

    auto operator<=>(const OutputId&) const = default;

    std::string hex() const { return tx.hex() + "." + std::to_string(index); }
};

struct TxIdHash {
    std::size_t operator()(const TxId& id) const {
        std::size_t h;
        std::memcpy(&h, id.bytes.data() + 8, sizeof(h));
        return h;
    }
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const {
        std::size_t h;
        std::memcpy(&h, d.data(), sizeof(h));
        return h;
    }
};

struct OutputIdHash {
    std::size_t operator()(const OutputId& id) const {
        std::size_t h;
        std::memcpy(&h, id.tx.bytes.data() + 8, sizeof(h));
        return h ^ (std::size_t(id.index) * 0x9e3779b97f4a7c15ull);
    }
};

}  // namespace tanglesim
