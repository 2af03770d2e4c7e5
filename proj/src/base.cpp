#include "tanglesim/base.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace tanglesim {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
    });
}

}  // namespace

Digest hash_bytes(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest out;
    crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
    return out;
}

Digest keyed_hash(const Digest& key, std::span<const std::uint8_t> data) {
    ensure_sodium();
    Digest out;
    crypto_generichash(out.data(), out.size(), data.data(), data.size(), key.data(), key.size());
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

namespace {
int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

bool from_hex(std::string_view hex, std::span<std::uint8_t> out) {
    if (hex.size() != out.size() * 2) return false;
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return false;
        out[i] = std::uint8_t((hi << 4) | lo);
    }
    return true;
}

TxId TxId::make(std::uint64_t ticks, const Digest& digest) {
    TxId id;
    for (int i = 0; i < 8; ++i) id.bytes[i] = std::uint8_t(ticks >> (56 - 8 * i));
    std::memcpy(id.bytes.data() + 8, digest.data(), digest.size());
    return id;
}

std::uint64_t TxId::ticks() const {
    std::uint64_t t = 0;
    for (int i = 0; i < 8; ++i) t = (t << 8) | bytes[i];
    return t;
}

bool TxId::parse(std::string_view hex, TxId& out) { return from_hex(hex, out.bytes); }

}  // namespace tanglesim
