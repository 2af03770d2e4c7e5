#include "tanglesim/identity.hpp"

namespace tanglesim {

KeyPair derive_keypair(std::string_view name) {
    std::vector<std::uint8_t> seed;
    static constexpr std::string_view tag = "tanglesim/identity/";
    seed.reserve(tag.size() + name.size());
    seed.insert(seed.end(), tag.begin(), tag.end());
    seed.insert(seed.end(), name.begin(), name.end());
    KeyPair key;
    key.secret = hash_bytes(seed);
    key.id = hash_bytes(key.secret);
    return key;
}

Digest sign_body(const Digest& secret, const Transaction& tx) {
    return keyed_hash(secret, serialize_body(tx));
}

void sign_transaction(const KeyPair& key, Transaction& tx) {
    tx.sender = key.id;
    tx.signature = sign_body(key.secret, tx);
}

bool IdentityRegistry::verify_signature(const Transaction& tx) const {
    auto secret = secret_of(tx.sender);
    if (!secret) return false;
    return sign_body(*secret, tx) == tx.signature;
}

}  // namespace tanglesim
