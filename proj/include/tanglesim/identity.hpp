#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "tanglesim/base.hpp"
#include "tanglesim/tx.hpp"

namespace tanglesim {

// Keyed-hash stand-in for real signatures: the secret is any 32-byte value,
// the public identity is its hash, and a "signature" is the keyed hash of the
// transaction body. Verification consults the registry of known identities,
// which is acceptable in this closed simulated world.

struct KeyPair {
    Digest secret{};
    Address id{};
};

KeyPair derive_keypair(std::string_view name);

Digest sign_body(const Digest& secret, const Transaction& tx);
void sign_transaction(const KeyPair& key, Transaction& tx);

class IdentityRegistry {
  public:
    void add(const KeyPair& key) { secrets_[key.id] = key.secret; }

    std::optional<Digest> secret_of(const Address& id) const {
        auto it = secrets_.find(id);
        if (it == secrets_.end()) return std::nullopt;
        return it->second;
    }

    bool verify_signature(const Transaction& tx) const;

  private:
    std::map<Address, Digest> secrets_;
};

}  // namespace tanglesim
