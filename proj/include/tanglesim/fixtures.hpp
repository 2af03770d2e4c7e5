#pragma once

#include <map>
#include <memory>

#include "tanglesim/tangle.hpp"

namespace tanglesim {

// Hand-built tangles for the inspect command and for tests: labeled vertices
// with known deltas, coverages and conflicts.
struct Fixture {
    std::string name;
    LedgerParams params;
    std::shared_ptr<IdentityRegistry> registry;
    std::unique_ptr<UtxoTangle> tangle;
    std::map<std::string, TxId> labels;

    std::string describe() const;
};

std::vector<std::string> fixture_names();

// Returns nullptr for an unknown name.
std::unique_ptr<Fixture> make_fixture(const std::string& name);

}  // namespace tanglesim
