#pragma once

#include <array>
#include <string>

#include "autonoc/errors.hpp"

namespace autonoc {

// Administrative slices of the network. Every simulated element belongs to
// exactly one domain; controllers never answer for a foreign domain.
enum class Domain {
    BackboneA,
    BackboneB,
    DciMetro,
    IntraDc,
};

inline constexpr std::array<Domain, 4> kAllDomains = {
    Domain::BackboneA, Domain::BackboneB, Domain::DciMetro, Domain::IntraDc};

inline std::string to_string(Domain d) {
    switch (d) {
    case Domain::BackboneA: return "backbone-A";
    case Domain::BackboneB: return "backbone-B";
    case Domain::DciMetro: return "dci-metro";
    case Domain::IntraDc: return "intra-dc";
    }
    return "?";
}

inline Domain domain_from_string(const std::string& s) {
    for (Domain d : kAllDomains) {
        if (to_string(d) == s) return d;
    }
    throw NotFoundError("unknown domain: " + s);
}

} // namespace autonoc
