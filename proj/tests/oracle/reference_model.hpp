#pragma once

#include "rta/model.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rta::oracle {

/// Source of every random decision the reference model makes. `choose(n)` must
/// return a value in [0, n); each call is one independent uniform choice.
class Chooser {
public:
    virtual ~Chooser() = default;
    virtual std::uint64_t choose(std::uint64_t arity) = 0;
};

/// Always picks 0; with windows of one and identity shuffles that is the only path.
class FirstChoice final : public Chooser {
public:
    std::uint64_t choose(std::uint64_t) override { return 0; }
};

struct Scenario {
    SimConfig config;                                 // seed and stop rule are ignored
    std::vector<std::pair<StationId, Nanos>> arrivals; // scripted
    std::uint32_t horizon = 4;
};

struct RunRecord {
    std::vector<std::uint8_t> delivered;       // per station, within the horizon
    std::vector<std::uint8_t> collision_slot;  // per slot, any RU collided
    std::vector<std::string> trace;
};

/// Straightforward slot-by-slot re-implementation of the protocol, written for
/// clarity over speed, used to cross-check the engine on tiny scenarios.
RunRecord simulate(const Scenario& scenario, Chooser& chooser);

/// The k-th permutation of 0..n-1 in lexicographic order, k < n!.
std::vector<StationId> nth_permutation(std::uint32_t n, std::uint64_t k);
std::uint64_t factorial(std::uint32_t n);

} // namespace rta::oracle
