#pragma once

#include "rta/rng.hpp"

#include <cstdint>
#include <optional>

namespace rta {

/// OFDMA back-off state of one station.
struct OboState {
    std::uint32_t ocw = 1;
    std::optional<std::uint32_t> counter;
};

struct OboDecision {
    bool transmit = false;
    std::uint32_t ru_index = 0; // ordinal among the slot's RA RUs, valid when transmit
};

enum class TxResult { Success, Collision };

/// Counter uniform in [0, ocw - 1].
void init_counter(OboState& state, RngStream& rng);

/// Trigger frame announcing `num_ra_rus` RA RUs. Transmits in a uniformly chosen
/// RA RU when the counter is below `num_ra_rus`; otherwise the counter is
/// decremented by `num_ra_rus`. Requires a set counter.
OboDecision on_trigger(OboState& state, std::uint32_t num_ra_rus, RngStream& rng);

/// Outcome of an RA transmission. Success resets the window and clears the
/// counter; collision doubles the window (clamped to ocw_max) and redraws.
void on_result(OboState& state, TxResult result, std::uint32_t ocw_min, std::uint32_t ocw_max,
               RngStream& init_rng);

} // namespace rta
