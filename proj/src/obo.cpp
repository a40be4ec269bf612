#include "rta/obo.hpp"

#include <algorithm>
#include <stdexcept>

namespace rta {

void init_counter(OboState& state, RngStream& rng)
{
    state.counter = static_cast<std::uint32_t>(rng.below(state.ocw));
}

OboDecision on_trigger(OboState& state, std::uint32_t num_ra_rus, RngStream& rng)
{
    if (!state.counter)
        throw std::logic_error("OBO trigger without an initialized counter");
    if (*state.counter < num_ra_rus)
        return {true, static_cast<std::uint32_t>(rng.below(num_ra_rus))};
    *state.counter -= num_ra_rus;
    return {false, 0};
}

void on_result(OboState& state, TxResult result, std::uint32_t ocw_min, std::uint32_t ocw_max,
               RngStream& init_rng)
{
    if (result == TxResult::Success) {
        state.ocw = ocw_min;
        state.counter.reset();
        return;
    }
    state.ocw = static_cast<std::uint32_t>(
        std::min<std::uint64_t>(std::uint64_t{state.ocw} * 2, ocw_max));
    init_counter(state, init_rng);
}

} // namespace rta
