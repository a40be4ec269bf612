#pragma once

#include "rta/model.hpp"
#include "rta/rng.hpp"

#include <optional>
#include <stdexcept>

namespace rta {

/// Inverse-CDF exponential sample, -ln(1 - draw) / rate, in seconds.
/// `draw` is in [0, 1).
double sample_interarrival(double rate, double draw);

class NoPendingFrame : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Single-buffer frame source of one station: either a frame is waiting, or the
/// next one is scheduled, or (scripted traffic only) nothing is left.
struct StationTraffic {
    StationId id = 0;
    std::optional<Frame> pending;
    std::optional<Nanos> next_arrival_at;
};

/// Fresh station with its first arrival drawn from the same exponential.
StationTraffic make_station_traffic(StationId id, double rate, RngStream& rng);

/// Marks the pending frame delivered at `delivery_time`, clears the buffer and
/// schedules the next arrival `gap` later. Returns the delivered frame.
Frame on_delivery(StationTraffic& state, Nanos delivery_time, Nanos gap);

/// Same, with the gap sampled from the exponential at `rate`.
Frame on_delivery(StationTraffic& state, Nanos delivery_time, double rate, RngStream& rng);

/// Delivery without regeneration (scripted sources supply their own arrivals).
Frame take_delivered(StationTraffic& state, Nanos delivery_time);

/// Materializes the scheduled frame once `time` has reached its arrival instant.
void advance_to(StationTraffic& state, Nanos time);

} // namespace rta
