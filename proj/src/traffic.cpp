#include "rta/traffic.hpp"

#include <cmath>

namespace rta {

double sample_interarrival(double rate, double draw)
{
    return -std::log1p(-draw) / rate;
}

StationTraffic make_station_traffic(StationId id, double rate, RngStream& rng)
{
    StationTraffic st;
    st.id = id;
    st.next_arrival_at = from_seconds(sample_interarrival(rate, rng.uniform01()));
    return st;
}

Frame take_delivered(StationTraffic& state, Nanos delivery_time)
{
    if (!state.pending)
        throw NoPendingFrame("station has no pending frame to deliver");
    Frame f = *state.pending;
    f.delivered_at = delivery_time;
    state.pending.reset();
    return f;
}

Frame on_delivery(StationTraffic& state, Nanos delivery_time, Nanos gap)
{
    Frame f = take_delivered(state, delivery_time);
    state.next_arrival_at = delivery_time + gap;
    return f;
}

Frame on_delivery(StationTraffic& state, Nanos delivery_time, double rate, RngStream& rng)
{
    if (!state.pending)
        throw NoPendingFrame("station has no pending frame to deliver");
    return on_delivery(state, delivery_time,
                       from_seconds(sample_interarrival(rate, rng.uniform01())));
}

void advance_to(StationTraffic& state, Nanos time)
{
    if (state.pending || !state.next_arrival_at || *state.next_arrival_at > time)
        return;
    state.pending = Frame{state.id, *state.next_arrival_at, std::nullopt};
    state.next_arrival_at.reset();
}

} // namespace rta
