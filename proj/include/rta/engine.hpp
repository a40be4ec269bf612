#pragma once

#include "rta/metrics.hpp"
#include "rta/model.hpp"
#include "rta/obo.hpp"
#include "rta/rng.hpp"
#include "rta/sched.hpp"
#include "rta/traffic.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rta {

/// A station's RA transmission this slot: `ru` is the schedule assignment index.
struct RaTransmission {
    StationId station = 0;
    std::uint32_t ru = 0;
};

/// Collects the transmitters of every RU and classifies the result.
///
/// RA RUs carry the stations in `ra_transmissions` that picked them. On a
/// deterministic RU the transmitters are the members holding a frame (be rules)
/// or all members, the ones without a frame sending padding (ax rules).
/// One data transmitter alone is a success; two or more transmitters with at
/// least one data frame collide; padding alone leaves the RU padding-busy.
void resolve_slot(const SlotSchedule& schedule, std::span<const std::uint8_t> has_data,
                  std::span<const RaTransmission> ra_transmissions, ChannelRules rules,
                  SlotOutcome& out);

/// Pre-set arrival times per station, replacing generated traffic. Frames are
/// single-buffered: an arrival that falls while a frame waits materializes when
/// that frame is delivered.
class ArrivalScript {
public:
    explicit ArrivalScript(std::uint32_t n_stations = 0) : arrivals_(n_stations) {}

    void add(StationId station, Nanos at);
    std::uint32_t n_stations() const noexcept { return static_cast<std::uint32_t>(arrivals_.size()); }
    std::span<const Nanos> arrivals(StationId station) const { return arrivals_.at(station); }
    bool empty() const noexcept;

private:
    std::vector<std::vector<Nanos>> arrivals_; // sorted per station
};

/// One line per slot: each RU as `RA{}` or `D{members}`, its outcome and
/// transmitters, then the non-RTA RU count, e.g.
/// `1 RA{}:collision[10,11] D{0}:success[0] D{2}:empty[] nonrta=0`.
std::string format_trace_line(const SlotSchedule& schedule, const SlotOutcome& outcome);

class Engine {
public:
    using TraceSink = std::function<void(const SlotSchedule&, const SlotOutcome&)>;
    using DeliverySink = std::function<void(const Frame&)>;

    /// Throws InvalidConfig.
    explicit Engine(const SimConfig& config);
    Engine(const SimConfig& config, ArrivalScript script);

    /// One slot: observe, build, advance traffic, back-off, resolve, feedback,
    /// regenerate, record.
    void step();

    /// Steps until the configured stop rule is met.
    const MetricsReport& run();

    std::uint64_t clock() const noexcept { return clock_; }
    Nanos slot_start(std::uint64_t slot) const noexcept { return slot_ * static_cast<std::int64_t>(slot); }
    const SimConfig& config() const noexcept { return config_; }
    const MetricsReport& metrics() const noexcept { return metrics_; }
    const SlotSchedule& last_schedule() const noexcept { return schedule_; }
    const SlotOutcome& last_outcome() const noexcept { return outcome_; }
    const StationTraffic& traffic(StationId id) const { return traffic_.at(id); }
    const OboState& obo(StationId id) const { return obo_.at(id); }
    const Scheduler& scheduler() const noexcept { return *scheduler_; }

    void set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }
    void set_delivery_sink(DeliverySink sink) { on_delivered_ = std::move(sink); }

private:
    struct StationRng {
        RngStream traffic;
        RngStream obo_init;
        RngStream obo_ru;
    };

    Engine(const SimConfig& config, std::optional<ArrivalScript> script);

    void deliver(StationId id, Nanos at, bool counted);
    bool done() const noexcept;

    SimConfig config_;
    Nanos slot_;
    Nanos deadline_;
    std::optional<ArrivalScript> script_;
    std::vector<std::size_t> script_pos_;

    std::vector<StationTraffic> traffic_;
    std::vector<OboState> obo_;
    std::vector<StationRng> rng_;
    std::unique_ptr<Scheduler> scheduler_;

    SlotSchedule schedule_;
    SlotOutcome outcome_;
    std::vector<std::uint8_t> has_data_;
    std::vector<std::uint8_t> assigned_;
    std::vector<std::uint8_t> scratch_;
    std::vector<std::uint32_t> ra_rus_;
    std::vector<RaTransmission> ra_tx_;

    MetricsReport metrics_;
    std::uint64_t clock_ = 0;
    TraceSink trace_;
    DeliverySink on_delivered_;
};

/// Validates, then simulates warm-up plus the stop rule; deterministic in config.
MetricsReport run(const SimConfig& config);

} // namespace rta
