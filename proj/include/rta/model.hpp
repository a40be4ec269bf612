#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rta {

using StationId = std::uint32_t;
using Nanos = std::chrono::nanoseconds;

/// Seconds at the interface, integer nanoseconds inside the simulator.
Nanos from_seconds(double seconds);
double to_seconds(Nanos t);

enum class SchedulerKind { UoraStatic, Cra, Gra };
enum class ChannelRules { Ax, Be };
enum class StopRule { PacketCount, SlotCount };
enum class ShufflePolicy { Random, Identity };
enum class TrafficModel { Poisson, Saturated };

std::string_view to_string(SchedulerKind k);
std::string_view to_string(ChannelRules r);
std::string_view to_string(StopRule s);
std::string_view to_string(ShufflePolicy s);
std::string_view to_string(TrafficModel t);

SchedulerKind parse_scheduler_kind(std::string_view s);
ChannelRules parse_channel_rules(std::string_view s);
StopRule parse_stop_rule(std::string_view s);
ShufflePolicy parse_shuffle_policy(std::string_view s);
TrafficModel parse_traffic_model(std::string_view s);

struct SimConfig {
    std::uint32_t n_stations = 50;
    double arrival_rate = 200.0;   // frames per second, per station
    std::uint32_t f_ra = 1;        // RA RUs
    std::uint32_t f_max = 18;      // RU budget per slot
    double slot_duration = 250e-6; // seconds
    double deadline = 1e-3;        // seconds
    std::uint32_t ocw_min = 1;
    std::uint32_t ocw_max = 1;
    SchedulerKind scheduler_kind = SchedulerKind::Gra;
    ChannelRules channel_rules = ChannelRules::Be;
    StopRule stop_rule = StopRule::PacketCount;
    std::uint64_t stop_value = 1'000'000;
    std::uint64_t seed = 1;
    std::uint64_t warmup_slots = 1000;
    ShufflePolicy shuffle = ShufflePolicy::Random;
    TrafficModel traffic = TrafficModel::Poisson;

    bool operator==(const SimConfig&) const = default;
};

class InvalidConfig : public std::runtime_error {
public:
    explicit InvalidConfig(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Returns `config` unchanged when every invariant holds, throws InvalidConfig
/// listing all violations otherwise.
const SimConfig& validate_config(const SimConfig& config);

/// Non-fatal findings, e.g. an OCW range that doubling from ocw_min never spans.
std::vector<std::string> config_warnings(const SimConfig& config);

/// Flat key=value text, keys are the hyphenated field names.
/// Throws std::invalid_argument on unknown keys or unparsable values.
void apply_config_key(SimConfig& config, std::string_view key, std::string_view value);
std::vector<std::pair<std::string, std::string>> parse_config_entries(std::string_view text);
SimConfig parse_config_text(std::string_view text, SimConfig base = {});
std::string format_config_text(const SimConfig& config);

/// 64-bit FNV-1a over the canonical text form with the seed left out, so
/// replications of one scenario share a digest.
std::uint64_t config_digest(const SimConfig& config);
std::string digest_hex(std::uint64_t digest);

struct Frame {
    StationId owner = 0;
    Nanos generated_at{0};
    std::optional<Nanos> delivered_at;
};

enum class RuKind : std::uint8_t { RandomAccess, Deterministic };

struct RuAssignment {
    RuKind kind = RuKind::RandomAccess;
    std::uint32_t first = 0; // offset into SlotSchedule::members
    std::uint32_t count = 0;
};

/// RU plan for one slot. Deterministic station sets are stored contiguously in
/// `members`; each assignment refers to its slice.
class SlotSchedule {
public:
    std::uint64_t slot_index = 0;
    std::uint32_t nonrta_rus = 0;

    void clear(std::uint64_t slot);
    void add_random_access();
    void add_deterministic(std::span<const StationId> stations);
    void add_deterministic(std::initializer_list<StationId> stations);

    std::size_t size() const noexcept { return assignments_.size(); }
    const RuAssignment& assignment(std::size_t i) const { return assignments_[i]; }
    std::span<const RuAssignment> assignments() const noexcept { return assignments_; }
    std::span<const StationId> stations(std::size_t i) const;

    std::uint32_t ra_count() const noexcept { return ra_count_; }
    std::uint32_t det_count() const noexcept
    {
        return static_cast<std::uint32_t>(assignments_.size()) - ra_count_;
    }

private:
    std::vector<RuAssignment> assignments_;
    std::vector<StationId> members_;
    std::uint32_t ra_count_ = 0;
};

enum class RuResultKind : std::uint8_t { Empty, Success, Collision, PaddingBusy };

std::string_view to_string(RuResultKind k);

struct RuResult {
    RuResultKind kind = RuResultKind::Empty;
    bool more_data = false;
    std::uint32_t first = 0; // offset into SlotOutcome transmitters
    std::uint32_t count = 0;
};

/// Per-RU results, index-aligned with the SlotSchedule they answer.
class SlotOutcome {
public:
    void clear();
    void add(RuResultKind kind, std::span<const StationId> transmitters, bool more_data = false);

    std::size_t size() const noexcept { return results_.size(); }
    const RuResult& result(std::size_t i) const { return results_[i]; }
    std::span<const StationId> transmitters(std::size_t i) const;

    bool any_collision() const noexcept { return collisions_ > 0; }
    std::uint32_t collision_count() const noexcept { return collisions_; }

private:
    std::vector<RuResult> results_;
    std::vector<StationId> transmitters_;
    std::uint32_t collisions_ = 0;
};

/// Throws std::logic_error when the schedule breaks RU conservation or lists a
/// station in two deterministic RUs. `scratch` is resized to n_stations.
void check_schedule(const SlotSchedule& schedule, std::uint32_t f_max, std::uint32_t n_stations,
                    std::vector<std::uint8_t>& scratch);

/// Throws std::logic_error if the outcome is not index-aligned with `schedule`
/// or a collision carries fewer than two transmitters.
void check_outcome(const SlotSchedule& schedule, const SlotOutcome& outcome);

} // namespace rta
