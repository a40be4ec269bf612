#pragma once

#include "rta/model.hpp"
#include "rta/rng.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace rta {

// Schedulers run at the AP. Each slot they first observe() the previous slot's
// schedule and per-RU outcome, then build() the next schedule. RA RUs always
// come first in the emitted schedule, deterministic RUs follow.

/// Fixed f_ra RA RUs every slot, the rest left to non-RTA traffic.
void uora_static_build(std::uint32_t f_ra, std::uint32_t f_max, std::uint64_t slot,
                       SlotSchedule& out);

// --- Cyclic Resource Assignment -------------------------------------------

struct CraState {
    enum class Phase { Idle, Cycle };

    Phase phase = Phase::Idle;
    std::vector<StationId> order; // station ids in polling order
    std::uint32_t position = 0;   // next index into order

    explicit CraState(std::uint32_t n_stations = 0);
    std::uint32_t n_stations() const noexcept { return static_cast<std::uint32_t>(order.size()); }
};

/// Idle + RA collision enters the cycle with a freshly shuffled order. Inside the
/// cycle a collision-free slot ends it, otherwise the position advances by the
/// number of stations just polled (modulo N).
void cra_observe(CraState& state, const SlotSchedule& prev, const SlotOutcome& outcome,
                 RngStream& rng, ShufflePolicy policy = ShufflePolicy::Random);

/// Idle: f_ra RA RUs. Cycle: f_ra RA RUs plus min(f_max - f_ra, N) single-station
/// RUs for order[position], order[position + 1], ... (cyclically).
void cra_build(const CraState& state, std::uint32_t f_ra, std::uint32_t f_max, std::uint64_t slot,
               SlotSchedule& out);

// --- Group Resource Assignment --------------------------------------------

/// Round-robin split of `stations` into min(g, |stations|) non-empty groups:
/// element i goes to group i mod g, so sizes differ by at most one and the first
/// |stations| mod g groups are the larger ones. g must be positive.
std::vector<std::vector<StationId>> partition_into_groups(std::span<const StationId> stations,
                                                          std::uint32_t g);

struct GraState {
    enum class Phase { Idle, FullGrouping, Resolve };

    Phase phase = Phase::Idle;
    std::vector<std::uint8_t> marked; // indexed by station id
    std::uint32_t marked_count = 0;

    explicit GraState(std::uint32_t n_stations = 0);
    std::uint32_t n_stations() const noexcept { return static_cast<std::uint32_t>(marked.size()); }
    bool is_marked(StationId id) const { return marked.at(id) != 0; }
    std::vector<StationId> marked_stations() const; // ascending
    void set_marked(std::span<const StationId> ids);
};

/// Applies the previous slot's group and RA outcomes to the marked set.
void gra_observe(GraState& state, const SlotSchedule& prev, const SlotOutcome& outcome);

/// Idle: f_ra RA RUs. Full grouping: all stations shuffled into f_max groups, no
/// RA. Resolve: f_ra RA RUs plus the shuffled marked set in f_max - f_ra groups.
void gra_build(const GraState& state, std::uint32_t f_ra, std::uint32_t f_max, std::uint64_t slot,
               RngStream& rng, SlotSchedule& out, ShufflePolicy policy = ShufflePolicy::Random);

// --- Pluggable interface --------------------------------------------------

class Scheduler {
public:
    virtual ~Scheduler() = default;

    virtual SchedulerKind kind() const noexcept = 0;
    virtual void observe(const SlotSchedule& prev, const SlotOutcome& outcome) = 0;
    virtual void build(std::uint64_t slot, SlotSchedule& out) = 0;
};

class UoraStaticScheduler final : public Scheduler {
public:
    UoraStaticScheduler(std::uint32_t f_ra, std::uint32_t f_max) : f_ra_(f_ra), f_max_(f_max) {}

    SchedulerKind kind() const noexcept override { return SchedulerKind::UoraStatic; }
    void observe(const SlotSchedule&, const SlotOutcome&) override {}
    void build(std::uint64_t slot, SlotSchedule& out) override
    {
        uora_static_build(f_ra_, f_max_, slot, out);
    }

private:
    std::uint32_t f_ra_;
    std::uint32_t f_max_;
};

class CraScheduler final : public Scheduler {
public:
    CraScheduler(const SimConfig& config);

    SchedulerKind kind() const noexcept override { return SchedulerKind::Cra; }
    void observe(const SlotSchedule& prev, const SlotOutcome& outcome) override;
    void build(std::uint64_t slot, SlotSchedule& out) override;
    const CraState& state() const noexcept { return state_; }

private:
    CraState state_;
    std::uint32_t f_ra_;
    std::uint32_t f_max_;
    ShufflePolicy policy_;
    RngStream rng_;
};

class GraScheduler final : public Scheduler {
public:
    GraScheduler(const SimConfig& config);

    SchedulerKind kind() const noexcept override { return SchedulerKind::Gra; }
    void observe(const SlotSchedule& prev, const SlotOutcome& outcome) override;
    void build(std::uint64_t slot, SlotSchedule& out) override;
    const GraState& state() const noexcept { return state_; }

private:
    GraState state_;
    std::uint32_t f_ra_;
    std::uint32_t f_max_;
    ShufflePolicy policy_;
    RngStream rng_;
};

std::unique_ptr<Scheduler> make_scheduler(const SimConfig& config);

} // namespace rta
