#include "rta/sched.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rta {

namespace {

bool any_ra_collision(const SlotSchedule& prev, const SlotOutcome& outcome)
{
    for (std::size_t i = 0; i < prev.size(); ++i)
        if (prev.assignment(i).kind == RuKind::RandomAccess &&
            outcome.result(i).kind == RuResultKind::Collision)
            return true;
    return false;
}

void add_groups(std::span<const StationId> stations, std::uint32_t g, SlotSchedule& out,
                std::vector<StationId>& group)
{
    const auto n = static_cast<std::uint32_t>(stations.size());
    const std::uint32_t groups = std::min(g, n);
    for (std::uint32_t j = 0; j < groups; ++j) {
        group.clear();
        for (std::uint32_t i = j; i < n; i += g)
            group.push_back(stations[i]);
        out.add_deterministic(group);
    }
}

} // namespace

void uora_static_build(std::uint32_t f_ra, std::uint32_t f_max, std::uint64_t slot,
                       SlotSchedule& out)
{
    out.clear(slot);
    for (std::uint32_t i = 0; i < f_ra; ++i)
        out.add_random_access();
    out.nonrta_rus = f_max - f_ra;
}

CraState::CraState(std::uint32_t n_stations) : order(n_stations)
{
    std::iota(order.begin(), order.end(), StationId{0});
}

void cra_observe(CraState& state, const SlotSchedule& prev, const SlotOutcome& outcome,
                 RngStream& rng, ShufflePolicy policy)
{
    if (state.phase == CraState::Phase::Idle) {
        if (!any_ra_collision(prev, outcome))
            return;
        std::iota(state.order.begin(), state.order.end(), StationId{0});
        if (policy == ShufflePolicy::Random)
            rng.shuffle(std::span<StationId>(state.order));
        state.position = 0;
        state.phase = CraState::Phase::Cycle;
        return;
    }

    if (!outcome.any_collision()) {
        state.phase = CraState::Phase::Idle;
        state.position = 0;
        return;
    }
    // re-collisions keep the current order; polling just moves on
    const std::uint32_t n = state.n_stations();
    if (n > 0)
        state.position = (state.position + prev.det_count()) % n;
}

void cra_build(const CraState& state, std::uint32_t f_ra, std::uint32_t f_max, std::uint64_t slot,
               SlotSchedule& out)
{
    uora_static_build(f_ra, f_max, slot, out);
    if (state.phase != CraState::Phase::Cycle)
        return;
    const std::uint32_t n = state.n_stations();
    const std::uint32_t polled = std::min(f_max - f_ra, n);
    for (std::uint32_t k = 0; k < polled; ++k) {
        const StationId id = state.order[(state.position + k) % n];
        out.add_deterministic(std::span<const StationId>(&id, 1));
    }
    out.nonrta_rus = f_max - f_ra - polled;
}

std::vector<std::vector<StationId>> partition_into_groups(std::span<const StationId> stations,
                                                          std::uint32_t g)
{
    if (g == 0)
        throw std::invalid_argument("group count must be positive");
    const auto n = static_cast<std::uint32_t>(stations.size());
    std::vector<std::vector<StationId>> groups(std::min(g, n));
    for (std::uint32_t i = 0; i < n; ++i)
        groups[i % g].push_back(stations[i]);
    return groups;
}

GraState::GraState(std::uint32_t n_stations) : marked(n_stations, 0) {}

std::vector<StationId> GraState::marked_stations() const
{
    std::vector<StationId> out;
    out.reserve(marked_count);
    for (StationId id = 0; id < marked.size(); ++id)
        if (marked[id])
            out.push_back(id);
    return out;
}

void GraState::set_marked(std::span<const StationId> ids)
{
    std::fill(marked.begin(), marked.end(), 0);
    marked_count = 0;
    for (StationId id : ids) {
        if (!marked.at(id)) {
            marked[id] = 1;
            ++marked_count;
        }
    }
}

void gra_observe(GraState& state, const SlotSchedule& prev, const SlotOutcome& outcome)
{
    auto mark = [&](StationId id) {
        if (!state.marked[id]) {
            state.marked[id] = 1;
            ++state.marked_count;
        }
    };
    auto unmark = [&](StationId id) {
        if (state.marked[id]) {
            state.marked[id] = 0;
            --state.marked_count;
        }
    };

    if (state.phase == GraState::Phase::Idle) {
        if (any_ra_collision(prev, outcome))
            state.phase = GraState::Phase::FullGrouping;
        return;
    }

    bool ra_collision = false;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const auto& result = outcome.result(i);
        if (prev.assignment(i).kind == RuKind::RandomAccess) {
            ra_collision = ra_collision || result.kind == RuResultKind::Collision;
            continue;
        }
        const auto members = prev.stations(i);
        if (result.kind == RuResultKind::Collision) {
            for (StationId id : members)
                mark(id);
        } else if (result.kind == RuResultKind::Success && result.more_data) {
            const StationId tx = outcome.transmitters(i).front();
            for (StationId id : members)
                if (id != tx)
                    unmark(id);
            mark(tx);
        } else {
            for (StationId id : members)
                unmark(id);
        }
    }

    if (ra_collision) {
        // the AP cannot tell which unassigned stations contended, so all of them are suspects
        std::vector<std::uint8_t> assigned(state.n_stations(), 0);
        for (std::size_t i = 0; i < prev.size(); ++i)
            for (StationId id : prev.stations(i))
                assigned[id] = 1;
        for (StationId id = 0; id < state.n_stations(); ++id)
            if (!assigned[id])
                mark(id);
    }

    state.phase = state.marked_count > 0 ? GraState::Phase::Resolve : GraState::Phase::Idle;
}

void gra_build(const GraState& state, std::uint32_t f_ra, std::uint32_t f_max, std::uint64_t slot,
               RngStream& rng, SlotSchedule& out, ShufflePolicy policy)
{
    std::vector<StationId> candidates;
    std::vector<StationId> group;
    switch (state.phase) {
    case GraState::Phase::Idle:
        uora_static_build(f_ra, f_max, slot, out);
        return;
    case GraState::Phase::FullGrouping: {
        out.clear(slot);
        candidates.resize(state.n_stations());
        std::iota(candidates.begin(), candidates.end(), StationId{0});
        if (policy == ShufflePolicy::Random)
            rng.shuffle(std::span<StationId>(candidates));
        add_groups(candidates, f_max, out, group);
        out.nonrta_rus = f_max - out.det_count();
        return;
    }
    case GraState::Phase::Resolve: {
        uora_static_build(f_ra, f_max, slot, out);
        candidates = state.marked_stations();
        if (policy == ShufflePolicy::Random)
            rng.shuffle(std::span<StationId>(candidates));
        add_groups(candidates, f_max - f_ra, out, group);
        out.nonrta_rus = f_max - f_ra - out.det_count();
        return;
    }
    }
}

CraScheduler::CraScheduler(const SimConfig& config)
    : state_(config.n_stations), f_ra_(config.f_ra), f_max_(config.f_max),
      policy_(config.shuffle), rng_(config.seed, kAccessPointEntity, StreamPurpose::Shuffle)
{
}

void CraScheduler::observe(const SlotSchedule& prev, const SlotOutcome& outcome)
{
    cra_observe(state_, prev, outcome, rng_, policy_);
}

void CraScheduler::build(std::uint64_t slot, SlotSchedule& out)
{
    cra_build(state_, f_ra_, f_max_, slot, out);
}

GraScheduler::GraScheduler(const SimConfig& config)
    : state_(config.n_stations), f_ra_(config.f_ra), f_max_(config.f_max),
      policy_(config.shuffle), rng_(config.seed, kAccessPointEntity, StreamPurpose::Shuffle)
{
}

void GraScheduler::observe(const SlotSchedule& prev, const SlotOutcome& outcome)
{
    gra_observe(state_, prev, outcome);
}

void GraScheduler::build(std::uint64_t slot, SlotSchedule& out)
{
    gra_build(state_, f_ra_, f_max_, slot, rng_, out, policy_);
}

std::unique_ptr<Scheduler> make_scheduler(const SimConfig& config)
{
    switch (config.scheduler_kind) {
    case SchedulerKind::UoraStatic:
        return std::make_unique<UoraStaticScheduler>(config.f_ra, config.f_max);
    case SchedulerKind::Cra:
        return std::make_unique<CraScheduler>(config);
    case SchedulerKind::Gra:
        return std::make_unique<GraScheduler>(config);
    }
    throw std::invalid_argument("unknown scheduler kind");
}

} // namespace rta
