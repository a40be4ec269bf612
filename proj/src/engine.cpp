#include "rta/engine.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace rta {

void resolve_slot(const SlotSchedule& schedule, std::span<const std::uint8_t> has_data,
                  std::span<const RaTransmission> ra_transmissions, ChannelRules rules,
                  SlotOutcome& out)
{
    out.clear();
    std::vector<StationId> tx;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        tx.clear();
        std::size_t data = 0;
        if (schedule.assignment(i).kind == RuKind::RandomAccess) {
            for (const auto& t : ra_transmissions)
                if (t.ru == i)
                    tx.push_back(t.station);
            data = tx.size();
        } else {
            for (StationId id : schedule.stations(i)) {
                const bool buffered = has_data[id] != 0;
                if (buffered)
                    ++data;
                if (buffered || rules == ChannelRules::Ax)
                    tx.push_back(id);
            }
        }

        RuResultKind kind = RuResultKind::Empty;
        if (tx.empty())
            kind = RuResultKind::Empty;
        else if (data == 0)
            kind = RuResultKind::PaddingBusy;
        else if (tx.size() == 1)
            kind = RuResultKind::Success;
        else
            kind = RuResultKind::Collision;

        std::sort(tx.begin(), tx.end());
        out.add(kind, tx);
    }
}

void ArrivalScript::add(StationId station, Nanos at)
{
    auto& list = arrivals_.at(station);
    list.insert(std::upper_bound(list.begin(), list.end(), at), at);
}

bool ArrivalScript::empty() const noexcept
{
    return std::all_of(arrivals_.begin(), arrivals_.end(),
                       [](const auto& v) { return v.empty(); });
}

std::string format_trace_line(const SlotSchedule& schedule, const SlotOutcome& outcome)
{
    std::string line = fmt::format("{}", schedule.slot_index);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const bool ra = schedule.assignment(i).kind == RuKind::RandomAccess;
        fmt::format_to(std::back_inserter(line), " {}{{{}}}:{}[{}]", ra ? "RA" : "D",
                       fmt::join(schedule.stations(i), ","), to_string(outcome.result(i).kind),
                       fmt::join(outcome.transmitters(i), ","));
    }
    fmt::format_to(std::back_inserter(line), " nonrta={}", schedule.nonrta_rus);
    return line;
}

Engine::Engine(const SimConfig& config) : Engine(config, std::nullopt) {}

Engine::Engine(const SimConfig& config, ArrivalScript script) : Engine(config, std::optional(std::move(script)))
{
}

Engine::Engine(const SimConfig& config, std::optional<ArrivalScript> script)
    : config_(validate_config(config)), slot_(from_seconds(config.slot_duration)),
      deadline_(from_seconds(config.deadline)), script_(std::move(script)),
      scheduler_(make_scheduler(config)), metrics_(make_report(config))
{
    const std::uint32_t n = config_.n_stations;
    if (script_ && script_->n_stations() != n) {
        if (!script_->empty() || script_->n_stations() > n)
            throw std::invalid_argument(fmt::format(
                "arrival script covers {} stations, config has {}", script_->n_stations(), n));
        script_ = ArrivalScript(n);
    }
    obo_.assign(n, OboState{config_.ocw_min, std::nullopt});
    rng_.reserve(n);
    traffic_.reserve(n);
    script_pos_.assign(n, 0);
    for (StationId id = 0; id < n; ++id) {
        rng_.push_back({RngStream(config_.seed, id, StreamPurpose::Traffic),
                        RngStream(config_.seed, id, StreamPurpose::OboInit),
                        RngStream(config_.seed, id, StreamPurpose::OboRu)});
        if (script_) {
            StationTraffic st{id, std::nullopt, std::nullopt};
            if (const auto list = script_->arrivals(id); !list.empty()) {
                st.next_arrival_at = list.front();
                script_pos_[id] = 1;
            }
            traffic_.push_back(st);
        } else if (config_.traffic == TrafficModel::Saturated) {
            traffic_.push_back({id, std::nullopt, Nanos{0}});
        } else {
            traffic_.push_back(make_station_traffic(id, config_.arrival_rate, rng_[id].traffic));
        }
    }
    has_data_.assign(n, 0);
    assigned_.assign(n, 0);
}

void Engine::deliver(StationId id, Nanos at, bool counted)
{
    auto& st = traffic_[id];
    Frame frame;
    if (script_) {
        frame = take_delivered(st, at);
        const auto list = script_->arrivals(id);
        if (script_pos_[id] < list.size())
            st.next_arrival_at = std::max(list[script_pos_[id]++], at);
    } else if (config_.traffic == TrafficModel::Saturated) {
        frame = on_delivery(st, at, Nanos{0});
    } else {
        frame = on_delivery(st, at, config_.arrival_rate, rng_[id].traffic);
    }
    if (counted)
        record_delivery(metrics_, frame.generated_at, *frame.delivered_at, deadline_);
    if (on_delivered_)
        on_delivered_(frame);
}

void Engine::step()
{
    const std::uint64_t k = clock_;
    const Nanos start = slot_start(k);
    const Nanos end = start + slot_;
    const bool counted = k >= config_.warmup_slots;

    if (k > 0)
        scheduler_->observe(schedule_, outcome_);
    scheduler_->build(k, schedule_);
    check_schedule(schedule_, config_.f_max, config_.n_stations, scratch_);

    ra_rus_.clear();
    for (std::size_t i = 0; i < schedule_.size(); ++i) {
        if (schedule_.assignment(i).kind == RuKind::RandomAccess)
            ra_rus_.push_back(static_cast<std::uint32_t>(i));
        else
            for (StationId id : schedule_.stations(i))
                assigned_[id] = 1;
    }
    const auto num_ra = static_cast<std::uint32_t>(ra_rus_.size());

    // stations polled this slot use their deterministic RU only
    ra_tx_.clear();
    for (StationId id = 0; id < config_.n_stations; ++id) {
        advance_to(traffic_[id], start);
        has_data_[id] = traffic_[id].pending ? 1 : 0;
        if (!has_data_[id] || assigned_[id])
            continue;
        auto& obo = obo_[id];
        if (!obo.counter)
            init_counter(obo, rng_[id].obo_init);
        const OboDecision d = on_trigger(obo, num_ra, rng_[id].obo_ru);
        if (d.transmit)
            ra_tx_.push_back({id, ra_rus_[d.ru_index]});
    }

    resolve_slot(schedule_, has_data_, ra_tx_, config_.channel_rules, outcome_);
    check_outcome(schedule_, outcome_);

    for (std::size_t i = 0; i < outcome_.size(); ++i) {
        const auto& result = outcome_.result(i);
        const bool ra = schedule_.assignment(i).kind == RuKind::RandomAccess;
        const auto tx = outcome_.transmitters(i);
        if (result.kind == RuResultKind::Success) {
            const StationId id = tx.front();
            if (ra) {
                on_result(obo_[id], TxResult::Success, config_.ocw_min, config_.ocw_max,
                          rng_[id].obo_init);
            } else {
                obo_[id] = OboState{config_.ocw_min, std::nullopt};
            }
            deliver(id, end, counted);
        } else if (result.kind == RuResultKind::Collision && ra) {
            for (StationId id : tx)
                on_result(obo_[id], TxResult::Collision, config_.ocw_min, config_.ocw_max,
                          rng_[id].obo_init);
        }
    }

    for (std::size_t i = 0; i < schedule_.size(); ++i)
        for (StationId id : schedule_.stations(i))
            assigned_[id] = 0;

    if (counted)
        record_slot(metrics_, schedule_, outcome_);
    if (trace_)
        trace_(schedule_, outcome_);
    ++clock_;
}

bool Engine::done() const noexcept
{
    if (clock_ < config_.warmup_slots)
        return false;
    if (config_.stop_rule == StopRule::PacketCount)
        return metrics_.delivered_count >= config_.stop_value;
    return metrics_.slot_count >= config_.stop_value;
}

const MetricsReport& Engine::run()
{
    while (!done())
        step();
    return metrics_;
}

MetricsReport run(const SimConfig& config)
{
    Engine engine(config);
    return engine.run();
}

} // namespace rta
