#include "oracle/enumerate.hpp"

#include "rta/engine.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace rta::oracle {

namespace {

class Odometer final : public Chooser {
public:
    std::uint64_t choose(std::uint64_t arity) override
    {
        if (arity == 0)
            throw std::logic_error("choice with no options");
        if (pos_ < digits_.size()) {
            if (digits_[pos_].arity != arity)
                throw std::logic_error("choice arity changed along a replayed path");
            return digits_[pos_++].value;
        }
        digits_.push_back({0, arity});
        ++pos_;
        return 0;
    }

    void rewind() { pos_ = 0; }

    double probability() const
    {
        double p = 1.0;
        for (const auto& d : digits_)
            p /= static_cast<double>(d.arity);
        return p;
    }

    /// Moves to the next path; false once all have been visited.
    bool advance()
    {
        while (!digits_.empty() && digits_.back().value + 1 == digits_.back().arity)
            digits_.pop_back();
        if (digits_.empty())
            return false;
        ++digits_.back().value;
        return true;
    }

private:
    struct Digit {
        std::uint64_t value;
        std::uint64_t arity;
    };
    std::vector<Digit> digits_;
    std::size_t pos_ = 0;
};

} // namespace

Distribution enumerate(const Scenario& scenario)
{
    Distribution d;
    d.p_delivered.assign(scenario.config.n_stations, 0.0);
    d.p_collision.assign(scenario.horizon, 0.0);
    Odometer odo;
    do {
        odo.rewind();
        const RunRecord rec = simulate(scenario, odo);
        const double p = odo.probability();
        ++d.paths;
        d.total_probability += p;
        for (std::size_t i = 0; i < rec.delivered.size(); ++i)
            d.p_delivered[i] += rec.delivered[i] ? p : 0.0;
        for (std::size_t k = 0; k < rec.collision_slot.size(); ++k)
            d.p_collision[k] += rec.collision_slot[k] ? p : 0.0;
    } while (odo.advance());
    return d;
}

Distribution monte_carlo(const Scenario& scenario, std::uint64_t runs, std::uint64_t seed_base)
{
    const std::uint32_t n = scenario.config.n_stations;
    std::vector<std::uint64_t> delivered(n, 0), collided(scenario.horizon, 0);
    ArrivalScript script(n);
    for (const auto& [id, at] : scenario.arrivals)
        script.add(id, at);

    SimConfig cfg = scenario.config;
    cfg.warmup_slots = 0;
    cfg.stop_rule = StopRule::SlotCount;
    cfg.stop_value = scenario.horizon;

    std::vector<std::uint8_t> got(n);
    for (std::uint64_t r = 0; r < runs; ++r) {
        cfg.seed = seed_base + r;
        Engine engine(cfg, script);
        std::fill(got.begin(), got.end(), 0);
        engine.set_delivery_sink([&](const Frame& f) { got[f.owner] = 1; });
        for (std::uint32_t k = 0; k < scenario.horizon; ++k) {
            engine.step();
            collided[k] += engine.last_outcome().any_collision();
        }
        for (std::uint32_t i = 0; i < n; ++i)
            delivered[i] += got[i];
    }

    Distribution d;
    d.paths = runs;
    d.total_probability = 1.0;
    for (auto c : delivered)
        d.p_delivered.push_back(static_cast<double>(c) / static_cast<double>(runs));
    for (auto c : collided)
        d.p_collision.push_back(static_cast<double>(c) / static_cast<double>(runs));
    return d;
}

Comparison compare(const Distribution& exact, const Distribution& sampled, std::uint64_t runs,
                   double z_limit)
{
    Comparison cmp;
    auto one = [&](const std::string& what, double p, double q) {
        ++cmp.events;
        double z = 0.0;
        bool bad = false;
        if (p <= 1e-12 || p >= 1.0 - 1e-12) {
            bad = std::abs(p - q) > 1e-12;
            z = bad ? INFINITY : 0.0;
        } else {
            z = std::abs(q - p) / std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
            bad = z > z_limit;
        }
        cmp.worst_z = std::max(cmp.worst_z, z);
        if (bad && cmp.mismatches++ == 0)
            cmp.detail = fmt::format("{}: exact {:.6f} sampled {:.6f} (z={:.2f})", what, p, q, z);
    };
    for (std::size_t i = 0; i < exact.p_delivered.size(); ++i)
        one(fmt::format("station {} delivered", i), exact.p_delivered[i], sampled.p_delivered.at(i));
    for (std::size_t k = 0; k < exact.p_collision.size(); ++k)
        one(fmt::format("collision in slot {}", k), exact.p_collision[k], sampled.p_collision.at(k));
    return cmp;
}

std::vector<NamedScenario> small_scenarios()
{
    auto base = [](SchedulerKind kind, ChannelRules rules, std::uint32_t n, std::uint32_t f_ra,
                   std::uint32_t f_max, std::uint32_t ocw_min, std::uint32_t ocw_max) {
        SimConfig c;
        c.scheduler_kind = kind;
        c.channel_rules = rules;
        c.n_stations = n;
        c.f_ra = f_ra;
        c.f_max = f_max;
        c.ocw_min = ocw_min;
        c.ocw_max = ocw_max;
        c.shuffle = ShufflePolicy::Random;
        c.stop_rule = StopRule::SlotCount;
        return c;
    };
    const Nanos t0{0};
    const Nanos mid{300'000}; // inside slot 1
    std::vector<NamedScenario> out;
    out.push_back({"uora N=3 f=2 F=3 ocw 1..4",
                   {base(SchedulerKind::UoraStatic, ChannelRules::Be, 3, 2, 3, 1, 4),
                    {{0, t0}, {1, t0}, {2, t0}, {2, mid}}, 4}});
    out.push_back({"uora N=2 f=1 F=2 ocw 2..4",
                   {base(SchedulerKind::UoraStatic, ChannelRules::Ax, 2, 1, 2, 2, 4),
                    {{0, t0}, {1, t0}, {0, mid}}, 4}});
    out.push_back({"cra N=3 f=1 F=3 be",
                   {base(SchedulerKind::Cra, ChannelRules::Be, 3, 1, 3, 1, 2),
                    {{0, t0}, {1, t0}, {2, mid}}, 4}});
    out.push_back({"cra N=3 f=1 F=2 ax",
                   {base(SchedulerKind::Cra, ChannelRules::Ax, 3, 1, 2, 1, 1),
                    {{0, t0}, {1, t0}, {2, t0}}, 4}});
    out.push_back({"gra N=3 f=1 F=2",
                   {base(SchedulerKind::Gra, ChannelRules::Be, 3, 1, 2, 1, 1),
                    {{0, t0}, {1, t0}, {2, t0}, {0, mid}}, 4}});
    out.push_back({"gra N=3 f=2 F=3 ocw 1..2",
                   {base(SchedulerKind::Gra, ChannelRules::Be, 3, 2, 3, 1, 2),
                    {{0, t0}, {1, t0}, {2, t0}}, 4}});
    return out;
}

} // namespace rta::oracle
