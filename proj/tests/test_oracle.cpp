#include "oracle/enumerate.hpp"

#include "rta/engine.hpp"

#include <doctest.h>

#include <cmath>

using namespace rta;
using namespace rta::oracle;

namespace {

Scenario twelve_stations(SchedulerKind kind)
{
    Scenario sc;
    sc.config.n_stations = 12;
    sc.config.f_max = 5;
    sc.config.f_ra = 1;
    sc.config.ocw_min = sc.config.ocw_max = 1;
    sc.config.scheduler_kind = kind;
    sc.config.shuffle = ShufflePolicy::Identity;
    sc.arrivals = {{0, Nanos{0}}, {1, Nanos{0}}, {10, Nanos{0}}, {11, Nanos{0}}};
    sc.horizon = 5;
    return sc;
}

} // namespace

TEST_CASE("permutation indexing")
{
    CHECK(factorial(0) == 1);
    CHECK(factorial(4) == 24);
    CHECK(nth_permutation(3, 0) == std::vector<StationId>{0, 1, 2});
    CHECK(nth_permutation(3, 5) == std::vector<StationId>{2, 1, 0});
    CHECK(nth_permutation(3, 3) == std::vector<StationId>{1, 2, 0});
    CHECK(nth_permutation(0, 0).empty());
}

TEST_CASE("reference model agrees with the engine on the deterministic examples")
{
    for (auto kind : {SchedulerKind::Cra, SchedulerKind::Gra}) {
        for (auto rules : {ChannelRules::Be, ChannelRules::Ax}) {
            if (kind == SchedulerKind::Gra && rules == ChannelRules::Ax)
                continue;
            Scenario sc = twelve_stations(kind);
            sc.config.channel_rules = rules;
            FirstChoice only;
            const auto ref = simulate(sc, only);

            SimConfig c = sc.config;
            c.warmup_slots = 0;
            c.stop_rule = StopRule::SlotCount;
            ArrivalScript script(12);
            for (const auto& [id, at] : sc.arrivals)
                script.add(id, at);
            Engine e(c, script);
            std::vector<std::string> lines;
            e.set_trace_sink([&](const SlotSchedule& s, const SlotOutcome& o) {
                lines.push_back(format_trace_line(s, o));
            });
            for (int k = 0; k < 5; ++k)
                e.step();
            CHECK(ref.trace == lines);
        }
    }
}

TEST_CASE("enumeration is a probability distribution")
{
    for (const auto& [name, sc] : small_scenarios()) {
        INFO(name);
        const auto d = enumerate(sc);
        CHECK(d.paths > 1);
        CHECK(d.total_probability == doctest::Approx(1.0).epsilon(1e-12));
        for (double p : d.p_delivered)
            CHECK((p >= 0.0 && p <= 1.0 + 1e-12));
    }
}

TEST_CASE("two RA transmitters in one RU: exact collision probability")
{
    // windows of one: both always send in the first slot and pick one of f RUs
    for (std::uint32_t f : {1u, 2u, 4u}) {
        Scenario sc;
        sc.config.scheduler_kind = SchedulerKind::UoraStatic;
        sc.config.n_stations = 2;
        sc.config.f_ra = f;
        sc.config.f_max = 4;
        sc.config.ocw_min = sc.config.ocw_max = 1;
        sc.arrivals = {{0, Nanos{0}}, {1, Nanos{0}}};
        sc.horizon = 1;
        CHECK(enumerate(sc).p_collision[0] == doctest::Approx(1.0 / f));
    }
}

TEST_CASE("engine Monte Carlo matches enumeration (reduced run count)")
{
    const std::uint64_t runs = 30'000;
    for (const auto& [name, sc] : small_scenarios()) {
        const auto exact = enumerate(sc);
        const auto sampled = monte_carlo(sc, runs, 1'000'000);
        const auto cmp = compare(exact, sampled, runs, 4.0);
        INFO(name << ": " << cmp.detail);
        CHECK(cmp.mismatches == 0);
    }
}
