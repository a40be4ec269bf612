#include "rta/obo.hpp"

#include <doctest.h>

#include <array>
#include <set>
#include <stdexcept>

using namespace rta;

TEST_CASE("window of one always draws zero")
{
    RngStream rng(1);
    for (int i = 0; i < 100; ++i) {
        OboState s{1, std::nullopt};
        init_counter(s, rng);
        CHECK(s.counter == 0u);
    }
}

TEST_CASE("window of two draws 0 or 1")
{
    RngStream rng(2);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 200; ++i) {
        OboState s{2, std::nullopt};
        init_counter(s, rng);
        REQUIRE(s.counter);
        CHECK(*s.counter <= 1u);
        seen.insert(*s.counter);
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("counter is uniform over [0, 7] for a window of 8 (chi-square)")
{
    RngStream rng(3, 9, StreamPurpose::OboInit);
    const int n = 100'000;
    std::array<int, 8> hist{};
    for (int i = 0; i < n; ++i) {
        OboState s{8, std::nullopt};
        init_counter(s, rng);
        ++hist.at(*s.counter);
    }
    const double expected = n / 8.0;
    double chi2 = 0;
    for (int h : hist)
        chi2 += (h - expected) * (h - expected) / expected;
    // 7 degrees of freedom, alpha = 0.01
    CHECK(chi2 < 18.475);
}

TEST_CASE("trigger: transmit below the RA RU count, else decrement")
{
    RngStream rng(4);
    std::set<std::uint32_t> rus;
    for (int i = 0; i < 300; ++i) {
        OboState s{1, 0u};
        const auto d = on_trigger(s, 3, rng);
        REQUIRE(d.transmit);
        CHECK(d.ru_index < 3u);
        rus.insert(d.ru_index);
    }
    CHECK(rus.size() == 3);

    OboState s{8, 5u};
    auto d = on_trigger(s, 3, rng);
    CHECK_FALSE(d.transmit);
    CHECK(s.counter == 2u);

    OboState idle{8, 2u};
    d = on_trigger(idle, 0, rng);
    CHECK_FALSE(d.transmit);
    CHECK(idle.counter == 2u);

    OboState unset{8, std::nullopt};
    CHECK_THROWS_AS(on_trigger(unset, 1, rng), std::logic_error);
}

TEST_CASE("result: double on collision up to the cap, reset on success")
{
    RngStream rng(5);
    OboState s{4, 0u};
    on_result(s, TxResult::Collision, 1, 32, rng);
    CHECK(s.ocw == 8u);
    REQUIRE(s.counter);
    CHECK(*s.counter < 8u);

    s.ocw = 32;
    on_result(s, TxResult::Collision, 1, 32, rng);
    CHECK(s.ocw == 32u);

    s.ocw = 16;
    on_result(s, TxResult::Success, 1, 32, rng);
    CHECK(s.ocw == 1u);
    CHECK_FALSE(s.counter);
}

TEST_CASE("counter decreases strictly while deferring and never goes negative")
{
    RngStream rng(6);
    OboState s{64, std::nullopt};
    init_counter(s, rng);
    std::uint32_t prev = *s.counter;
    int slots = 0;
    while (true) {
        const auto d = on_trigger(s, 2, rng);
        ++slots;
        if (d.transmit)
            break;
        CHECK(*s.counter < prev);
        prev = *s.counter;
    }
    CHECK(slots <= 32);
}
