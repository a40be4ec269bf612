#include "support/properties.hpp"

#include "rta/sched.hpp"

#include <doctest.h>

using namespace rta;
using namespace rta::testing;

namespace {

constexpr std::uint64_t kCases = 10'000;

void require_clean(const PropertyReport& r)
{
    INFO(r.name << ": " << r.first_failure);
    CHECK(r.cases >= kCases);
    CHECK(r.violations == 0);
}

} // namespace

TEST_CASE("checkers flag broken inputs")
{
    SlotSchedule s;
    s.clear(0);
    s.add_random_access();
    s.add_deterministic({1, 2});
    s.nonrta_rus = 1;
    CHECK_FALSE(conservation_problem(s, 3, 4));
    CHECK(conservation_problem(s, 4, 4));
    CHECK(conservation_problem(s, 3, 2)); // id out of range
    s.add_deterministic({2});
    s.nonrta_rus = 0;
    CHECK(conservation_problem(s, 3, 4)); // duplicate

    SlotOutcome o;
    o.add(RuResultKind::Empty, {});
    CHECK(alignment_problem(s, o));
    const StationId stranger[] = {3};
    o.add(RuResultKind::Success, stranger);
    o.add(RuResultKind::Empty, {});
    CHECK(alignment_problem(s, o));

    const std::vector<StationId> ids{0, 1, 2, 3, 4};
    CHECK_FALSE(partition_problem(ids, 2, partition_into_groups(ids, 2)));
    CHECK(partition_problem(ids, 2, {{0, 1, 2, 3}, {4}}));
    CHECK(partition_problem(ids, 2, {{0, 2, 4}, {1}}));
}

TEST_CASE("random configs are valid")
{
    for (std::uint64_t i = 0; i < 1000; ++i)
        CHECK_NOTHROW(validate_config(random_config(i)));
}

TEST_CASE("RU conservation")
{
    require_clean(check_ru_conservation(1, kCases));
}

TEST_CASE("schedule/outcome index alignment")
{
    require_clean(check_outcome_alignment(2, kCases));
}

TEST_CASE("GRA partition size bounds")
{
    require_clean(check_gra_partition_bounds(3, kCases));
}

TEST_CASE("OBO counter bounds")
{
    require_clean(check_obo_counter_bounds(4, kCases));
}

TEST_CASE("single-frame buffer")
{
    require_clean(check_single_frame_buffer(5, kCases));
}
