#include "rta/metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <vector>

namespace rta {

MetricsReport make_report(const SimConfig& config)
{
    MetricsReport r;
    r.f_max = config.f_max;
    r.slot_duration = from_seconds(config.slot_duration);
    r.deadline = from_seconds(config.deadline);
    r.seed = config.seed;
    r.config_digest = config_digest(config);
    return r;
}

void record_delivery(MetricsReport& r, Nanos generated_at, Nanos delivered_at, Nanos deadline)
{
    const Nanos delay = delivered_at - generated_at;
    ++r.delivered_count;
    if (delay > deadline)
        ++r.late_count;
    r.delay_sum_ns += static_cast<std::uint64_t>(delay.count());

    std::size_t bin = MetricsReport::kBins;
    if (r.slot_duration.count() > 0) {
        const auto scaled = delay.count() * 10 / r.slot_duration.count();
        if (scaled >= 0 && scaled < static_cast<std::int64_t>(MetricsReport::kBins))
            bin = static_cast<std::size_t>(scaled);
    }
    ++r.delay_histogram[bin];
}

void record_slot(MetricsReport& r, const SlotSchedule& schedule, const SlotOutcome& outcome)
{
    ++r.slot_count;
    r.ra_rus += schedule.ra_count();
    r.det_rus += schedule.det_count();
    r.nonrta_rus += schedule.nonrta_rus;
    if (outcome.any_collision()) {
        ++r.collision_slots;
        r.collided_rus += outcome.collision_count();
    }
}

double p_late(const MetricsReport& r)
{
    if (r.delivered_count == 0)
        throw NoSamples("p_late: no delivered frames");
    return static_cast<double>(r.late_count) / static_cast<double>(r.delivered_count);
}

double nonrta_share(const MetricsReport& r)
{
    if (r.slot_count == 0)
        throw NoSamples("nonrta_share: no slots recorded");
    return static_cast<double>(r.nonrta_rus) /
           (static_cast<double>(r.slot_count) * static_cast<double>(r.f_max));
}

double collision_rate(const MetricsReport& r)
{
    if (r.slot_count == 0)
        throw NoSamples("collision_rate: no slots recorded");
    return static_cast<double>(r.collision_slots) / static_cast<double>(r.slot_count);
}

double mean_delay(const MetricsReport& r)
{
    if (r.delivered_count == 0)
        throw NoSamples("mean_delay: no delivered frames");
    return static_cast<double>(r.delay_sum_ns) / static_cast<double>(r.delivered_count) * 1e-9;
}

void accumulate(MetricsReport& into, const MetricsReport& other)
{
    if (into.config_digest != other.config_digest)
        throw ConfigMismatch(fmt::format("cannot merge reports of configs {} and {}",
                                         digest_hex(into.config_digest),
                                         digest_hex(other.config_digest)));
    into.delivered_count += other.delivered_count;
    into.late_count += other.late_count;
    for (std::size_t i = 0; i < into.delay_histogram.size(); ++i)
        into.delay_histogram[i] += other.delay_histogram[i];
    into.delay_sum_ns += other.delay_sum_ns;
    into.slot_count += other.slot_count;
    into.ra_rus += other.ra_rus;
    into.det_rus += other.det_rus;
    into.nonrta_rus += other.nonrta_rus;
    into.collision_slots += other.collision_slots;
    into.collided_rus += other.collided_rus;
}

namespace {

// long double sums keep the mean of identical doubles exact
std::pair<double, double> mean_and_stderr(const std::vector<double>& xs)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (xs.empty())
        return {nan, nan};
    long double sum = 0;
    for (double x : xs)
        sum += x;
    const long double mean = sum / static_cast<long double>(xs.size());
    if (xs.size() < 2)
        return {static_cast<double>(mean), nan};
    long double ss = 0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    const long double var = ss / static_cast<long double>(xs.size() - 1);
    return {static_cast<double>(mean),
            static_cast<double>(std::sqrt(var / static_cast<long double>(xs.size())))};
}

} // namespace

MergedReport merge(std::span<const MetricsReport> reports)
{
    if (reports.empty())
        throw std::invalid_argument("merge: no reports");
    MergedReport m;
    m.totals = reports.front();
    for (std::size_t i = 1; i < reports.size(); ++i)
        accumulate(m.totals, reports[i]);
    m.replications = reports.size();

    std::vector<double> late, share;
    for (const auto& r : reports) {
        if (r.delivered_count > 0)
            late.push_back(p_late(r));
        if (r.slot_count > 0)
            share.push_back(nonrta_share(r));
    }
    std::tie(m.p_late_mean, m.p_late_stderr) = mean_and_stderr(late);
    std::tie(m.nonrta_share_mean, m.nonrta_share_stderr) = mean_and_stderr(share);
    return m;
}

} // namespace rta
