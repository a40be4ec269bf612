#pragma once

#include "rta/model.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace rta {

class NoSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Accumulated results of one replication (or a merge of several).
struct MetricsReport {
    /// Delay histogram covers [0, 16 slots) with bins of a tenth of a slot; the
    /// last entry is the overflow bin.
    static constexpr std::size_t kBins = 160;

    std::uint64_t delivered_count = 0;
    std::uint64_t late_count = 0;
    std::array<std::uint64_t, kBins + 1> delay_histogram{};
    std::uint64_t delay_sum_ns = 0;

    std::uint64_t slot_count = 0;
    std::uint64_t ra_rus = 0;
    std::uint64_t det_rus = 0;
    std::uint64_t nonrta_rus = 0;
    std::uint64_t collision_slots = 0; // slots with at least one collided RU
    std::uint64_t collided_rus = 0;

    std::uint32_t f_max = 0;
    Nanos slot_duration{0};
    Nanos deadline{0};
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;

    bool operator==(const MetricsReport&) const = default;
};

MetricsReport make_report(const SimConfig& config);

/// Late means strictly more than `deadline` between generation and delivery.
void record_delivery(MetricsReport& report, Nanos generated_at, Nanos delivered_at, Nanos deadline);

void record_slot(MetricsReport& report, const SlotSchedule& schedule, const SlotOutcome& outcome);

double p_late(const MetricsReport& report);
double nonrta_share(const MetricsReport& report);
double collision_rate(const MetricsReport& report); // collision_slots / slot_count
double mean_delay(const MetricsReport& report);     // seconds

/// Adds the counters of `other` into `into`. Both must share a config digest.
void accumulate(MetricsReport& into, const MetricsReport& other);

struct MergedReport {
    MetricsReport totals;
    std::size_t replications = 0;
    // across-replication mean and standard error of the mean; the error is NaN
    // for a single replication
    double p_late_mean = 0.0;
    double p_late_stderr = 0.0;
    double nonrta_share_mean = 0.0;
    double nonrta_share_stderr = 0.0;
};

MergedReport merge(std::span<const MetricsReport> reports);

} // namespace rta
