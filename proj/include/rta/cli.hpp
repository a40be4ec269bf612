#pragma once

#include "rta/engine.hpp"
#include "rta/metrics.hpp"
#include "rta/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rta {

/// Bad command line, config file or arrival script. The CLI exits with 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { Stations, ArrivalRate, FRa };

std::string_view to_string(SweepAxis axis);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Stations;
    std::vector<double> values;
    std::uint32_t replications = 10;
    SimConfig base;
    /// Packet-count runs: delivered frames wanted per sweep point, split evenly
    /// over the replications. Slot-count runs use base.stop_value per replication.
    std::uint64_t packets_per_point = 10'000'000;
    unsigned jobs = 1;
};

struct TraceRequest {
    SimConfig config;
    std::string arrivals_path;
    std::uint64_t horizon = 5;
};

struct Invocation {
    enum class Command { Sweep, Trace };

    Command command = Command::Sweep;
    SweepSpec sweep;
    TraceRequest trace;
    std::string out_dir; // empty: current directory
    std::string name = "sweep";
};

/// Parses `args` (without the program name): a subcommand, `sweep` or `trace`,
/// then flags. A `--config` file is applied first and flags override it. Every
/// resulting config is validated. Throws UsageError.
Invocation parse_invocation(const std::vector<std::string>& args);

/// `a:b:c` (inclusive range with step), `a,b,c`, or a single number.
std::vector<double> parse_value_list(std::string_view text);

/// Config for one sweep point (axis value applied, stop value resolved).
SimConfig point_config(const SweepSpec& spec, double axis_value);

struct SweepRow {
    double axis_value = 0.0;
    SimConfig config; // point config, seed = seed base
    MergedReport merged;
};

std::string csv_header();
std::string csv_row(const SweepSpec& spec, const SweepRow& row);

nlohmann::json config_to_json(const SimConfig& config);
nlohmann::json report_to_json(const MetricsReport& report);

/// Runs every axis value x replication (replication r uses seed base + r) and
/// writes the CSV header and then one row per axis value, in axis order, to
/// `csv` as soon as the row is complete. Returns the JSON summary.
nlohmann::json run_sweep(const SweepSpec& spec, std::ostream& csv);

/// `station_id,time_us` per line; `#` starts a comment.
ArrivalScript parse_arrival_script(std::string_view text, std::uint32_t n_stations);

/// Per-slot trace lines for the first `horizon` slots.
std::vector<std::string> dump_trace(const SimConfig& config, const ArrivalScript& script,
                                    std::uint64_t horizon);

/// Entry point behind the `rtasim` binary. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rta
