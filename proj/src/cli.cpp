#include "rta/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace rta {

namespace {

constexpr std::uint64_t kDefaultPacketsPerPoint = 10'000'000;

// Writes to two streams at once (sweep CSV to file and stdout).
class TeeBuf : public std::streambuf {
public:
    TeeBuf(std::streambuf* a, std::streambuf* b) : a_(a), b_(b) {}

protected:
    int overflow(int ch) override
    {
        if (ch == traits_type::eof())
            return traits_type::not_eof(ch);
        const auto c = traits_type::to_char_type(ch);
        if (a_->sputc(c) == traits_type::eof() || b_->sputc(c) == traits_type::eof())
            return traits_type::eof();
        return ch;
    }
    std::streamsize xsputn(const char* s, std::streamsize n) override
    {
        const auto x = a_->sputn(s, n);
        const auto y = b_->sputn(s, n);
        return std::min(x, y);
    }
    int sync() override { return (a_->pubsync() == 0 && b_->pubsync() == 0) ? 0 : -1; }

private:
    std::streambuf* a_;
    std::streambuf* b_;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError(fmt::format("cannot read '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double parse_double(std::string_view text)
{
    std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v))
        throw UsageError(fmt::format("not a number: '{}'", text));
    return v;
}

std::uint32_t as_count(double v, std::string_view what)
{
    if (v < 0 || v != std::floor(v) || v > 4294967295.0)
        throw UsageError(fmt::format("{} must be a non-negative integer, got {}", what, v));
    return static_cast<std::uint32_t>(v);
}

std::string fmt_real(double v)
{
    return fmt::format("{:.12g}", v);
}

} // namespace

std::string_view to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Stations: return "stations";
    case SweepAxis::ArrivalRate: return "arrival-rate";
    case SweepAxis::FRa: return "f-ra";
    }
    return "?";
}

std::vector<double> parse_value_list(std::string_view text)
{
    std::vector<double> out;
    if (text.empty())
        throw UsageError("empty value list");
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (true) {
            const auto colon = text.find(':', pos);
            parts.push_back(parse_double(text.substr(pos, colon - pos)));
            if (colon == std::string_view::npos)
                break;
            pos = colon + 1;
        }
        if (parts.size() != 3)
            throw UsageError(fmt::format("range '{}' must be start:stop:step", text));
        const double start = parts[0], stop = parts[1], step = parts[2];
        if (!(step > 0) || stop < start)
            throw UsageError(fmt::format("range '{}' needs step > 0 and stop >= start", text));
        // index-based so accumulated rounding never drops the endpoint
        const auto n = static_cast<std::uint64_t>(std::floor((stop - start) / step + 1e-9));
        for (std::uint64_t i = 0; i <= n; ++i)
            out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        out.push_back(parse_double(text.substr(pos, comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

SimConfig point_config(const SweepSpec& spec, double v)
{
    SimConfig c = spec.base;
    switch (spec.axis) {
    case SweepAxis::Stations: c.n_stations = as_count(v, "stations"); break;
    case SweepAxis::ArrivalRate: c.arrival_rate = v; break;
    case SweepAxis::FRa: c.f_ra = as_count(v, "f-ra"); break;
    }
    if (c.stop_rule == StopRule::PacketCount && spec.packets_per_point > 0) {
        const std::uint64_t reps = std::max<std::uint32_t>(spec.replications, 1);
        c.stop_value = (spec.packets_per_point + reps - 1) / reps;
    }
    return c;
}

Invocation parse_invocation(const std::vector<std::string>& args)
{
    struct Flags {
        std::string config_file, scheduler, rules, stations, lambda, f_ra, shuffle, traffic;
        std::optional<std::uint32_t> f_max, ocw_min, ocw_max, reps;
        std::optional<double> slot_us, deadline_us;
        std::optional<std::uint64_t> seed, warmup, packets, slots, horizon;
        std::optional<unsigned> jobs;
        std::string out_dir, name, arrivals;
    } f;

    CLI::App app{"Uplink OFDMA real-time access simulator"};
    app.require_subcommand(1, 1);
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV/JSON");
    auto* trace = app.add_subcommand("trace", "print the per-slot RU trace of a scripted run");

    for (auto* sub : {sweep, trace}) {
        sub->add_option("--config", f.config_file, "flat key=value config file");
        sub->add_option("--scheduler", f.scheduler, "uora | cra | gra");
        sub->add_option("--rules", f.rules, "channel rules: ax | be");
        sub->add_option("--stations", f.stations, "station count, list or start:stop:step");
        sub->add_option("--lambda", f.lambda, "arrival rate per station (1/s), list or range");
        sub->add_option("--f-ra", f.f_ra, "RA RUs per slot, list or range");
        sub->add_option("--f-max", f.f_max, "RU budget per slot");
        sub->add_option("--slot-us", f.slot_us, "slot duration (us)");
        sub->add_option("--deadline-us", f.deadline_us, "delay budget (us)");
        sub->add_option("--ocw-min", f.ocw_min);
        sub->add_option("--ocw-max", f.ocw_max);
        sub->add_option("--seed", f.seed, "seed (base seed for sweeps)");
        sub->add_option("--warmup", f.warmup, "slots excluded from metrics");
        sub->add_option("--shuffle", f.shuffle, "random | identity");
        sub->add_option("--traffic", f.traffic, "poisson | saturated");
    }
    sweep->add_option("--reps", f.reps, "replications per point");
    sweep->add_option("--packets", f.packets, "delivered frames per point (all replications)");
    sweep->add_option("--slots", f.slots, "simulate this many slots per replication instead");
    sweep->add_option("--jobs", f.jobs, "worker threads");
    sweep->add_option("--out-dir", f.out_dir, "output directory (env RTASIM_OUTPUT_DIR)");
    sweep->add_option("--name", f.name, "output file stem");
    trace->add_option("--arrivals", f.arrivals, "scripted arrivals file")->required();
    trace->add_option("--horizon", f.horizon, "slots to trace");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    Invocation inv;
    inv.command = trace->parsed() ? Invocation::Command::Trace : Invocation::Command::Sweep;

    SimConfig c;
    bool file_ocw_min = false, file_ocw_max = false, file_stop = false;
    if (!f.config_file.empty()) {
        try {
            for (const auto& [key, value] : parse_config_entries(read_file(f.config_file))) {
                apply_config_key(c, key, value);
                file_ocw_min = file_ocw_min || key == "ocw-min";
                file_ocw_max = file_ocw_max || key == "ocw-max";
                file_stop = file_stop || key == "stop-value";
            }
        } catch (const std::invalid_argument& e) {
            throw UsageError(fmt::format("{}: {}", f.config_file, e.what()));
        }
    }

    try {
        if (!f.scheduler.empty()) c.scheduler_kind = parse_scheduler_kind(f.scheduler);
        if (!f.rules.empty()) c.channel_rules = parse_channel_rules(f.rules);
        if (!f.shuffle.empty()) c.shuffle = parse_shuffle_policy(f.shuffle);
        if (!f.traffic.empty()) c.traffic = parse_traffic_model(f.traffic);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (f.f_max) c.f_max = *f.f_max;
    if (f.slot_us) c.slot_duration = *f.slot_us * 1e-6;
    if (f.deadline_us) c.deadline = *f.deadline_us * 1e-6;
    if (f.seed) c.seed = *f.seed;
    if (f.warmup) c.warmup_slots = *f.warmup;

    // the 1/1 window is meant for the polling schedulers; plain UORA falls back to
    // the 802.11ax default range
    const bool uora = c.scheduler_kind == SchedulerKind::UoraStatic;
    if (f.ocw_min) c.ocw_min = *f.ocw_min;
    else if (!file_ocw_min) c.ocw_min = uora ? 8 : 1;
    if (f.ocw_max) c.ocw_max = *f.ocw_max;
    else if (!file_ocw_max) c.ocw_max = std::max(uora ? 32u : 1u, c.ocw_min);

    SweepSpec& spec = inv.sweep;
    int multi = 0;
    auto axis_list = [&](const std::string& text, SweepAxis axis) {
        if (text.empty())
            return;
        auto values = parse_value_list(text);
        if (values.size() > 1) {
            ++multi;
            spec.axis = axis;
            spec.values = values;
        } else {
            switch (axis) {
            case SweepAxis::Stations: c.n_stations = as_count(values[0], "stations"); break;
            case SweepAxis::ArrivalRate: c.arrival_rate = values[0]; break;
            case SweepAxis::FRa: c.f_ra = as_count(values[0], "f-ra"); break;
            }
        }
    };
    axis_list(f.stations, SweepAxis::Stations);
    axis_list(f.lambda, SweepAxis::ArrivalRate);
    axis_list(f.f_ra, SweepAxis::FRa);
    if (multi > 1)
        throw UsageError("only one of --stations, --lambda, --f-ra may list several values");
    if (multi == 0) {
        spec.axis = SweepAxis::Stations;
        spec.values = {static_cast<double>(c.n_stations)};
    }

    if (f.packets && f.slots)
        throw UsageError("--packets and --slots are mutually exclusive");
    if (f.reps) {
        if (*f.reps == 0)
            throw UsageError("--reps must be at least 1");
        spec.replications = *f.reps;
    }
    if (f.slots) {
        c.stop_rule = StopRule::SlotCount;
        c.stop_value = *f.slots;
        spec.packets_per_point = 0;
    } else if (f.packets) {
        c.stop_rule = StopRule::PacketCount;
        spec.packets_per_point = *f.packets;
    } else if (file_stop) {
        spec.packets_per_point = 0; // file stop-value is per replication
    } else {
        c.stop_rule = StopRule::PacketCount;
        spec.packets_per_point = kDefaultPacketsPerPoint;
    }
    if (f.jobs)
        spec.jobs = std::max(1u, *f.jobs);
    else
        spec.jobs = std::max(1u, std::thread::hardware_concurrency());
    spec.base = c;

    for (double v : spec.values) {
        try {
            validate_config(point_config(spec, v));
        } catch (const InvalidConfig& e) {
            throw UsageError(e.what());
        }
    }

    inv.out_dir = f.out_dir;
    if (!f.name.empty())
        inv.name = f.name;
    if (inv.command == Invocation::Command::Trace) {
        inv.trace.config = c;
        inv.trace.arrivals_path = f.arrivals;
        if (f.horizon)
            inv.trace.horizon = *f.horizon;
    }
    return inv;
}

std::string csv_header()
{
    return "axis_value,scheduler,rules,f_ra,f_max,lambda,n_stations,delivered,p_late_mean,"
           "p_late_stderr,nonrta_share_mean,nonrta_share_stderr,mean_delay_us,seed_base,"
           "config_digest\n";
}

std::string csv_row(const SweepSpec& spec, const SweepRow& row)
{
    const auto& c = row.config;
    const auto& m = row.merged;
    const std::string mean_delay_us =
        m.totals.delivered_count > 0 ? fmt_real(mean_delay(m.totals) * 1e6) : "nan";
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", fmt_real(row.axis_value),
                       to_string(c.scheduler_kind), to_string(c.channel_rules), c.f_ra, c.f_max,
                       fmt_real(c.arrival_rate), c.n_stations, m.totals.delivered_count,
                       fmt_real(m.p_late_mean), fmt_real(m.p_late_stderr),
                       fmt_real(m.nonrta_share_mean), fmt_real(m.nonrta_share_stderr),
                       mean_delay_us, spec.base.seed, digest_hex(config_digest(c)));
}

nlohmann::json config_to_json(const SimConfig& c)
{
    return {
        {"n-stations", c.n_stations},
        {"arrival-rate", c.arrival_rate},
        {"f-ra", c.f_ra},
        {"f-max", c.f_max},
        {"slot-duration", c.slot_duration},
        {"deadline", c.deadline},
        {"ocw-min", c.ocw_min},
        {"ocw-max", c.ocw_max},
        {"scheduler-kind", to_string(c.scheduler_kind)},
        {"channel-rules", to_string(c.channel_rules)},
        {"stop-rule", to_string(c.stop_rule)},
        {"stop-value", c.stop_value},
        {"seed", c.seed},
        {"warmup-slots", c.warmup_slots},
        {"shuffle", to_string(c.shuffle)},
        {"traffic", to_string(c.traffic)},
    };
}

nlohmann::json report_to_json(const MetricsReport& r)
{
    return {
        {"delivered", r.delivered_count},
        {"late", r.late_count},
        {"slot_count", r.slot_count},
        {"ra_rus", r.ra_rus},
        {"det_rus", r.det_rus},
        {"nonrta_rus", r.nonrta_rus},
        {"collision_slots", r.collision_slots},
        {"collided_rus", r.collided_rus},
        {"delay_sum_ns", r.delay_sum_ns},
        {"histogram_bin_ns", r.slot_duration.count() / 10},
        {"delay_histogram", r.delay_histogram},
        {"config_digest", digest_hex(r.config_digest)},
    };
}

nlohmann::json run_sweep(const SweepSpec& spec, std::ostream& csv)
{
    if (spec.values.empty() || spec.replications == 0)
        throw std::invalid_argument("sweep needs values and at least one replication");

    const std::size_t reps = spec.replications;
    const std::size_t total = spec.values.size() * reps;
    std::vector<std::promise<MetricsReport>> promises(total);
    std::vector<std::future<MetricsReport>> futures;
    futures.reserve(total);
    for (auto& p : promises)
        futures.push_back(p.get_future());

    // point-major job order so rows finish in axis order
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            try {
                SimConfig c = point_config(spec, spec.values[job / reps]);
                c.seed = spec.base.seed + job % reps;
                promises[job].set_value(run(c));
            } catch (...) {
                promises[job].set_exception(std::current_exception());
            }
        }
    };
    const unsigned n_threads =
        static_cast<unsigned>(std::min<std::size_t>(std::max(1u, spec.jobs), total));
    std::vector<std::jthread> threads;
    for (unsigned t = 0; t < n_threads; ++t)
        threads.emplace_back(worker);

    nlohmann::json rows = nlohmann::json::array();
    csv << csv_header() << std::flush;
    for (std::size_t p = 0; p < spec.values.size(); ++p) {
        std::vector<MetricsReport> reports;
        for (std::size_t r = 0; r < reps; ++r)
            reports.push_back(futures[p * reps + r].get());
        SweepRow row;
        row.axis_value = spec.values[p];
        row.config = point_config(spec, row.axis_value);
        row.merged = merge(reports);
        csv << csv_row(spec, row) << std::flush;

        auto j = report_to_json(row.merged.totals);
        j["axis_value"] = row.axis_value;
        j["config"] = config_to_json(row.config);
        j["config_digest"] = digest_hex(config_digest(row.config));
        j["replications"] = row.merged.replications;
        j["p_late_mean"] = row.merged.p_late_mean;
        j["p_late_stderr"] = row.merged.p_late_stderr;
        j["nonrta_share_mean"] = row.merged.nonrta_share_mean;
        j["nonrta_share_stderr"] = row.merged.nonrta_share_stderr;
        j["seeds"] = nlohmann::json::array();
        for (std::size_t r = 0; r < reps; ++r)
            j["seeds"].push_back(spec.base.seed + r);
        rows.push_back(std::move(j));
    }

    return {
        {"axis", to_string(spec.axis)},
        {"values", spec.values},
        {"replications", spec.replications},
        {"seed_base", spec.base.seed},
        {"packets_per_point", spec.packets_per_point},
        {"base_config", config_to_json(spec.base)},
        {"rows", std::move(rows)},
    };
}

ArrivalScript parse_arrival_script(std::string_view text, std::uint32_t n_stations)
{
    ArrivalScript script(n_stations);
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string line(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        std::erase_if(line, [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; });
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw UsageError(fmt::format("arrivals line {}: expected station_id,time_us", line_no));
        double id = 0, t_us = 0;
        try {
            id = parse_double(std::string_view(line).substr(0, comma));
            t_us = parse_double(std::string_view(line).substr(comma + 1));
        } catch (const UsageError& e) {
            throw UsageError(fmt::format("arrivals line {}: {}", line_no, e.what()));
        }
        if (id < 0 || id != std::floor(id) || id >= n_stations)
            throw UsageError(fmt::format("arrivals line {}: station {} outside 0..{}", line_no,
                                         id, n_stations == 0 ? 0 : n_stations - 1));
        if (t_us < 0)
            throw UsageError(fmt::format("arrivals line {}: negative time", line_no));
        script.add(static_cast<StationId>(id), Nanos{std::llround(t_us * 1e3)});
    }
    return script;
}

std::vector<std::string> dump_trace(const SimConfig& config, const ArrivalScript& script,
                                    std::uint64_t horizon)
{
    Engine engine(config, script);
    std::vector<std::string> lines;
    engine.set_trace_sink([&](const SlotSchedule& s, const SlotOutcome& o) {
        lines.push_back(format_trace_line(s, o));
    });
    for (std::uint64_t k = 0; k < horizon; ++k)
        engine.step();
    return lines;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Invocation inv;
    try {
        inv = parse_invocation(args);
    } catch (const UsageError& e) {
        const std::string msg = e.what();
        // help text is a usage "error" only in name
        const bool help = std::find(args.begin(), args.end(), "--help") != args.end() ||
                          std::find(args.begin(), args.end(), "-h") != args.end();
        (help ? out : err) << msg << (msg.ends_with('\n') ? "" : "\n");
        return help ? 0 : 2;
    }

    try {
        if (inv.command == Invocation::Command::Trace) {
            ArrivalScript script =
                parse_arrival_script(read_file(inv.trace.arrivals_path), inv.trace.config.n_stations);
            for (const auto& line : dump_trace(inv.trace.config, script, inv.trace.horizon))
                out << line << '\n';
            return 0;
        }

        std::string dir = inv.out_dir;
        if (dir.empty()) {
            const char* env = std::getenv("RTASIM_OUTPUT_DIR");
            dir = env && *env ? env : ".";
        }
        std::filesystem::create_directories(dir);
        const auto csv_path = std::filesystem::path(dir) / (inv.name + ".csv");
        const auto json_path = std::filesystem::path(dir) / (inv.name + ".json");

        std::ofstream csv_file(csv_path, std::ios::binary);
        if (!csv_file)
            throw std::runtime_error(fmt::format("cannot write '{}'", csv_path.string()));
        TeeBuf tee(csv_file.rdbuf(), out.rdbuf());
        std::ostream csv(&tee);
        for (const auto& w : config_warnings(inv.sweep.base))
            err << "warning: " << w << '\n';

        auto summary = run_sweep(inv.sweep, csv);
        summary["csv"] = csv_path.string();
        std::ofstream json_file(json_path, std::ios::binary);
        json_file << summary.dump(2) << '\n';
        if (!json_file)
            throw std::runtime_error(fmt::format("cannot write '{}'", json_path.string()));
        return 0;
    } catch (const UsageError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace rta
