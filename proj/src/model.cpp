#include "rta/model.hpp"

#include <fmt/format.h>

#include <cmath>
#include <charconv>

namespace rta {

Nanos from_seconds(double seconds)
{
    return Nanos{std::llround(seconds * 1e9)};
}

double to_seconds(Nanos t)
{
    return static_cast<double>(t.count()) * 1e-9;
}

std::string_view to_string(SchedulerKind k)
{
    switch (k) {
    case SchedulerKind::UoraStatic: return "uora";
    case SchedulerKind::Cra: return "cra";
    case SchedulerKind::Gra: return "gra";
    }
    return "?";
}

std::string_view to_string(ChannelRules r)
{
    return r == ChannelRules::Ax ? "ax" : "be";
}

std::string_view to_string(StopRule s)
{
    return s == StopRule::PacketCount ? "packet-count" : "slot-count";
}

std::string_view to_string(ShufflePolicy s)
{
    return s == ShufflePolicy::Random ? "random" : "identity";
}

std::string_view to_string(TrafficModel t)
{
    return t == TrafficModel::Poisson ? "poisson" : "saturated";
}

std::string_view to_string(RuResultKind k)
{
    switch (k) {
    case RuResultKind::Empty: return "empty";
    case RuResultKind::Success: return "success";
    case RuResultKind::Collision: return "collision";
    case RuResultKind::PaddingBusy: return "padding";
    }
    return "?";
}

SchedulerKind parse_scheduler_kind(std::string_view s)
{
    if (s == "uora" || s == "uora-static") return SchedulerKind::UoraStatic;
    if (s == "cra") return SchedulerKind::Cra;
    if (s == "gra") return SchedulerKind::Gra;
    throw std::invalid_argument(fmt::format("unknown scheduler '{}'", s));
}

ChannelRules parse_channel_rules(std::string_view s)
{
    if (s == "ax") return ChannelRules::Ax;
    if (s == "be") return ChannelRules::Be;
    throw std::invalid_argument(fmt::format("unknown channel rules '{}'", s));
}

StopRule parse_stop_rule(std::string_view s)
{
    if (s == "packet-count") return StopRule::PacketCount;
    if (s == "slot-count") return StopRule::SlotCount;
    throw std::invalid_argument(fmt::format("unknown stop rule '{}'", s));
}

ShufflePolicy parse_shuffle_policy(std::string_view s)
{
    if (s == "random") return ShufflePolicy::Random;
    if (s == "identity") return ShufflePolicy::Identity;
    throw std::invalid_argument(fmt::format("unknown shuffle policy '{}'", s));
}

TrafficModel parse_traffic_model(std::string_view s)
{
    if (s == "poisson") return TrafficModel::Poisson;
    if (s == "saturated") return TrafficModel::Saturated;
    throw std::invalid_argument(fmt::format("unknown traffic model '{}'", s));
}

namespace {

std::string join(const std::vector<std::string>& items)
{
    std::string out = "invalid config:";
    for (const auto& s : items) {
        out += ' ';
        out += s;
        out += ';';
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value)
{
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw std::invalid_argument(fmt::format("bad value '{}' for key '{}'", value, key));
    return out;
}

// from_chars for double is missing from libstdc++ 11 on some targets
double parse_real(std::string_view key, std::string_view value)
{
    std::string s(value);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw std::invalid_argument(fmt::format("bad value '{}' for key '{}'", value, key));
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

bool reaches_by_doubling(std::uint32_t from, std::uint32_t to)
{
    std::uint64_t w = from;
    while (w < to)
        w *= 2;
    return w == to;
}

} // namespace

InvalidConfig::InvalidConfig(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations))
{
}

const SimConfig& validate_config(const SimConfig& c)
{
    std::vector<std::string> v;
    if (c.f_max < 1)
        v.emplace_back("f_max must be at least 1");
    if (c.f_ra < 1 || c.f_ra > c.f_max)
        v.push_back(fmt::format("f_ra out of range: {} not in [1, {}]", c.f_ra, c.f_max));
    if (!(c.arrival_rate > 0.0) || !std::isfinite(c.arrival_rate))
        v.emplace_back("arrival_rate must be positive");
    if (!(c.slot_duration > 0.0) || from_seconds(c.slot_duration).count() <= 0)
        v.emplace_back("slot_duration must be positive");
    if (!(c.deadline > 0.0))
        v.emplace_back("deadline must be positive");
    if (c.ocw_min < 1)
        v.emplace_back("ocw_min must be at least 1");
    if (c.ocw_max < c.ocw_min)
        v.emplace_back("ocw_max must not be below ocw_min");
    if (c.stop_value == 0)
        v.emplace_back("stop_value must be positive");
    if (c.scheduler_kind == SchedulerKind::Gra && c.channel_rules == ChannelRules::Ax)
        v.emplace_back("gra requires the modified (be) channel rules: under ax every shared RU "
                       "with two or more members collides");
    if (c.scheduler_kind == SchedulerKind::Gra && c.f_ra >= c.f_max)
        v.emplace_back("gra needs f_ra < f_max so the resolve phase has group RUs");
    if (c.scheduler_kind == SchedulerKind::UoraStatic && c.f_ra == 1 && c.ocw_max == 1 &&
        c.n_stations >= 2 && c.stop_rule == StopRule::PacketCount)
        v.emplace_back("uora with one RA RU and ocw_max = 1 livelocks once two stations are "
                       "backlogged; the packet-count stop rule would never be met");
    if (!v.empty())
        throw InvalidConfig(std::move(v));
    return c;
}

std::vector<std::string> config_warnings(const SimConfig& c)
{
    std::vector<std::string> w;
    if (c.ocw_min >= 1 && c.ocw_max >= c.ocw_min && !reaches_by_doubling(c.ocw_min, c.ocw_max))
        w.push_back(fmt::format("ocw_max {} is not reached by doubling ocw_min {}; the window "
                                "will be clamped",
                                c.ocw_max, c.ocw_min));
    if (c.scheduler_kind == SchedulerKind::UoraStatic && c.f_ra == 1 && c.ocw_max == 1 &&
        c.n_stations >= 2)
        w.emplace_back("uora with one RA RU and ocw_max = 1 livelocks under contention");
    return w;
}

void apply_config_key(SimConfig& c, std::string_view key, std::string_view value)
{
    if (key == "n-stations") c.n_stations = parse_number<std::uint32_t>(key, value);
    else if (key == "arrival-rate") c.arrival_rate = parse_real(key, value);
    else if (key == "f-ra") c.f_ra = parse_number<std::uint32_t>(key, value);
    else if (key == "f-max") c.f_max = parse_number<std::uint32_t>(key, value);
    else if (key == "slot-duration") c.slot_duration = parse_real(key, value);
    else if (key == "deadline") c.deadline = parse_real(key, value);
    else if (key == "ocw-min") c.ocw_min = parse_number<std::uint32_t>(key, value);
    else if (key == "ocw-max") c.ocw_max = parse_number<std::uint32_t>(key, value);
    else if (key == "scheduler-kind") c.scheduler_kind = parse_scheduler_kind(value);
    else if (key == "channel-rules") c.channel_rules = parse_channel_rules(value);
    else if (key == "stop-rule") c.stop_rule = parse_stop_rule(value);
    else if (key == "stop-value") c.stop_value = parse_number<std::uint64_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "warmup-slots") c.warmup_slots = parse_number<std::uint64_t>(key, value);
    else if (key == "shuffle") c.shuffle = parse_shuffle_policy(value);
    else if (key == "traffic") c.traffic = parse_traffic_model(value);
    else throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
}

std::vector<std::pair<std::string, std::string>> parse_config_entries(std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> entries;
    std::size_t line_no = 0;
    while (!text.empty()) {
        auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(fmt::format("line {}: expected key=value", line_no));
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return entries;
}

SimConfig parse_config_text(std::string_view text, SimConfig base)
{
    for (const auto& [key, value] : parse_config_entries(text))
        apply_config_key(base, key, value);
    return base;
}

std::string format_config_text(const SimConfig& c)
{
    return fmt::format("n-stations={}\narrival-rate={:.17g}\nf-ra={}\nf-max={}\n"
                       "slot-duration={:.17g}\ndeadline={:.17g}\nocw-min={}\nocw-max={}\n"
                       "scheduler-kind={}\nchannel-rules={}\nstop-rule={}\nstop-value={}\n"
                       "seed={}\nwarmup-slots={}\nshuffle={}\ntraffic={}\n",
                       c.n_stations, c.arrival_rate, c.f_ra, c.f_max, c.slot_duration,
                       c.deadline, c.ocw_min, c.ocw_max, to_string(c.scheduler_kind),
                       to_string(c.channel_rules), to_string(c.stop_rule), c.stop_value, c.seed,
                       c.warmup_slots, to_string(c.shuffle), to_string(c.traffic));
}

std::uint64_t config_digest(const SimConfig& config)
{
    SimConfig c = config;
    c.seed = 0;
    const std::string text = format_config_text(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest_hex(std::uint64_t digest)
{
    return fmt::format("{:016x}", digest);
}

void SlotSchedule::clear(std::uint64_t slot)
{
    slot_index = slot;
    nonrta_rus = 0;
    assignments_.clear();
    members_.clear();
    ra_count_ = 0;
}

void SlotSchedule::add_random_access()
{
    assignments_.push_back({RuKind::RandomAccess, static_cast<std::uint32_t>(members_.size()), 0});
    ++ra_count_;
}

void SlotSchedule::add_deterministic(std::span<const StationId> stations)
{
    if (stations.empty())
        throw std::logic_error("deterministic RU needs at least one station");
    assignments_.push_back({RuKind::Deterministic, static_cast<std::uint32_t>(members_.size()),
                            static_cast<std::uint32_t>(stations.size())});
    members_.insert(members_.end(), stations.begin(), stations.end());
}

void SlotSchedule::add_deterministic(std::initializer_list<StationId> stations)
{
    add_deterministic(std::span<const StationId>(stations.begin(), stations.size()));
}

std::span<const StationId> SlotSchedule::stations(std::size_t i) const
{
    const auto& a = assignments_.at(i);
    return std::span<const StationId>(members_).subspan(a.first, a.count);
}

void SlotOutcome::clear()
{
    results_.clear();
    transmitters_.clear();
    collisions_ = 0;
}

void SlotOutcome::add(RuResultKind kind, std::span<const StationId> transmitters, bool more_data)
{
    results_.push_back({kind, more_data, static_cast<std::uint32_t>(transmitters_.size()),
                        static_cast<std::uint32_t>(transmitters.size())});
    transmitters_.insert(transmitters_.end(), transmitters.begin(), transmitters.end());
    if (kind == RuResultKind::Collision)
        ++collisions_;
}

std::span<const StationId> SlotOutcome::transmitters(std::size_t i) const
{
    const auto& r = results_.at(i);
    return std::span<const StationId>(transmitters_).subspan(r.first, r.count);
}

void check_schedule(const SlotSchedule& s, std::uint32_t f_max, std::uint32_t n_stations,
                    std::vector<std::uint8_t>& seen)
{
    if (s.size() + s.nonrta_rus != f_max)
        throw std::logic_error(fmt::format("slot {}: {} assignments + {} non-RTA RUs != {}",
                                           s.slot_index, s.size(), s.nonrta_rus, f_max));
    seen.assign(n_stations, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.assignment(i).kind == RuKind::RandomAccess) {
            if (s.assignment(i).count != 0)
                throw std::logic_error("RA assignment with members");
            continue;
        }
        for (StationId id : s.stations(i)) {
            if (id >= n_stations)
                throw std::logic_error(fmt::format("slot {}: unknown station {}", s.slot_index, id));
            if (seen[id]++)
                throw std::logic_error(
                    fmt::format("slot {}: station {} assigned twice", s.slot_index, id));
        }
    }
}

void check_outcome(const SlotSchedule& schedule, const SlotOutcome& outcome)
{
    if (schedule.size() != outcome.size())
        throw std::logic_error(fmt::format("slot {}: {} results for {} assignments",
                                           schedule.slot_index, outcome.size(), schedule.size()));
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        const auto& r = outcome.result(i);
        if (r.kind == RuResultKind::Collision && r.count < 2)
            throw std::logic_error("collision with fewer than two transmitters");
        if (r.kind == RuResultKind::Success && r.count != 1)
            throw std::logic_error("success needs exactly one transmitter");
        if (r.kind == RuResultKind::Empty && r.count != 0)
            throw std::logic_error("empty RU with transmitters");
    }
}

} // namespace rta
