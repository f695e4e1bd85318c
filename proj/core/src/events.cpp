#include "hawkes/events.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hawkes/errors.hpp"

namespace hawkes {

EventSequence::EventSequence(std::vector<Event> events, double t_start, double t_end, int dim)
    : events_(std::move(events)), t_start_(t_start), t_end_(t_end), dim_(dim) {
    if (!(t_end_ > t_start_)) throw ConfigError("event window must have t_end > t_start");
    if (dim_ < 1) throw ConfigError("event sequence needs K >= 1");
    std::stable_sort(events_.begin(), events_.end(), event_before);
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const auto& e = events_[i];
        if (e.mark < 0 || e.mark >= dim_) throw ConfigError("event mark out of range");
        if (!(e.time >= t_start_ && e.time < t_end_))
            throw ConfigError("event time outside the window");
        if (i > 0 && events_[i - 1] == e) throw ConfigError("duplicate (time, mark) event");
    }
}

std::vector<double> EventSequence::times(int mark) const {
    std::vector<double> out;
    for (const auto& e : events_)
        if (e.mark == mark) out.push_back(e.time);
    return out;
}

std::size_t EventSequence::count(int mark, double lo, double hi) const {
    return static_cast<std::size_t>(std::count_if(events_.begin(), events_.end(), [&](const Event& e) {
        return e.mark == mark && e.time >= lo && e.time < hi;
    }));
}

EventSequence EventSequence::slice(double lo, double hi) const {
    std::vector<Event> kept;
    for (const auto& e : events_)
        if (e.time >= lo && e.time < hi) kept.push_back(e);
    return EventSequence(std::move(kept), lo, hi, dim_);
}

std::string events_to_csv(const EventSequence& seq) {
    std::string out = "time,mark\n";
    char buf[64];
    for (const auto& e : seq.events()) {
        const int n = std::snprintf(buf, sizeof buf, "%.17g,%d\n", e.time, e.mark + 1);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_events(const EventSequence& seq, const std::filesystem::path& csv_path) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + csv_path.string());
        out << events_to_csv(seq);
    }
    nlohmann::ordered_json side;
    side["t_start"] = seq.t_start();
    side["t_end"] = seq.t_end();
    side["K"] = seq.dim();
    std::ofstream out(sidecar_path(csv_path), std::ios::binary);
    if (!out) throw ConfigError("cannot write " + sidecar_path(csv_path).string());
    out << side.dump(2) << '\n';
}

EventSequence read_events(const std::filesystem::path& csv_path) {
    std::ifstream side_in(sidecar_path(csv_path));
    if (!side_in) throw ConfigError("cannot read sidecar " + sidecar_path(csv_path).string());
    nlohmann::json side;
    try {
        side = nlohmann::json::parse(side_in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(sidecar_path(csv_path).string() + ": " + e.what());
    }
    const double t_start = side.at("t_start").get<double>();
    const double t_end = side.at("t_end").get<double>();
    const int dim = side.at("K").get<int>();

    std::ifstream in(csv_path);
    if (!in) throw ConfigError("cannot read " + csv_path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("time,mark", 0) != 0)
        throw ConfigError(csv_path.string() + ": expected header 'time,mark'");
    std::vector<Event> events;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(csv_path.string() + ":" + std::to_string(lineno) + ": missing comma");
        Event e;
        const char* first = line.data();
        auto [p1, ec1] = std::from_chars(first, first + comma, e.time);
        int mark1 = 0;
        auto end = line.data() + line.size();
        if (!line.empty() && line.back() == '\r') --end;
        auto [p2, ec2] = std::from_chars(first + comma + 1, end, mark1);
        if (ec1 != std::errc{} || ec2 != std::errc{} || p2 != end)
            throw ConfigError(csv_path.string() + ":" + std::to_string(lineno) + ": malformed row");
        e.mark = mark1 - 1;
        events.push_back(e);
    }
    return EventSequence(std::move(events), t_start, t_end, dim);
}

}  // namespace hawkes
