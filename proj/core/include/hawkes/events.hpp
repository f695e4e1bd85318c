#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace hawkes {

struct Event {
    double time = 0.0;
    int mark = 0;  // 0-based

    friend bool operator==(const Event&, const Event&) = default;
};

// Strict ordering by (time, mark).
inline bool event_before(const Event& a, const Event& b) noexcept {
    return a.time < b.time || (a.time == b.time && a.mark < b.mark);
}

/// Realisation of a K-variate point process on [t_start, t_end).
///
/// Invariant: events sorted by (time, mark), no duplicates, every time in the
/// window and every mark in [0, K).
class EventSequence {
public:
    EventSequence() = default;
    // Sorts the input; throws ConfigError for out-of-window times, bad marks
    // or duplicate (time, mark) pairs.
    EventSequence(std::vector<Event> events, double t_start, double t_end, int dim);

    std::span<const Event> events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    double t_start() const noexcept { return t_start_; }
    double t_end() const noexcept { return t_end_; }
    int dim() const noexcept { return dim_; }

    // Times of mark k (0-based), ascending.
    std::vector<double> times(int mark) const;
    // Number of events of mark k in [lo, hi).
    std::size_t count(int mark, double lo, double hi) const;

    // Events restricted to [lo, hi) with that window.
    EventSequence slice(double lo, double hi) const;

    friend bool operator==(const EventSequence&, const EventSequence&) = default;

private:
    std::vector<Event> events_;
    double t_start_ = 0.0;
    double t_end_ = 0.0;
    int dim_ = 0;
};

// CSV with header `time,mark` (marks 1-based, times printed with 17
// significant digits) plus a JSON sidecar {"t_start", "t_end", "K"}.
void write_events(const EventSequence& seq, const std::filesystem::path& csv_path);
EventSequence read_events(const std::filesystem::path& csv_path);

std::string events_to_csv(const EventSequence& seq);
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace hawkes
