#pragma once

// Discrete-event engine on an integer-millisecond virtual clock.

#include "dltfed/bytes.hpp"

#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dltfed {

struct ScheduleInPast : std::logic_error {
    using std::logic_error::logic_error;
};

struct TraceRecord {
    TimeMs time = 0;
    std::uint64_t seq = 0;
    std::string target;
    std::string kind;

    bool operator==(const TraceRecord&) const = default;
};

class Scheduler {
public:
    using Action = std::function<void()>;

    TimeMs now() const { return now_; }

    /// Enqueues an event; ties on fire_at are delivered in insertion order.
    std::uint64_t schedule(TimeMs fire_at, std::string target, std::string kind, Action action);
    std::uint64_t after(TimeMs delay, std::string target, std::string kind, Action action) {
        return schedule(now_ + delay, std::move(target), std::move(kind), std::move(action));
    }

    /// Processes events up to and including t_end, then parks the clock at t_end
    /// unless stop() was requested by a handler.
    std::vector<TraceRecord> run_until(TimeMs t_end);
    void stop() { stopped_ = true; }
    bool stopped() const { return stopped_; }
    bool idle() const { return queue_.empty(); }

    /// Wall-clock milliseconds slept per virtual millisecond; 0 disables real-time pacing.
    void set_realtime_factor(double factor) { realtime_factor_ = factor; }

    const std::vector<TraceRecord>& trace() const { return trace_; }

private:
    struct Event {
        TimeMs fire_at;
        std::uint64_t seq;
        std::string target;
        std::string kind;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.fire_at != b.fire_at ? a.fire_at > b.fire_at : a.seq > b.seq;
        }
    };

    TimeMs now_ = 0;
    std::uint64_t next_seq_ = 0;
    bool stopped_ = false;
    double realtime_factor_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::vector<TraceRecord> trace_;
};

/// Line-delimited "time target kind" records.
std::string trace_text(const std::vector<TraceRecord>& trace);
Digest trace_hash(const std::vector<TraceRecord>& trace);

struct LinkModel {
    TimeMs base = 0;
    TimeMs jitter = 0; // max extra delay, uniform

    TimeMs sample(std::mt19937_64& rng) const;
};

/// Reliable delivery after a link delay.
std::uint64_t send(Scheduler& sched, const LinkModel& link, std::mt19937_64& rng, std::string to, std::string kind,
                   Scheduler::Action deliver);

/// Seeded generator with independent substreams keyed by consumer name, so adding
/// a participant does not shift anyone else's draws.
class RngFactory {
public:
    explicit RngFactory(std::uint64_t seed) : seed_(seed) {}
    std::mt19937_64 stream(std::string_view name) const;
    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace dltfed
