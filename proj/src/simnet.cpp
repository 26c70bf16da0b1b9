#include "dltfed/simnet.hpp"

#include "dltfed/crypto.hpp"

#include <chrono>
#include <sstream>
#include <thread>

namespace dltfed {

std::uint64_t Scheduler::schedule(TimeMs fire_at, std::string target, std::string kind, Action action) {
    if (fire_at < now_) throw ScheduleInPast("event '" + kind + "' scheduled before current virtual time");
    const auto seq = next_seq_++;
    queue_.push(Event{fire_at, seq, std::move(target), std::move(kind), std::move(action)});
    return seq;
}

std::vector<TraceRecord> Scheduler::run_until(TimeMs t_end) {
    if (t_end < now_) throw ScheduleInPast("run_until target precedes current virtual time");
    std::vector<TraceRecord> processed;
    stopped_ = false;
    while (!queue_.empty() && queue_.top().fire_at <= t_end && !stopped_) {
        // priority_queue::top is const; the event is copied out before popping.
        Event ev = queue_.top();
        queue_.pop();
        if (realtime_factor_ > 0 && ev.fire_at > now_) {
            std::this_thread::sleep_for(
                std::chrono::duration<double, std::milli>(static_cast<double>(ev.fire_at - now_) * realtime_factor_));
        }
        now_ = ev.fire_at;
        TraceRecord rec{ev.fire_at, ev.seq, ev.target, ev.kind};
        trace_.push_back(rec);
        processed.push_back(std::move(rec));
        if (ev.action) ev.action();
    }
    if (!stopped_) now_ = t_end;
    return processed;
}

std::string trace_text(const std::vector<TraceRecord>& trace) {
    std::ostringstream os;
    for (const auto& r : trace) os << r.time << ' ' << r.target << ' ' << r.kind << '\n';
    return os.str();
}

Digest trace_hash(const std::vector<TraceRecord>& trace) { return sha256(trace_text(trace)); }

TimeMs LinkModel::sample(std::mt19937_64& rng) const {
    if (jitter == 0) return base;
    std::uniform_int_distribution<TimeMs> extra(0, jitter);
    return base + extra(rng);
}

std::uint64_t send(Scheduler& sched, const LinkModel& link, std::mt19937_64& rng, std::string to, std::string kind,
                   Scheduler::Action deliver) {
    return sched.after(link.sample(rng), std::move(to), std::move(kind), std::move(deliver));
}

std::mt19937_64 RngFactory::stream(std::string_view name) const {
    ByteWriter w;
    w.u64(seed_).str(name);
    auto d = sha256(w.data());
    std::uint64_t s = 0;
    for (int i = 0; i < 8; ++i) s = s << 8 | d.bytes[i];
    return std::mt19937_64(s);
}

} // namespace dltfed
