#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dltfed/simnet.hpp"

#include <set>

using namespace dltfed;

TEST_CASE("ties on fire_at are delivered in insertion order") {
    Scheduler s;
    std::string order;
    s.schedule(100, "x", "A", [&] { order += 'A'; });
    s.schedule(100, "x", "B", [&] { order += 'B'; });
    s.schedule(90, "x", "C", [&] { order += 'C'; });
    auto processed = s.run_until(200);
    CHECK(order == "CAB");
    REQUIRE(processed.size() == 3);
    CHECK(processed[1].seq < processed[2].seq);
}

TEST_CASE("an event at the current time runs before the clock advances") {
    Scheduler s;
    s.run_until(40);
    TimeMs seen = 0;
    s.schedule(40, "x", "now", [&] { seen = s.now(); });
    s.run_until(100);
    CHECK(seen == 40);
    CHECK(s.now() == 100);
}

TEST_CASE("scheduling in the past throws") {
    Scheduler s;
    s.run_until(50);
    CHECK_THROWS_AS(s.schedule(49, "x", "late", [] {}), ScheduleInPast);
}

TEST_CASE("an empty queue still advances the clock") {
    Scheduler s;
    auto processed = s.run_until(500);
    CHECK(processed.empty());
    CHECK(s.now() == 500);
}

TEST_CASE("handlers can schedule follow-up events") {
    Scheduler s;
    std::vector<TimeMs> clocks;
    s.schedule(50, "x", "first", [&] {
        clocks.push_back(s.now());
        s.after(20, "x", "second", [&] { clocks.push_back(s.now()); });
    });
    auto processed = s.run_until(100);
    CHECK(processed.size() == 2);
    CHECK(clocks == std::vector<TimeMs>{50, 70});
    CHECK(s.now() == 100);
}

TEST_CASE("stop halts processing without parking the clock") {
    Scheduler s;
    int fired = 0;
    s.schedule(10, "x", "a", [&] { ++fired; s.stop(); });
    s.schedule(20, "x", "b", [&] { ++fired; });
    s.run_until(100);
    CHECK(fired == 1);
    CHECK(s.now() == 10);
}

TEST_CASE("links without jitter deliver after exactly the base delay") {
    Scheduler s;
    std::mt19937_64 rng(1);
    s.run_until(13);
    TimeMs at = 0;
    send(s, LinkModel{50, 0}, rng, "peer", "msg", [&] { at = s.now(); });
    s.run_until(1000);
    CHECK(at == 63);
}

TEST_CASE("jittered delays stay in range and replay per seed") {
    auto draw = [](std::uint64_t seed) {
        RngFactory f(seed);
        auto rng = f.stream("link");
        std::vector<TimeMs> out;
        for (int i = 0; i < 200; ++i) out.push_back(LinkModel{50, 20}.sample(rng));
        return out;
    };
    auto a = draw(5);
    CHECK(a == draw(5));
    CHECK(a != draw(6));
    std::set<TimeMs> distinct(a.begin(), a.end());
    CHECK(*distinct.begin() >= 50);
    CHECK(*distinct.rbegin() <= 70);
    CHECK(distinct.size() > 10);
}

TEST_CASE("rng substreams are independent of each other") {
    RngFactory f(9);
    auto a1 = f.stream("alice");
    auto b = f.stream("bob");
    auto a2 = f.stream("alice");
    CHECK(a1() == a2());
    CHECK(f.stream("alice")() != b());
}

TEST_CASE("a broadcast reaches every subscriber exactly once") {
    Scheduler s;
    RngFactory f(3);
    std::map<std::string, int> received;
    std::set<TimeMs> delays;
    for (int i = 0; i < 5; ++i) {
        auto name = "sub" + std::to_string(i);
        auto rng = f.stream(name);
        send(s, LinkModel{50, 10}, rng, name, "notice", [&, name] {
            ++received[name];
            delays.insert(s.now());
        });
    }
    s.run_until(1000);
    CHECK(received.size() == 5);
    for (const auto& [name, n] : received) CHECK(n == 1);
    CHECK(delays.size() > 1);
}

namespace {

std::vector<TraceRecord> busy_run(std::uint64_t seed) {
    Scheduler s;
    RngFactory f(seed);
    auto rng = f.stream("net");
    std::function<void(int)> hop = [&](int n) {
        if (n == 0) return;
        send(s, LinkModel{10, 30}, rng, "node" + std::to_string(n % 3), "hop", [&, n] { hop(n - 1); });
        send(s, LinkModel{5, 50}, rng, "side", "ping", [] {});
    };
    hop(40);
    s.run_until(100000);
    return s.trace();
}

} // namespace

TEST_CASE("identical runs produce identical trace hashes") {
    auto a = busy_run(17);
    auto b = busy_run(17);
    CHECK(trace_hash(a) == trace_hash(b));
    CHECK(trace_text(a) == trace_text(b));
    CHECK(trace_hash(a) != trace_hash(busy_run(18)));
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].time <= a[i].time);
}

TEST_CASE("trace text is one record per line") {
    std::vector<TraceRecord> t{{5, 0, "ledger", "seal"}, {7, 1, "consumer", "notice"}};
    CHECK(trace_text(t) == "5 ledger seal\n7 consumer notice\n");
}
