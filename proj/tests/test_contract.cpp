#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <algorithm>
#include <random>

using namespace dltfed;
using namespace dltfed::test;

namespace {

struct Harness {
    FederationState state;
    KeyRing keys;
    std::uint64_t height = 1;
    TimeMs now = 1000;

    CallOutcome exec(const std::string& who, const ContractCall& call) {
        auto a = addr(who);
        if (!keys.contains(a)) keys.add(a, who, 11);
        auto out = state.execute(call, CallContext{a, height++, now}, keys);
        now += 1000;
        return out;
    }

    ContractError status(const std::string& who, const ContractCall& call) { return exec(who, call).status; }

    /// Registers consumer "c" and providers, announces, and places the given bids in order.
    std::uint64_t auction_with_bids(const std::vector<std::uint64_t>& prices, TrustMode mode = TrustMode::untrusty) {
        exec("c", RegisterDomain{"c", {{0, 30}}});
        for (std::size_t i = 0; i < prices.size(); ++i)
            exec("p" + std::to_string(i), RegisterDomain{"p" + std::to_string(i), {{20, 80}}});
        auto ann = exec("c", AnnounceService{sample_requirements(mode)});
        auto id = parse_announcement(ann.events.at(0)).auction_id;
        for (std::size_t i = 0; i < prices.size(); ++i) exec("p" + std::to_string(i), PlaceBid{id, prices[i]});
        return id;
    }

    /// Full path to a deployed auction with p0 as winner.
    std::uint64_t deployed(std::uint64_t price = 10) {
        auto id = auction_with_bids({price, price + 5});
        exec("c", ChooseProvider{id, 0, sample_deployment()});
        exec("p0", ConfirmDeployment{id, "02:00:00:00:00:02"});
        return id;
    }
};

bool contains_subsequence(const Bytes& hay, const Address& needle) {
    return std::search(hay.begin(), hay.end(), needle.bytes.begin(), needle.bytes.end()) != hay.end();
}

} // namespace

TEST_CASE("register_domain") {
    Harness h;
    CHECK(h.status("a", RegisterDomain{"a", {{0, 30}}}) == ContractError::ok);
    CHECK(h.state.domains().size() == 1);
    CHECK(h.status("a", RegisterDomain{"a", {{0, 30}}}) == ContractError::already_registered);
    h.exec("b", RegisterDomain{"b", {{1, 2}}});
    h.exec("x", RegisterDomain{"x", {{3, 4}}});
    REQUIRE(h.state.domains().size() == 3);
    CHECK(h.state.domains()[0].name == "a");
    CHECK(h.state.domains()[1].name == "b");
    CHECK(h.state.domains()[2].name == "x");
    CHECK(h.status("y", RegisterDomain{"y", {{5, 5}}}) == ContractError::invalid_argument);
}

TEST_CASE("announce_service") {
    Harness h;
    CHECK(h.status("c", AnnounceService{sample_requirements()}) == ContractError::not_registered);
    h.exec("c", RegisterDomain{"c", {{0, 30}}});
    h.exec("d", RegisterDomain{"d", {{0, 30}}});
    auto first = h.exec("c", AnnounceService{sample_requirements()});
    REQUIRE(first.status == ContractError::ok);
    REQUIRE(first.events.size() == 1);
    CHECK(first.events[0].kind == EventKind::announcement_broadcast);
    auto payload = parse_announcement(first.events[0]);
    CHECK(payload.auction_id == 0);
    CHECK(payload.requirements == sample_requirements());

    ByteWriter w;
    encode_event(w, first.events[0]);
    CHECK_FALSE(contains_subsequence(w.data(), addr("c")));

    auto second = h.exec("d", AnnounceService{sample_requirements()});
    CHECK(parse_announcement(second.events.at(0)).auction_id == 1);
}

TEST_CASE("place_bid") {
    Harness h;
    auto id = h.auction_with_bids({});
    h.exec("p0", RegisterDomain{"p0", {{20, 80}}});
    h.exec("p1", RegisterDomain{"p1", {{20, 80}}});
    auto bid = h.exec("p0", PlaceBid{id, 10});
    REQUIRE(bid.status == ContractError::ok);
    REQUIRE(bid.events.size() == 1);
    CHECK(parse_new_bid(bid.events[0]).bid_index == 0);
    // NewBid hides bidder and price.
    CHECK(bid.events[0].payload.size() == 12);
    CHECK_FALSE(contains_subsequence(bid.events[0].payload, addr("p0")));

    CHECK(h.status("c", PlaceBid{id, 5}) == ContractError::self_bid);
    CHECK(h.status("p0", PlaceBid{id, 9}) == ContractError::duplicate_bid);
    CHECK(h.status("zz", PlaceBid{id, 9}) == ContractError::not_registered);
    CHECK(h.status("p1", PlaceBid{id + 7, 9}) == ContractError::unknown_auction);

    h.exec("c", ChooseProvider{id, 0, sample_deployment()});
    CHECK(h.status("p1", PlaceBid{id, 9}) == ContractError::auction_not_open);
}

TEST_CASE("get_bid") {
    Harness h;
    auto id = h.auction_with_bids({10, 7});
    auto b0 = h.state.get_bid(id, 0, addr("c"));
    REQUIRE(b0.ok());
    CHECK(b0->provider == addr("p0"));
    CHECK(b0->price == 10);
    CHECK(h.state.get_bid(id, 1, addr("p0")).error() == ContractError::access_denied);
    CHECK(h.state.get_bid(id, 2, addr("c")).error() == ContractError::bad_index);
    CHECK(h.state.get_bid(id + 1, 0, addr("c")).error() == ContractError::unknown_auction);
}

TEST_CASE("choose_provider") {
    Harness h;
    auto id = h.auction_with_bids({10, 7, 12});
    CHECK(h.status("p0", ChooseProvider{id, 1, sample_deployment()}) == ContractError::access_denied);
    CHECK(h.status("c", ChooseProvider{id, 3, sample_deployment()}) == ContractError::bad_index);
    auto out = h.exec("c", ChooseProvider{id, 1, sample_deployment()});
    REQUIRE(out.status == ContractError::ok);
    CHECK(h.state.find_auction(id)->state == AuctionState::closed);
    CHECK(h.state.find_auction(id)->winner == 1u);
    REQUIRE(out.events.size() == 1);
    CHECK(out.events[0].kind == EventKind::winner_chosen);
    CHECK(parse_winner_chosen(out.events[0]) == id);
    CHECK(out.events[0].payload.size() == 8);
    CHECK(h.status("c", ChooseProvider{id, 0, sample_deployment()}) == ContractError::auction_not_open);
}

TEST_CASE("get_deployment_info releases the trust-mode view to the winner only") {
    Harness h;
    auto id = h.auction_with_bids({10, 7});
    CHECK(h.state.get_deployment_info(id, addr("p1")).error() == ContractError::auction_not_closed);
    h.exec("c", ChooseProvider{id, 1, sample_deployment()});

    auto view = h.state.get_deployment_info(id, addr("p1"));
    REQUIRE(view.ok());
    CHECK(view->descriptor_id == "vap2-hostapd");
    CHECK(view->consumer_endpoint == "10.8.0.1:4789");
    CHECK_FALSE(view->trusted.has_value());
    CHECK(h.state.get_deployment_info(id, addr("p0")).error() == ContractError::access_denied);
    CHECK(h.state.get_deployment_info(id, addr("c")).error() == ContractError::access_denied);
    CHECK(h.state.get_deployment_info(id + 3, addr("p1")).error() == ContractError::unknown_auction);

    Harness t;
    auto tid = t.auction_with_bids({10}, TrustMode::trusty);
    t.exec("c", ChooseProvider{tid, 0, sample_deployment()});
    auto tv = t.state.get_deployment_info(tid, addr("p0"));
    REQUIRE(tv.ok());
    REQUIRE(tv->trusted.has_value());
    CHECK(tv->trusted->resource_db_ref == "fog05://db");
    CHECK(tv->trusted->storage_ref == "fog05://storage");
    CHECK(tv->trusted->extra_endpoints.size() == 2);
}

TEST_CASE("confirm_deployment starts charging at the block timestamp") {
    Harness h;
    auto id = h.auction_with_bids({10, 7});
    CHECK(h.status("p0", ConfirmDeployment{id, "02:00:00:00:00:02"}) == ContractError::access_denied);
    h.exec("c", ChooseProvider{id, 0, sample_deployment()});
    CHECK(h.status("p1", ConfirmDeployment{id, "02:00:00:00:00:02"}) == ContractError::access_denied);
    CHECK(h.status("p0", ConfirmDeployment{id, "xyz"}) == ContractError::malformed_bssid);

    TimeMs block_time = h.now;
    auto out = h.exec("p0", ConfirmDeployment{id, "02:00:00:00:00:02"});
    REQUIRE(out.status == ContractError::ok);
    const auto* a = h.state.find_auction(id);
    CHECK(a->state == AuctionState::deployed);
    CHECK(a->bssid == "02:00:00:00:00:02");
    REQUIRE(a->charging.has_value());
    CHECK(a->charging->started_at == block_time);
    CHECK(a->charging->rate == 10);
    CHECK(parse_deployment_confirmed(out.events.at(0)).bssid == "02:00:00:00:00:02");
    CHECK(h.status("p0", ConfirmDeployment{id, "02:00:00:00:00:02"}) == ContractError::bad_state);
}

TEST_CASE("bssid format") {
    CHECK(is_valid_bssid("02:00:00:00:00:02"));
    CHECK(is_valid_bssid("aa:BB:cc:DD:ee:FF"));
    CHECK_FALSE(is_valid_bssid("xyz"));
    CHECK_FALSE(is_valid_bssid("02:00:00:00:00"));
    CHECK_FALSE(is_valid_bssid("02-00-00-00-00-02"));
    CHECK_FALSE(is_valid_bssid("02:00:00:00:00:0g"));
}

TEST_CASE("open_channel") {
    Harness h;
    auto id = h.auction_with_bids({10});
    CHECK(h.status("c", OpenChannel{id, 100}) == ContractError::bad_state);
    h.exec("c", ChooseProvider{id, 0, sample_deployment()});
    h.exec("p0", ConfirmDeployment{id, "02:00:00:00:00:02"});
    CHECK(h.status("p0", OpenChannel{id, 100}) == ContractError::access_denied);
    auto out = h.exec("c", OpenChannel{id, 100});
    REQUIRE(out.status == ContractError::ok);
    CHECK(parse_channel_opened(out.events.at(0)).channel_id == 0);
    CHECK(h.state.find_channel(0)->status == ChannelStatus::open);
    CHECK(h.state.find_auction(id)->charging->channel_id == 0u);
    CHECK(h.status("c", OpenChannel{id, 100}) == ContractError::channel_exists);
}

TEST_CASE("close_channel") {
    Harness h;
    auto id = h.deployed();
    h.exec("c", OpenChannel{id, 100});

    auto over = sign_channel_update(h.keys, addr("c"), 0, 1, 150);
    CHECK(h.status("p0", CloseChannel{0, over}) == ContractError::over_deposit);

    auto tampered = sign_channel_update(h.keys, addr("c"), 0, 1, 37);
    tampered.signature[3] ^= 0x40;
    CHECK(h.status("p0", CloseChannel{0, tampered}) == ContractError::bad_signature);

    auto by_provider = sign_channel_update(h.keys, addr("p0"), 0, 1, 37);
    CHECK(h.status("p0", CloseChannel{0, by_provider}) == ContractError::bad_signature);

    auto zero_seq = sign_channel_update(h.keys, addr("c"), 0, 0, 37);
    CHECK(h.status("p0", CloseChannel{0, zero_seq}) == ContractError::stale_update);

    auto good = sign_channel_update(h.keys, addr("c"), 0, 1, 37);
    CHECK(h.status("p1", CloseChannel{0, good}) == ContractError::access_denied);
    CHECK(h.status("p0", CloseChannel{5, good}) == ContractError::unknown_channel);
    auto out = h.exec("p0", CloseChannel{0, good});
    REQUIRE(out.status == ContractError::ok);
    auto closed = parse_channel_closed(out.events.at(0));
    CHECK(closed.settlement.payout == 37);
    CHECK(closed.settlement.refund == 63);
    CHECK(h.state.find_channel(0)->status == ChannelStatus::closed);
    CHECK(h.status("c", CloseChannel{0, good}) == ContractError::already_closed);
}

TEST_CASE("accrued_charge") {
    ChargingRecord r{1000, 10, std::nullopt};
    CHECK(*accrued_charge(r, 1000 + 3'600'000) == 10);
    CHECK(*accrued_charge(r, 1000) == 0);
    CHECK(*accrued_charge(ChargingRecord{0, 7, std::nullopt}, 1'800'000) == 3);
    CHECK(accrued_charge(r, 999).error() == ContractError::time_before_start);
    // No overflow for large operands.
    CHECK(*accrued_charge(ChargingRecord{0, 1ULL << 40, std::nullopt}, 3'600'000ULL << 20) == (1ULL << 60));
}

TEST_CASE("failed calls leave state untouched") {
    Harness h;
    auto id = h.auction_with_bids({10, 7});
    auto before = h.state.serialize();
    const std::vector<std::pair<std::string, ContractCall>> bad = {
        {"c", RegisterDomain{"c", {{0, 1}}}},
        {"p0", PlaceBid{id, 1}},
        {"c", PlaceBid{id, 1}},
        {"p0", ChooseProvider{id, 0, sample_deployment()}},
        {"c", ChooseProvider{id, 9, sample_deployment()}},
        {"p0", ConfirmDeployment{id, "02:00:00:00:00:02"}},
        {"c", OpenChannel{id, 1}},
        {"c", CloseChannel{0, {}}},
    };
    for (const auto& [who, call] : bad) {
        auto out = h.exec(who, call);
        CHECK(out.status != ContractError::ok);
        CHECK(out.events.empty());
        CHECK(h.state.serialize() == before);
    }
}

TEST_CASE("property: get_bid succeeds exactly for the auction consumer") {
    for (std::size_t n = 2; n <= 10; ++n) {
        Harness h;
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) {
            names.push_back("d" + std::to_string(i));
            h.exec(names.back(), RegisterDomain{names.back(), {{0, 100}}});
        }
        // Every domain announces once, and every other domain bids on it.
        for (std::size_t c = 0; c < n; ++c) h.exec(names[c], AnnounceService{sample_requirements()});
        for (std::size_t c = 0; c < n; ++c)
            for (std::size_t p = 0; p < n; ++p)
                if (p != c) h.exec(names[p], PlaceBid{c, 100 + p});
        for (std::size_t auction = 0; auction < n; ++auction)
            for (const auto& who : names)
                for (std::uint32_t idx = 0; idx < n - 1; ++idx) {
                    auto r = h.state.get_bid(auction, idx, addr(who));
                    CHECK(r.ok() == (who == names[auction]));
                }
    }
}

TEST_CASE("property: lifecycle, winner-only access and anonymity over random traces") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 60; ++trial) {
        Harness h;
        const std::size_t n = 2 + rng() % 8;
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) {
            names.push_back("n" + std::to_string(i));
            h.exec(names.back(), RegisterDomain{names.back(), {{0, 100}}});
        }
        std::map<std::uint64_t, std::vector<AuctionState>> history;
        std::vector<Bytes> broadcast_payloads;
        for (int step = 0; step < 40; ++step) {
            const auto& who = names[rng() % n];
            const std::uint64_t aid = h.state.auctions().empty() ? 0 : rng() % (h.state.auctions().size() + 1);
            ContractCall call;
            switch (rng() % 5) {
            case 0: call = AnnounceService{sample_requirements(static_cast<TrustMode>(rng() % 2))}; break;
            case 1: call = PlaceBid{aid, rng() % 50}; break;
            case 2: call = ChooseProvider{aid, static_cast<std::uint32_t>(rng() % 3), sample_deployment()}; break;
            case 3: call = ConfirmDeployment{aid, "02:00:00:00:00:0" + std::to_string(rng() % 10)}; break;
            default: call = OpenChannel{aid, rng() % 100}; break;
            }
            auto out = h.exec(who, call);
            for (const auto& e : out.events)
                if (e.kind == EventKind::announcement_broadcast || e.kind == EventKind::winner_chosen)
                    broadcast_payloads.push_back(e.payload);
            for (const auto& a : h.state.auctions()) {
                auto& seen = history[a.auction_id];
                if (seen.empty() || seen.back() != a.state) seen.push_back(a.state);
            }
        }
        for (const auto& [id, seq] : history) {
            CHECK(std::is_sorted(seq.begin(), seq.end()));
            CHECK(seq.front() == AuctionState::open);
        }
        for (const auto& a : h.state.auctions()) {
            CHECK(a.winner.has_value() == (a.state != AuctionState::open));
            CHECK(a.bssid.has_value() == (a.state == AuctionState::deployed));
            if (a.state == AuctionState::open) continue;
            int granted = 0;
            for (const auto& who : names) granted += h.state.get_deployment_info(a.auction_id, addr(who)).ok();
            CHECK(granted == 1);
            CHECK_FALSE(h.state.get_deployment_info(a.auction_id, addr("outsider")).ok());
            CHECK(h.state.get_deployment_info(a.auction_id, a.bids[*a.winner].provider).ok());
        }
        for (const auto& p : broadcast_payloads)
            for (const auto& who : names) CHECK_FALSE(contains_subsequence(p, addr(who)));
    }
}

TEST_CASE("property: settlement conserves the deposit") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Harness h;
        auto id = h.deployed();
        const std::uint64_t deposit = rng() % 100'000;
        h.exec("c", OpenChannel{id, deposit});
        const std::uint64_t balance = rng() % (deposit + deposit / 4 + 2);
        auto update = sign_channel_update(h.keys, addr("c"), 0, 1 + rng() % 5, balance);
        auto out = h.exec(rng() % 2 ? "c" : "p0", CloseChannel{0, update});
        if (balance > deposit) {
            CHECK(out.status == ContractError::over_deposit);
            continue;
        }
        REQUIRE(out.status == ContractError::ok);
        auto s = *h.state.find_channel(0)->settled;
        CHECK(s.payout == balance);
        CHECK(s.payout + s.refund == deposit);
    }
}

TEST_CASE("contract calls round-trip through canonical encoding") {
    const std::vector<ContractCall> calls = {
        RegisterDomain{"a", {{0, 30}, {40.5, 50}}},
        AnnounceService{sample_requirements(TrustMode::trusty)},
        PlaceBid{3, 12},
        ChooseProvider{1, 2, sample_deployment()},
        ConfirmDeployment{1, "02:00:00:00:00:02"},
        OpenChannel{1, 100},
        CloseChannel{0, ChannelUpdate{0, 1, 37, Bytes(32, 9)}},
    };
    for (const auto& c : calls) {
        ByteWriter w;
        encode_call(w, c);
        ByteReader r(w.data());
        CHECK(decode_call(r) == c);
        CHECK(r.done());
    }
    Bytes junk{0x63};
    ByteReader r(junk);
    CHECK_THROWS_AS(decode_call(r), DecodeError);
}
