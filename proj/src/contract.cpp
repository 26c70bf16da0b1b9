#include "dltfed/contract.hpp"

#include <algorithm>
#include <cctype>

namespace dltfed {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void encode(ByteWriter& w, const Interval& i) { w.f64(i.lo).f64(i.hi); }

Interval decode_interval(ByteReader& r) {
    Interval i;
    i.lo = r.f64();
    i.hi = r.f64();
    return i;
}

void encode(ByteWriter& w, const ServiceFootprint& fp) {
    w.u32(static_cast<std::uint32_t>(fp.size()));
    for (const auto& i : fp) encode(w, i);
}

ServiceFootprint decode_footprint(ByteReader& r) {
    ServiceFootprint fp(r.u32());
    for (auto& i : fp) i = decode_interval(r);
    return fp;
}

void encode(ByteWriter& w, const Requirements& req) {
    w.str(req.service_descriptor_id);
    encode(w, req.coverage_target);
    w.u64(req.max_latency).u8(static_cast<std::uint8_t>(req.trust_mode));
}

Requirements decode_requirements(ByteReader& r) {
    Requirements req;
    req.service_descriptor_id = r.str();
    req.coverage_target = decode_interval(r);
    req.max_latency = r.u64();
    auto mode = r.u8();
    if (mode > 1) throw DecodeError("invalid trust mode");
    req.trust_mode = static_cast<TrustMode>(mode);
    return req;
}

void encode(ByteWriter& w, const std::vector<std::string>& list) {
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& s : list) w.str(s);
}

std::vector<std::string> decode_strings(ByteReader& r) {
    std::vector<std::string> out(r.u32());
    for (auto& s : out) s = r.str();
    return out;
}

void encode(ByteWriter& w, const DeploymentInfo& info) {
    w.str(info.descriptor_id).str(info.consumer_endpoint);
    w.str(info.trusted.resource_db_ref).str(info.trusted.storage_ref);
    encode(w, info.trusted.extra_endpoints);
}

DeploymentInfo decode_deployment_info(ByteReader& r) {
    DeploymentInfo info;
    info.descriptor_id = r.str();
    info.consumer_endpoint = r.str();
    info.trusted.resource_db_ref = r.str();
    info.trusted.storage_ref = r.str();
    info.trusted.extra_endpoints = decode_strings(r);
    return info;
}

void encode(ByteWriter& w, const ChannelUpdate& u) {
    w.u64(u.channel_id).u64(u.seq).u64(u.balance_to_provider).bytes(u.signature);
}

ChannelUpdate decode_channel_update(ByteReader& r) {
    ChannelUpdate u;
    u.channel_id = r.u64();
    u.seq = r.u64();
    u.balance_to_provider = r.u64();
    u.signature = r.bytes();
    return u;
}

template <typename T>
void encode_optional(ByteWriter& w, const std::optional<T>& v, auto&& fn) {
    w.boolean(v.has_value());
    if (v) fn(*v);
}

ContractEvent make_event(EventKind kind, std::optional<std::uint64_t> auction_id, ByteWriter&& payload,
                         const CallContext& ctx) {
    return ContractEvent{kind, auction_id, std::move(payload).take(), ctx.block_height};
}

CallOutcome fail(ContractError e) { return CallOutcome{e, {}}; }

ByteReader payload_reader(const ContractEvent& e, EventKind expected) {
    if (e.kind != expected) throw DecodeError("unexpected event kind");
    return ByteReader(e.payload);
}

bool footprint_ok(const ServiceFootprint& fp) {
    return std::all_of(fp.begin(), fp.end(), [](const Interval& i) { return i.well_formed(); });
}

} // namespace

DeploymentView deployment_view(const DeploymentInfo& info, TrustMode mode) {
    DeploymentView view{info.descriptor_id, info.consumer_endpoint, std::nullopt};
    if (mode == TrustMode::trusty) view.trusted = info.trusted;
    return view;
}

Bytes ChannelUpdate::signing_bytes() const {
    ByteWriter w;
    w.str("dltfed-channel-update").u64(channel_id).u64(seq).u64(balance_to_provider);
    return std::move(w).take();
}

ChannelUpdate sign_channel_update(const KeyRing& keys, const Address& consumer, std::uint64_t channel_id,
                                  std::uint64_t seq, std::uint64_t balance_to_provider) {
    ChannelUpdate u{channel_id, seq, balance_to_provider, {}};
    u.signature = keys.sign(consumer, u.signing_bytes());
    return u;
}

std::string call_name(const ContractCall& call) {
    return std::visit(overloaded{
                          [](const RegisterDomain&) { return "register_domain"; },
                          [](const AnnounceService&) { return "announce_service"; },
                          [](const PlaceBid&) { return "place_bid"; },
                          [](const ChooseProvider&) { return "choose_provider"; },
                          [](const ConfirmDeployment&) { return "confirm_deployment"; },
                          [](const OpenChannel&) { return "open_channel"; },
                          [](const CloseChannel&) { return "close_channel"; },
                      },
                      call);
}

void encode_call(ByteWriter& w, const ContractCall& call) {
    w.u8(static_cast<std::uint8_t>(call.index() + 1));
    std::visit(overloaded{
                   [&](const RegisterDomain& c) {
                       w.str(c.name);
                       encode(w, c.footprint);
                   },
                   [&](const AnnounceService& c) { encode(w, c.requirements); },
                   [&](const PlaceBid& c) { w.u64(c.auction_id).u64(c.price); },
                   [&](const ChooseProvider& c) {
                       w.u64(c.auction_id).u32(c.bid_index);
                       encode(w, c.deployment_info);
                   },
                   [&](const ConfirmDeployment& c) { w.u64(c.auction_id).str(c.bssid); },
                   [&](const OpenChannel& c) { w.u64(c.auction_id).u64(c.deposit); },
                   [&](const CloseChannel& c) {
                       w.u64(c.channel_id);
                       encode(w, c.update);
                   },
               },
               call);
}

ContractCall decode_call(ByteReader& r) {
    switch (r.u8()) {
    case 1: {
        RegisterDomain c;
        c.name = r.str();
        c.footprint = decode_footprint(r);
        return c;
    }
    case 2:
        return AnnounceService{decode_requirements(r)};
    case 3: {
        PlaceBid c;
        c.auction_id = r.u64();
        c.price = r.u64();
        return c;
    }
    case 4: {
        ChooseProvider c;
        c.auction_id = r.u64();
        c.bid_index = r.u32();
        c.deployment_info = decode_deployment_info(r);
        return c;
    }
    case 5: {
        ConfirmDeployment c;
        c.auction_id = r.u64();
        c.bssid = r.str();
        return c;
    }
    case 6: {
        OpenChannel c;
        c.auction_id = r.u64();
        c.deposit = r.u64();
        return c;
    }
    case 7: {
        CloseChannel c;
        c.channel_id = r.u64();
        c.update = decode_channel_update(r);
        return c;
    }
    default:
        throw DecodeError("unknown contract call tag");
    }
}

std::string_view error_name(ContractError e) {
    switch (e) {
    case ContractError::ok: return "ok";
    case ContractError::already_registered: return "already_registered";
    case ContractError::not_registered: return "not_registered";
    case ContractError::unknown_auction: return "unknown_auction";
    case ContractError::auction_not_open: return "auction_not_open";
    case ContractError::self_bid: return "self_bid";
    case ContractError::duplicate_bid: return "duplicate_bid";
    case ContractError::access_denied: return "access_denied";
    case ContractError::bad_index: return "bad_index";
    case ContractError::auction_not_closed: return "auction_not_closed";
    case ContractError::bad_state: return "bad_state";
    case ContractError::malformed_bssid: return "malformed_bssid";
    case ContractError::channel_exists: return "channel_exists";
    case ContractError::unknown_channel: return "unknown_channel";
    case ContractError::bad_signature: return "bad_signature";
    case ContractError::over_deposit: return "over_deposit";
    case ContractError::already_closed: return "already_closed";
    case ContractError::invalid_argument: return "invalid_argument";
    case ContractError::stale_update: return "stale_update";
    case ContractError::time_before_start: return "time_before_start";
    }
    return "unknown";
}

std::string_view event_name(EventKind k) {
    switch (k) {
    case EventKind::domain_registered: return "DomainRegistered";
    case EventKind::announcement_broadcast: return "AnnouncementBroadcast";
    case EventKind::new_bid: return "NewBid";
    case EventKind::winner_chosen: return "WinnerChosen";
    case EventKind::deployment_confirmed: return "DeploymentConfirmed";
    case EventKind::channel_opened: return "ChannelOpened";
    case EventKind::channel_closed: return "ChannelClosed";
    }
    return "Unknown";
}

void encode_event(ByteWriter& w, const ContractEvent& e) {
    w.u8(static_cast<std::uint8_t>(e.kind));
    encode_optional(w, e.auction_id, [&](std::uint64_t id) { w.u64(id); });
    w.bytes(e.payload).u64(e.block_height);
}

ContractEvent decode_event(ByteReader& r) {
    ContractEvent e;
    auto kind = r.u8();
    if (kind < 1 || kind > 7) throw DecodeError("unknown event kind");
    e.kind = static_cast<EventKind>(kind);
    if (r.boolean()) e.auction_id = r.u64();
    e.payload = r.bytes();
    e.block_height = r.u64();
    return e;
}

AnnouncementPayload parse_announcement(const ContractEvent& e) {
    auto r = payload_reader(e, EventKind::announcement_broadcast);
    AnnouncementPayload p;
    p.auction_id = r.u64();
    p.requirements = decode_requirements(r);
    return p;
}

NewBidPayload parse_new_bid(const ContractEvent& e) {
    auto r = payload_reader(e, EventKind::new_bid);
    NewBidPayload p;
    p.auction_id = r.u64();
    p.bid_index = r.u32();
    return p;
}

std::uint64_t parse_winner_chosen(const ContractEvent& e) {
    auto r = payload_reader(e, EventKind::winner_chosen);
    return r.u64();
}

DeploymentConfirmedPayload parse_deployment_confirmed(const ContractEvent& e) {
    auto r = payload_reader(e, EventKind::deployment_confirmed);
    DeploymentConfirmedPayload p;
    p.auction_id = r.u64();
    p.bssid = r.str();
    return p;
}

ChannelOpenedPayload parse_channel_opened(const ContractEvent& e) {
    auto r = payload_reader(e, EventKind::channel_opened);
    ChannelOpenedPayload p;
    p.channel_id = r.u64();
    p.auction_id = r.u64();
    p.deposit = r.u64();
    return p;
}

ChannelClosedPayload parse_channel_closed(const ContractEvent& e) {
    auto r = payload_reader(e, EventKind::channel_closed);
    ChannelClosedPayload p;
    p.channel_id = r.u64();
    p.settlement.payout = r.u64();
    p.settlement.refund = r.u64();
    return p;
}

bool is_valid_bssid(std::string_view bssid) {
    if (bssid.size() != 17) return false;
    for (std::size_t i = 0; i < bssid.size(); ++i) {
        if (i % 3 == 2) {
            if (bssid[i] != ':') return false;
        } else if (!std::isxdigit(static_cast<unsigned char>(bssid[i]))) {
            return false;
        }
    }
    return true;
}

Result<std::uint64_t> accrued_charge(const ChargingRecord& record, TimeMs now) {
    if (now < record.started_at) return ContractError::time_before_start;
    constexpr unsigned __int128 ms_per_hour = 3'600'000;
    auto product = static_cast<unsigned __int128>(record.rate) * (now - record.started_at);
    return static_cast<std::uint64_t>(product / ms_per_hour);
}

const DomainRecord* FederationState::find_domain(const Address& a) const {
    auto it = domain_index_.find(a);
    return it == domain_index_.end() ? nullptr : &domains_[it->second];
}

const Auction* FederationState::find_auction(std::uint64_t id) const {
    return id < auctions_.size() ? &auctions_[id] : nullptr;
}

const ChannelState* FederationState::find_channel(std::uint64_t id) const {
    return id < channels_.size() ? &channels_[id] : nullptr;
}

CallOutcome FederationState::execute(const ContractCall& call, const CallContext& ctx, const KeyRing& keys) {
    return std::visit([&](const auto& c) { return on(c, ctx, keys); }, call);
}

CallOutcome FederationState::on(const RegisterDomain& c, const CallContext& ctx, const KeyRing&) {
    if (registered(ctx.caller)) return fail(ContractError::already_registered);
    if (!footprint_ok(c.footprint)) return fail(ContractError::invalid_argument);

    domain_index_.emplace(ctx.caller, domains_.size());
    domains_.push_back(DomainRecord{ctx.caller, c.name, c.footprint, ctx.block_height});

    ByteWriter w;
    w.address(ctx.caller).str(c.name);
    return CallOutcome{ContractError::ok, {make_event(EventKind::domain_registered, std::nullopt, std::move(w), ctx)}};
}

CallOutcome FederationState::on(const AnnounceService& c, const CallContext& ctx, const KeyRing&) {
    if (!registered(ctx.caller)) return fail(ContractError::not_registered);
    const auto& req = c.requirements;
    if (!req.coverage_target.well_formed() || req.max_latency == 0) return fail(ContractError::invalid_argument);

    Auction a;
    a.auction_id = auctions_.size();
    a.consumer = ctx.caller;
    a.requirements = req;
    auctions_.push_back(std::move(a));

    // The consumer address is deliberately absent from the broadcast.
    ByteWriter w;
    w.u64(auctions_.back().auction_id);
    encode(w, req);
    return CallOutcome{ContractError::ok,
                       {make_event(EventKind::announcement_broadcast, auctions_.back().auction_id, std::move(w), ctx)}};
}

CallOutcome FederationState::on(const PlaceBid& c, const CallContext& ctx, const KeyRing&) {
    if (!registered(ctx.caller)) return fail(ContractError::not_registered);
    if (c.auction_id >= auctions_.size()) return fail(ContractError::unknown_auction);
    auto& a = auctions_[c.auction_id];
    if (a.state != AuctionState::open) return fail(ContractError::auction_not_open);
    if (a.consumer == ctx.caller) return fail(ContractError::self_bid);
    if (std::any_of(a.bids.begin(), a.bids.end(), [&](const Bid& b) { return b.provider == ctx.caller; }))
        return fail(ContractError::duplicate_bid);

    auto index = static_cast<std::uint32_t>(a.bids.size());
    a.bids.push_back(Bid{ctx.caller, c.price, index});

    // Single-blinded: neither price nor bidder leaves the contract.
    ByteWriter w;
    w.u64(a.auction_id).u32(index);
    return CallOutcome{ContractError::ok, {make_event(EventKind::new_bid, a.auction_id, std::move(w), ctx)}};
}

CallOutcome FederationState::on(const ChooseProvider& c, const CallContext& ctx, const KeyRing&) {
    if (c.auction_id >= auctions_.size()) return fail(ContractError::unknown_auction);
    auto& a = auctions_[c.auction_id];
    if (a.consumer != ctx.caller) return fail(ContractError::access_denied);
    if (a.state != AuctionState::open) return fail(ContractError::auction_not_open);
    if (c.bid_index >= a.bids.size()) return fail(ContractError::bad_index);

    a.state = AuctionState::closed;
    a.winner = c.bid_index;
    a.deployment_info = c.deployment_info;

    ByteWriter w;
    w.u64(a.auction_id);
    return CallOutcome{ContractError::ok, {make_event(EventKind::winner_chosen, a.auction_id, std::move(w), ctx)}};
}

CallOutcome FederationState::on(const ConfirmDeployment& c, const CallContext& ctx, const KeyRing&) {
    if (c.auction_id >= auctions_.size()) return fail(ContractError::unknown_auction);
    auto& a = auctions_[c.auction_id];
    if (!a.winner || a.bids[*a.winner].provider != ctx.caller) return fail(ContractError::access_denied);
    if (a.state != AuctionState::closed) return fail(ContractError::bad_state);
    if (!is_valid_bssid(c.bssid)) return fail(ContractError::malformed_bssid);

    a.state = AuctionState::deployed;
    a.bssid = c.bssid;
    a.charging = ChargingRecord{ctx.block_timestamp, a.bids[*a.winner].price, std::nullopt};

    ByteWriter w;
    w.u64(a.auction_id).str(c.bssid);
    return CallOutcome{ContractError::ok,
                       {make_event(EventKind::deployment_confirmed, a.auction_id, std::move(w), ctx)}};
}

CallOutcome FederationState::on(const OpenChannel& c, const CallContext& ctx, const KeyRing&) {
    if (c.auction_id >= auctions_.size()) return fail(ContractError::unknown_auction);
    auto& a = auctions_[c.auction_id];
    if (a.consumer != ctx.caller) return fail(ContractError::access_denied);
    if (a.state != AuctionState::deployed) return fail(ContractError::bad_state);
    if (a.charging->channel_id) return fail(ContractError::channel_exists);

    ChannelState ch;
    ch.channel_id = channels_.size();
    ch.auction_id = a.auction_id;
    ch.consumer = a.consumer;
    ch.provider = a.bids[*a.winner].provider;
    ch.deposit = c.deposit;
    channels_.push_back(ch);
    a.charging->channel_id = ch.channel_id;

    ByteWriter w;
    w.u64(ch.channel_id).u64(ch.auction_id).u64(ch.deposit);
    return CallOutcome{ContractError::ok, {make_event(EventKind::channel_opened, a.auction_id, std::move(w), ctx)}};
}

CallOutcome FederationState::on(const CloseChannel& c, const CallContext& ctx, const KeyRing& keys) {
    if (c.channel_id >= channels_.size() || c.update.channel_id != c.channel_id)
        return fail(ContractError::unknown_channel);
    auto& ch = channels_[c.channel_id];
    if (ctx.caller != ch.consumer && ctx.caller != ch.provider) return fail(ContractError::access_denied);
    if (ch.status == ChannelStatus::closed) return fail(ContractError::already_closed);
    if (!keys.verify(ch.consumer, c.update.signing_bytes(), c.update.signature))
        return fail(ContractError::bad_signature);
    if (c.update.seq == 0) return fail(ContractError::stale_update);
    if (c.update.balance_to_provider > ch.deposit) return fail(ContractError::over_deposit);

    Settlement s{c.update.balance_to_provider, ch.deposit - c.update.balance_to_provider};
    ch.status = ChannelStatus::closed;
    ch.settled = s;

    ByteWriter w;
    w.u64(ch.channel_id).u64(s.payout).u64(s.refund);
    return CallOutcome{ContractError::ok, {make_event(EventKind::channel_closed, ch.auction_id, std::move(w), ctx)}};
}

Result<Bid> FederationState::get_bid(std::uint64_t auction_id, std::uint32_t bid_index, const Address& caller) const {
    const auto* a = find_auction(auction_id);
    if (a == nullptr) return ContractError::unknown_auction;
    if (a->consumer != caller) return ContractError::access_denied;
    if (bid_index >= a->bids.size()) return ContractError::bad_index;
    return a->bids[bid_index];
}

Result<DeploymentView> FederationState::get_deployment_info(std::uint64_t auction_id, const Address& caller) const {
    const auto* a = find_auction(auction_id);
    if (a == nullptr) return ContractError::unknown_auction;
    if (a->state == AuctionState::open) return ContractError::auction_not_closed;
    if (a->bids[*a->winner].provider != caller) return ContractError::access_denied;
    return deployment_view(*a->deployment_info, a->requirements.trust_mode);
}

Bytes FederationState::serialize() const {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(domains_.size()));
    for (const auto& d : domains_) {
        w.address(d.address).str(d.name);
        encode(w, d.footprint);
        w.u64(d.registered_at);
    }
    w.u32(static_cast<std::uint32_t>(auctions_.size()));
    for (const auto& a : auctions_) {
        w.u64(a.auction_id).address(a.consumer);
        encode(w, a.requirements);
        w.u8(static_cast<std::uint8_t>(a.state));
        w.u32(static_cast<std::uint32_t>(a.bids.size()));
        for (const auto& b : a.bids) w.address(b.provider).u64(b.price).u32(b.bid_index);
        encode_optional(w, a.winner, [&](std::uint32_t v) { w.u32(v); });
        encode_optional(w, a.deployment_info, [&](const DeploymentInfo& v) { encode(w, v); });
        encode_optional(w, a.bssid, [&](const std::string& v) { w.str(v); });
        encode_optional(w, a.charging, [&](const ChargingRecord& v) {
            w.u64(v.started_at).u64(v.rate);
            encode_optional(w, v.channel_id, [&](std::uint64_t id) { w.u64(id); });
        });
    }
    w.u32(static_cast<std::uint32_t>(channels_.size()));
    for (const auto& ch : channels_) {
        w.u64(ch.channel_id).u64(ch.auction_id).address(ch.consumer).address(ch.provider).u64(ch.deposit);
        w.u8(static_cast<std::uint8_t>(ch.status));
        encode_optional(w, ch.settled, [&](const Settlement& s) { w.u64(s.payout).u64(s.refund); });
    }
    return std::move(w).take();
}

} // namespace dltfed
