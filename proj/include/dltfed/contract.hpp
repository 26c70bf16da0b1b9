#pragma once

// Federation contract: registry, single-blinded reverse auction, access-controlled
// deployment info, deployment confirmation and micropayment channels.
//
// Execution is a deterministic state machine. Every mutating call either succeeds
// entirely or leaves the state untouched and reports an error code.

#include "dltfed/bytes.hpp"
#include "dltfed/crypto.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dltfed {

/// Half-open interval [lo, hi) on the scenario path, in meters.
struct Interval {
    double lo = 0;
    double hi = 0;

    bool well_formed() const { return lo < hi; }
    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x < hi; }
    bool covers(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
    auto operator<=>(const Interval&) const = default;
};

using ServiceFootprint = std::vector<Interval>;

enum class TrustMode : std::uint8_t { untrusty = 0, trusty = 1 };

struct Requirements {
    std::string service_descriptor_id;
    Interval coverage_target;
    TimeMs max_latency = 0;
    TrustMode trust_mode = TrustMode::untrusty;

    bool operator==(const Requirements&) const = default;
};

struct DomainRecord {
    Address address;
    std::string name;
    ServiceFootprint footprint;
    std::uint64_t registered_at = 0; // block height

    bool operator==(const DomainRecord&) const = default;
};

struct Bid {
    Address provider;
    std::uint64_t price = 0; // currency units per hour
    std::uint32_t bid_index = 0;

    bool operator==(const Bid&) const = default;
};

/// Extra fields released only under trusty communication.
struct TrustedDetails {
    std::string resource_db_ref;
    std::string storage_ref;
    std::vector<std::string> extra_endpoints;

    bool operator==(const TrustedDetails&) const = default;
};

/// What the consumer stores at close time. The winner sees `view(trust_mode)`.
struct DeploymentInfo {
    std::string descriptor_id;
    std::string consumer_endpoint; // host:port
    TrustedDetails trusted;

    bool operator==(const DeploymentInfo&) const = default;
};

struct DeploymentView {
    std::string descriptor_id;
    std::string consumer_endpoint;
    std::optional<TrustedDetails> trusted;

    bool operator==(const DeploymentView&) const = default;
};

DeploymentView deployment_view(const DeploymentInfo& info, TrustMode mode);

enum class AuctionState : std::uint8_t { open = 0, closed = 1, deployed = 2 };

struct ChargingRecord {
    TimeMs started_at = 0;
    std::uint64_t rate = 0; // units per hour
    std::optional<std::uint64_t> channel_id;

    bool operator==(const ChargingRecord&) const = default;
};

struct Auction {
    std::uint64_t auction_id = 0;
    Address consumer; // stored, never emitted
    Requirements requirements;
    AuctionState state = AuctionState::open;
    std::vector<Bid> bids;
    std::optional<std::uint32_t> winner;
    std::optional<DeploymentInfo> deployment_info;
    std::optional<std::string> bssid;
    std::optional<ChargingRecord> charging;

    bool operator==(const Auction&) const = default;
};

enum class ChannelStatus : std::uint8_t { open = 0, closed = 1 };

struct Settlement {
    std::uint64_t payout = 0; // to provider
    std::uint64_t refund = 0; // to consumer

    bool operator==(const Settlement&) const = default;
};

struct ChannelState {
    std::uint64_t channel_id = 0;
    std::uint64_t auction_id = 0;
    Address consumer;
    Address provider;
    std::uint64_t deposit = 0;
    ChannelStatus status = ChannelStatus::open;
    std::optional<Settlement> settled;

    bool operator==(const ChannelState&) const = default;
};

/// Off-chain balance update, signed by the channel's consumer.
struct ChannelUpdate {
    std::uint64_t channel_id = 0;
    std::uint64_t seq = 0;
    std::uint64_t balance_to_provider = 0;
    Bytes signature;

    Bytes signing_bytes() const;
    bool operator==(const ChannelUpdate&) const = default;
};

ChannelUpdate sign_channel_update(const KeyRing& keys, const Address& consumer, std::uint64_t channel_id,
                                  std::uint64_t seq, std::uint64_t balance_to_provider);

// Contract calls (one per transaction).

struct RegisterDomain {
    std::string name;
    ServiceFootprint footprint;
    bool operator==(const RegisterDomain&) const = default;
};
struct AnnounceService {
    Requirements requirements;
    bool operator==(const AnnounceService&) const = default;
};
struct PlaceBid {
    std::uint64_t auction_id = 0;
    std::uint64_t price = 0;
    bool operator==(const PlaceBid&) const = default;
};
struct ChooseProvider {
    std::uint64_t auction_id = 0;
    std::uint32_t bid_index = 0;
    DeploymentInfo deployment_info;
    bool operator==(const ChooseProvider&) const = default;
};
struct ConfirmDeployment {
    std::uint64_t auction_id = 0;
    std::string bssid;
    bool operator==(const ConfirmDeployment&) const = default;
};
struct OpenChannel {
    std::uint64_t auction_id = 0;
    std::uint64_t deposit = 0;
    bool operator==(const OpenChannel&) const = default;
};
struct CloseChannel {
    std::uint64_t channel_id = 0;
    ChannelUpdate update;
    bool operator==(const CloseChannel&) const = default;
};

using ContractCall =
    std::variant<RegisterDomain, AnnounceService, PlaceBid, ChooseProvider, ConfirmDeployment, OpenChannel, CloseChannel>;

std::string call_name(const ContractCall& call);
void encode_call(ByteWriter& w, const ContractCall& call);
ContractCall decode_call(ByteReader& r);

/// Stable wire codes; see docs/error_codes.md.
enum class ContractError : std::uint8_t {
    ok = 0,
    already_registered = 1,
    not_registered = 2,
    unknown_auction = 3,
    auction_not_open = 4,
    self_bid = 5,
    duplicate_bid = 6,
    access_denied = 7,
    bad_index = 8,
    auction_not_closed = 9,
    bad_state = 10,
    malformed_bssid = 11,
    channel_exists = 12,
    unknown_channel = 13,
    bad_signature = 14,
    over_deposit = 15,
    already_closed = 16,
    invalid_argument = 17,
    stale_update = 18,
    time_before_start = 19,
};

std::string_view error_name(ContractError e);

enum class EventKind : std::uint8_t {
    domain_registered = 1,
    announcement_broadcast = 2,
    new_bid = 3,
    winner_chosen = 4,
    deployment_confirmed = 5,
    channel_opened = 6,
    channel_closed = 7,
};

std::string_view event_name(EventKind k);

struct ContractEvent {
    EventKind kind{};
    std::optional<std::uint64_t> auction_id;
    Bytes payload; // canonical bytes, see docs/serialization.md
    std::uint64_t block_height = 0;

    bool operator==(const ContractEvent&) const = default;
};

void encode_event(ByteWriter& w, const ContractEvent& e);
ContractEvent decode_event(ByteReader& r);

struct AnnouncementPayload {
    std::uint64_t auction_id = 0;
    Requirements requirements;
};
struct NewBidPayload {
    std::uint64_t auction_id = 0;
    std::uint32_t bid_index = 0;
};
struct DeploymentConfirmedPayload {
    std::uint64_t auction_id = 0;
    std::string bssid;
};
struct ChannelOpenedPayload {
    std::uint64_t channel_id = 0;
    std::uint64_t auction_id = 0;
    std::uint64_t deposit = 0;
};
struct ChannelClosedPayload {
    std::uint64_t channel_id = 0;
    Settlement settlement;
};

AnnouncementPayload parse_announcement(const ContractEvent& e);
NewBidPayload parse_new_bid(const ContractEvent& e);
std::uint64_t parse_winner_chosen(const ContractEvent& e);
DeploymentConfirmedPayload parse_deployment_confirmed(const ContractEvent& e);
ChannelOpenedPayload parse_channel_opened(const ContractEvent& e);
ChannelClosedPayload parse_channel_closed(const ContractEvent& e);

/// Either a value or a contract error code.
template <typename T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}
    Result(ContractError e) : error_(e) {}

    bool ok() const { return error_ == ContractError::ok; }
    explicit operator bool() const { return ok(); }
    ContractError error() const { return error_; }
    const T& value() const& { return *value_; }
    const T& operator*() const& { return *value_; }
    const T* operator->() const { return &*value_; }

private:
    std::optional<T> value_;
    ContractError error_ = ContractError::ok;
};

struct CallContext {
    Address caller;
    std::uint64_t block_height = 0;
    TimeMs block_timestamp = 0;
};

struct CallOutcome {
    ContractError status = ContractError::ok;
    std::vector<ContractEvent> events;
};

bool is_valid_bssid(std::string_view bssid);

/// Floor of rate * elapsed / 1h. Errors with time_before_start if `now` precedes the record.
Result<std::uint64_t> accrued_charge(const ChargingRecord& record, TimeMs now);

class FederationState {
public:
    /// Executes one call. On error the state is unchanged and no events are emitted.
    CallOutcome execute(const ContractCall& call, const CallContext& ctx, const KeyRing& keys);

    Result<Bid> get_bid(std::uint64_t auction_id, std::uint32_t bid_index, const Address& caller) const;
    Result<DeploymentView> get_deployment_info(std::uint64_t auction_id, const Address& caller) const;

    const std::vector<DomainRecord>& domains() const { return domains_; }
    const std::vector<Auction>& auctions() const { return auctions_; }
    const std::vector<ChannelState>& channels() const { return channels_; }
    const DomainRecord* find_domain(const Address& a) const;
    const Auction* find_auction(std::uint64_t id) const;
    const ChannelState* find_channel(std::uint64_t id) const;

    /// Canonical serialization of the full contract storage.
    Bytes serialize() const;

    bool operator==(const FederationState&) const = default;

private:
    CallOutcome on(const RegisterDomain& c, const CallContext& ctx, const KeyRing& keys);
    CallOutcome on(const AnnounceService& c, const CallContext& ctx, const KeyRing& keys);
    CallOutcome on(const PlaceBid& c, const CallContext& ctx, const KeyRing& keys);
    CallOutcome on(const ChooseProvider& c, const CallContext& ctx, const KeyRing& keys);
    CallOutcome on(const ConfirmDeployment& c, const CallContext& ctx, const KeyRing& keys);
    CallOutcome on(const OpenChannel& c, const CallContext& ctx, const KeyRing& keys);
    CallOutcome on(const CloseChannel& c, const CallContext& ctx, const KeyRing& keys);

    bool registered(const Address& a) const { return domain_index_.contains(a); }

    std::vector<DomainRecord> domains_;
    std::map<Address, std::size_t> domain_index_;
    std::vector<Auction> auctions_;
    std::vector<ChannelState> channels_;
};

} // namespace dltfed
