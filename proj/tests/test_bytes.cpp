#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dltfed/block.hpp"
#include "dltfed/crypto.hpp"

#include <random>

using namespace dltfed;

TEST_CASE("sha256 and hmac match published vectors") {
    CHECK(sha256(std::string_view("abc")).hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    // RFC 4231, test case 2
    const std::string key = "Jefe";
    const std::string msg = "what do ya want for nothing?";
    auto mac = hmac_sha256(ByteView(reinterpret_cast<const std::uint8_t*>(key.data()), key.size()),
                           ByteView(reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size()));
    CHECK(mac.hex() == "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("canonical integers are big-endian fixed width; byte strings are length-prefixed") {
    ByteWriter w;
    w.u8(0xab).u32(0x01020304).u64(0x0102030405060708ULL).str("hi");
    CHECK(to_hex(w.data()) == "ab" "01020304" "0102030405060708" "00000002" "6869");

    ByteReader r(w.data());
    CHECK(r.u8() == 0xab);
    CHECK(r.u32() == 0x01020304);
    CHECK(r.u64() == 0x0102030405060708ULL);
    CHECK(r.str() == "hi");
    CHECK(r.done());
    CHECK_THROWS_AS(r.u8(), DecodeError);
}

TEST_CASE("addresses are 20 bytes, ordered bytewise, and hex-renderable") {
    auto a = Address::from_name("alice");
    CHECK(a.hex() == "0x010112ca21b9e9dea09cdf3142f72ba52cf04fba");
    CHECK(Address::from_hex(a.hex()) == a);
    CHECK_THROWS_AS(Address::from_hex("0x0102"), DecodeError);

    Address lo, hi;
    hi.bytes[19] = 1;
    CHECK(lo < hi);
    lo.bytes[0] = 1;
    CHECK(hi < lo);
}

TEST_CASE("keyring signatures verify only for the signer and the exact message") {
    KeyRing keys;
    auto a = Address::from_name("a"), b = Address::from_name("b");
    keys.add(a, "a", 1);
    keys.add(b, "b", 1);
    Bytes msg{1, 2, 3};
    auto sig = keys.sign(a, msg);
    CHECK(keys.verify(a, msg, sig));
    CHECK_FALSE(keys.verify(b, msg, sig));
    msg[0] ^= 1;
    CHECK_FALSE(keys.verify(a, msg, sig));
    CHECK_FALSE(keys.verify(Address::from_name("nobody"), msg, sig));
}

namespace {

ContractCall random_call(std::mt19937_64& rng) {
    auto pick = [&](std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); };
    auto text = [&] {
        std::string s(pick(12), 'a');
        for (auto& c : s) c = static_cast<char>('a' + pick(26));
        return s;
    };
    auto interval = [&] {
        double lo = static_cast<double>(pick(1000)) / 4;
        return Interval{lo, lo + 1 + static_cast<double>(pick(100))};
    };
    switch (pick(7)) {
    case 0: {
        RegisterDomain c{text(), {}};
        for (auto n = pick(3); n > 0; --n) c.footprint.push_back(interval());
        return c;
    }
    case 1:
        return AnnounceService{Requirements{text(), interval(), 1 + pick(100), static_cast<TrustMode>(pick(2))}};
    case 2:
        return PlaceBid{pick(5), pick(1'000'000)};
    case 3: {
        ChooseProvider c{pick(5), static_cast<std::uint32_t>(pick(8)), {text(), text(), {text(), text(), {}}}};
        for (auto n = pick(3); n > 0; --n) c.deployment_info.trusted.extra_endpoints.push_back(text());
        return c;
    }
    case 4:
        return ConfirmDeployment{pick(5), text()};
    case 5:
        return OpenChannel{pick(5), pick(100000)};
    default: {
        CloseChannel c{pick(5), ChannelUpdate{pick(5), pick(10), pick(1000), Bytes(pick(40), 0x5a)}};
        return c;
    }
    }
}

} // namespace

TEST_CASE("property: transactions and blocks decode to what was encoded") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        Block b;
        b.height = rng() % 100;
        b.timestamp = rng() % 1'000'000;
        b.parent_hash = sha256(std::to_string(trial));
        if (trial % 3 == 1) b.seal = PoASeal{Bytes(32, static_cast<std::uint8_t>(trial))};
        if (trial % 3 == 2) b.seal = PoWSeal{rng(), sha256("w")};
        for (auto n = rng() % 4; n > 0; --n)
            b.txs.push_back(Transaction::make(Address::from_name(std::to_string(rng() % 5)), rng() % 9,
                                              random_call(rng), rng() % 5000));
        ByteWriter w;
        encode_block(w, b);
        ByteReader r(w.data());
        auto decoded = decode_block(r);
        REQUIRE(r.done());
        CHECK(decoded == b);
        CHECK(decoded.hash() == b.hash());
    }
}
