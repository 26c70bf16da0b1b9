#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <numeric>

using namespace dltfed;
using namespace dltfed::test;

TEST_CASE("poa waits for the period boundary, then seals the whole mempool in order") {
    KeyRing keys;
    PoAConfig cfg{addr("sealer"), 1000};
    keys.add(cfg.sealer, "sealer", 1);
    Mempool pool;
    auto genesis = make_genesis();
    auto t1 = Transaction::make(addr("a"), 0, PlaceBid{0, 1}, 10);
    auto t2 = Transaction::make(addr("b"), 0, PlaceBid{0, 2}, 20);
    pool.push(t1);
    pool.push(t2);

    auto early = poa_produce(pool, genesis, cfg, cfg.sealer, keys, 999);
    CHECK(early.status == ProduceStatus::not_yet);
    CHECK(pool.size() == 2);

    auto r = poa_produce(pool, genesis, cfg, cfg.sealer, keys, 1000);
    REQUIRE(r.status == ProduceStatus::produced);
    CHECK(r.block->timestamp == 1000);
    CHECK(r.block->height == 1);
    CHECK(r.block->parent_hash == genesis.hash());
    REQUIRE(r.block->txs.size() == 2);
    CHECK(r.block->txs[0] == t1);
    CHECK(r.block->txs[1] == t2);
    CHECK(pool.empty());
    CHECK(verify_seal(*r.block, cfg, keys).ok);
}

TEST_CASE("poa seals empty blocks on a fixed cadence and refuses other sealers") {
    KeyRing keys;
    PoAConfig cfg{addr("sealer"), 1000};
    keys.add(cfg.sealer, "sealer", 1);
    keys.add(addr("mallory"), "mallory", 1);
    Mempool pool;
    Block head = make_genesis();
    CHECK(poa_produce(pool, head, cfg, addr("mallory"), keys, 1000).status == ProduceStatus::not_sealer);

    std::vector<TimeMs> stamps;
    for (TimeMs now = 0; now <= 5000; now += 250) {
        auto r = poa_produce(pool, head, cfg, cfg.sealer, keys, now);
        if (r.status == ProduceStatus::produced) {
            stamps.push_back(r.block->timestamp);
            head = *r.block;
        }
    }
    CHECK(stamps == std::vector<TimeMs>{1000, 2000, 3000, 4000, 5000});
}

TEST_CASE("poa seal verification rejects off-boundary timestamps and foreign signatures") {
    PoAChainBuilder b;
    b.submit("alice", RegisterDomain{"alice", {{0, 10}}});
    b.seal();
    auto block = b.ledger.head();
    CHECK(verify_seal(block, b.cfg, b.keys).ok);

    auto shifted = block;
    shifted.timestamp += 1;
    CHECK_FALSE(verify_seal(shifted, b.cfg, b.keys).ok);

    auto forged = block;
    b.keys.add(addr("mallory"), "mallory", 3);
    std::get<PoASeal>(forged.seal).signature = b.keys.sign(addr("mallory"), forged.unsealed_header());
    CHECK_FALSE(verify_seal(forged, b.cfg, b.keys).ok);

    auto re_signed = shifted;
    re_signed.timestamp = 1500;
    std::get<PoASeal>(re_signed.seal).signature = b.keys.sign(b.cfg.sealer, re_signed.unsealed_header());
    auto check = verify_seal(re_signed, b.cfg, b.keys);
    CHECK_FALSE(check.ok);
    CHECK(check.reason == "timestamp off period boundary");
}

TEST_CASE("pow targets are powers of two") {
    CHECK_FALSE(pow_target(0).has_value());
    auto t8 = pow_target(8);
    REQUIRE(t8);
    // 2^248 big-endian: byte 0 is 0x01, all others zero.
    Digest expected;
    expected.bytes[0] = 0x01;
    CHECK(*t8 == expected);
    auto t12 = pow_target(12);
    Digest e12;
    e12.bytes[1] = 0x10;
    CHECK(*t12 == e12);

    Digest just_below;
    just_below.bytes.fill(0xff);
    just_below.bytes[0] = 0x00;
    CHECK(meets_target(just_below, 8));
    CHECK_FALSE(meets_target(expected, 8));
}

TEST_CASE("pow with zero difficulty succeeds on the first attempt") {
    PoWConfig cfg{0, 5};
    std::mt19937_64 rng(1);
    auto header = make_genesis().unsealed_header();
    auto r = pow_mine(header, cfg, rng);
    CHECK(r.attempts == 1);
    CHECK(r.duration(cfg) == 5);
}

TEST_CASE("pow mining cost follows a geometric law with mean 2^d") {
    PoWConfig cfg{8, 1};
    auto header = make_genesis().unsealed_header();
    std::uint64_t total = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::mt19937_64 rng(seed);
        total += pow_mine(header, cfg, rng).attempts;
    }
    double mean = static_cast<double>(total) / 1000.0;
    CHECK(mean >= 256 * 0.8);
    CHECK(mean <= 256 * 1.2);
}

TEST_CASE("pow results are reproducible and verified against the configured difficulty") {
    PoWConfig cfg{8, 1};
    Block b;
    b.height = 1;
    b.parent_hash = make_genesis().hash();
    b.timestamp = 77;
    b.seal = PoWSeal{};
    auto header = b.unsealed_header();

    std::mt19937_64 r1(42), r2(42);
    auto m1 = pow_mine(header, cfg, r1);
    auto m2 = pow_mine(header, cfg, r2);
    CHECK(m1.attempts == m2.attempts);
    CHECK(m1.nonce == m2.nonce);

    b.seal = PoWSeal{m1.nonce, m1.work_digest};
    CHECK(verify_seal(b, cfg, KeyRing{}).ok);
    CHECK(verify_seal(b, PoWConfig{16, 1}, KeyRing{}).ok == meets_target(m1.work_digest, 16));

    auto tampered = b;
    std::get<PoWSeal>(tampered.seal).nonce += 1;
    CHECK_FALSE(verify_seal(tampered, cfg, KeyRing{}).ok);
}

TEST_CASE("engine validation rejects out-of-range parameters") {
    CHECK_THROWS_AS(validate(PoAConfig{addr("s"), 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PoWConfig{33, 1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PoWConfig{8, 0}), std::invalid_argument);
    CHECK_NOTHROW(validate(PoWConfig{32, 1}));
    CHECK_NOTHROW(validate(PoAConfig{addr("s"), 1}));
}
