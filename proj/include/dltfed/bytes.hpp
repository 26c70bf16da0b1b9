#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dltfed {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Virtual time in integer milliseconds.
using TimeMs = std::uint64_t;

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    static Digest zero() { return {}; }
    bool is_zero() const;
    std::string hex() const;
    auto operator<=>(const Digest&) const = default;
};

/// 20-byte account identifier; ordered bytewise.
struct Address {
    std::array<std::uint8_t, 20> bytes{};

    std::string hex() const;
    /// Deterministic address for a named simulation participant.
    static Address from_name(std::string_view name);
    static Address from_hex(std::string_view hex);
    auto operator<=>(const Address&) const = default;
};

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Canonical big-endian, length-prefixed encoder shared by every digest in the system.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& f64(double v);
    ByteWriter& boolean(bool v) { return u8(v ? 1 : 0); }
    ByteWriter& raw(ByteView data);
    ByteWriter& bytes(ByteView data);
    ByteWriter& str(std::string_view s);
    ByteWriter& digest(const Digest& d) { return raw(d.bytes); }
    ByteWriter& address(const Address& a) { return raw(a.bytes); }

    const Bytes& data() const& { return buf_; }
    Bytes&& take() && { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    bool boolean();
    Bytes bytes();
    std::string str();
    Digest digest();
    Address address();

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    ByteView take(std::size_t n);

    ByteView data_;
    std::size_t pos_ = 0;
};

} // namespace dltfed
