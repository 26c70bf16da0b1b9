#include "dltfed/bytes.hpp"

#include "dltfed/crypto.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace dltfed {

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::string to_hex(ByteView data) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (auto b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.starts_with("0x")) hex.remove_prefix(2);
    if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
        out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return out;
}

bool Digest::is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
}

std::string Digest::hex() const { return to_hex(bytes); }

std::string Address::hex() const { return "0x" + to_hex(bytes); }

Address Address::from_name(std::string_view name) {
    auto d = sha256("dltfed-address:" + std::string(name));
    Address a;
    std::copy_n(d.bytes.begin(), a.bytes.size(), a.bytes.begin());
    return a;
}

Address Address::from_hex(std::string_view hex) {
    auto raw = dltfed::from_hex(hex);
    if (raw.size() != 20) throw DecodeError("address must be exactly 20 bytes");
    Address a;
    std::copy(raw.begin(), raw.end(), a.bytes.begin());
    return a;
}

ByteWriter& ByteWriter::u8(std::uint8_t v) {
    buf_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::raw(ByteView data) {
    buf_.insert(buf_.end(), data.begin(), data.end());
    return *this;
}

ByteWriter& ByteWriter::bytes(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    return raw(data);
}

ByteWriter& ByteWriter::str(std::string_view s) {
    return bytes(ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

ByteView ByteReader::take(std::size_t n) {
    if (remaining() < n) throw DecodeError("truncated input");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint32_t ByteReader::u32() {
    std::uint32_t v = 0;
    for (auto b : take(4)) v = v << 8 | b;
    return v;
}

std::uint64_t ByteReader::u64() {
    std::uint64_t v = 0;
    for (auto b : take(8)) v = v << 8 | b;
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

bool ByteReader::boolean() {
    auto v = u8();
    if (v > 1) throw DecodeError("invalid boolean byte");
    return v == 1;
}

Bytes ByteReader::bytes() {
    auto n = u32();
    auto view = take(n);
    return Bytes(view.begin(), view.end());
}

std::string ByteReader::str() {
    auto raw = bytes();
    return std::string(raw.begin(), raw.end());
}

Digest ByteReader::digest() {
    Digest d;
    auto view = take(d.bytes.size());
    std::copy(view.begin(), view.end(), d.bytes.begin());
    return d;
}

Address ByteReader::address() {
    Address a;
    auto view = take(a.bytes.size());
    std::copy(view.begin(), view.end(), a.bytes.begin());
    return a;
}

} // namespace dltfed
