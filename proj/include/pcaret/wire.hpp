#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "pcaret/errors.hpp"

namespace pcaret::wire {

// Little-endian fixed-width serialization helpers shared by all
// on-disk formats.

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { put_le(v); }
    void u32(std::uint32_t v) { put_le(v); }
    void u64(std::uint64_t v) { put_le(v); }
    void f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void text(const std::string& s) {
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

private:
    template <typename T>
    void put_le(T v) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> data, std::string context)
        : data_(data), context_(std::move(context)) {}

    std::uint8_t u8() { return take_le<std::uint8_t>(); }
    std::uint16_t u16() { return take_le<std::uint16_t>(); }
    std::uint32_t u32() { return take_le<std::uint32_t>(); }
    std::uint64_t u64() { return take_le<std::uint64_t>(); }
    float f32() { return std::bit_cast<float>(take_le<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(take_le<std::uint64_t>()); }

    std::span<const std::uint8_t> bytes(std::size_t n) {
        need(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

    // Fails with a truncation diagnostic naming expected vs actual size.
    void need(std::size_t n) const {
        if (remaining() < n) {
            throw DataError(context_ + ": truncated, expected at least " +
                            std::to_string(pos_ + n) + " bytes, file has " +
                            std::to_string(data_.size()));
        }
    }

    void expect_exhausted() const {
        if (remaining() != 0) {
            throw DataError(context_ + ": " + std::to_string(remaining()) +
                            " unexpected trailing bytes (expected " + std::to_string(pos_) +
                            " total, file has " + std::to_string(data_.size()) + ")");
        }
    }

private:
    template <typename T>
    T take_le() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            v = static_cast<T>(v | (static_cast<T>(data_[pos_ + i]) << (8 * i)));
        }
        pos_ += sizeof(T);
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
    std::string context_;
};

// Whole-file helpers. write_file_atomic stages to a sibling temp file
// and renames into place.
std::vector<std::uint8_t> read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::span<const std::uint8_t> data);

std::uint32_t crc32_of(std::span<const std::uint8_t> data);

} // namespace pcaret::wire
