#pragma once

#include "saepipe/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

// Little-endian binary stream helpers shared by every file format in the
// project. Writers compose bytes explicitly so output is identical on any
// host; readers track the byte offset so truncation errors can name it.

namespace saepipe {

class BinWriter {
public:
    explicit BinWriter(const std::filesystem::path& path)
        : out_(path, std::ios::binary | std::ios::trunc), path_(path.string()) {
        if (!out_) throw io_error("cannot open '" + path_ + "' for writing");
    }

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out_) throw io_error("write failed on '" + path_ + "'");
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) { put_le(v); }
    void u32(std::uint32_t v) { put_le(v); }
    void i32(std::int32_t v) { put_le(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v) { put_le(v); }
    void f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
    void magic(std::string_view m) { bytes(m.data(), m.size()); }

    void close() {
        out_.close();
        if (!out_) throw io_error("close failed on '" + path_ + "'");
    }

private:
    template <typename T>
    void put_le(T v) {
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i)
            buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
        bytes(buf, sizeof(T));
    }
    std::ofstream out_;
    std::string path_;
};

class BinReader {
public:
    explicit BinReader(const std::filesystem::path& path)
        : in_(path, std::ios::binary), path_(path.string()) {
        if (!in_) throw io_error("cannot open '" + path_ + "' for reading");
    }

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw corruption_error("unexpected end of file in '" + path_ + "'",
                                   offset_ + static_cast<std::uint64_t>(in_.gcount()));
        offset_ += n;
    }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
    std::uint16_t u16() { return get_le<std::uint16_t>(); }
    std::uint32_t u32() { return get_le<std::uint32_t>(); }
    std::int32_t i32() { return static_cast<std::int32_t>(get_le<std::uint32_t>()); }
    std::uint64_t u64() { return get_le<std::uint64_t>(); }
    float f32() { return std::bit_cast<float>(get_le<std::uint32_t>()); }
    double f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

    std::string str(std::size_t n) {
        std::string s(n, '\0');
        if (n) bytes(s.data(), n);
        return s;
    }

    // Consumes |expected| bytes and checks them against the format magic.
    void expect_magic(std::string_view expected, std::string_view format_name) {
        std::string got = str(expected.size());
        if (got != expected)
            throw format_error("'" + path_ + "' is not a " + std::string(format_name) +
                               " file (bad magic)");
    }

    bool at_eof() { return in_.peek() == std::char_traits<char>::eof(); }
    std::uint64_t offset() const { return offset_; }
    const std::string& path() const { return path_; }

private:
    template <typename T>
    T get_le() {
        unsigned char buf[sizeof(T)];
        bytes(buf, sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<T>(buf[i]) << (8 * i));
        return v;
    }
    std::ifstream in_;
    std::string path_;
    std::uint64_t offset_ = 0;
};

} // namespace saepipe
