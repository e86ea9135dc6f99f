#include "pcaret/wire.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <memory>

namespace pcaret::wire {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::unique_ptr<std::FILE, decltype(&std::fclose)> f(std::fopen(path.c_str(), "rb"),
                                                         &std::fclose);
    if (!f) {
        throw DataError("cannot open " + path);
    }
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof(buf), f.get())) > 0) {
        out.insert(out.end(), buf, buf + n);
    }
    if (std::ferror(f.get())) {
        throw DataError("read error on " + path);
    }
    return out;
}

void write_file_atomic(const std::string& path, std::span<const std::uint8_t> data) {
    std::string tmp = path + ".tmp";
    {
        std::unique_ptr<std::FILE, decltype(&std::fclose)> f(std::fopen(tmp.c_str(), "wb"),
                                                             &std::fclose);
        if (!f) {
            throw DataError("cannot create " + tmp);
        }
        if (!data.empty() && std::fwrite(data.data(), 1, data.size(), f.get()) != data.size()) {
            throw DataError("write error on " + tmp);
        }
        if (std::fflush(f.get()) != 0) {
            throw DataError("flush error on " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("cannot rename " + tmp + " to " + path + ": " + ec.message());
    }
}

std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
                  static_cast<uInt>(data.size()));
    return static_cast<std::uint32_t>(crc);
}

} // namespace pcaret::wire
