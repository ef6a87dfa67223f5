#include "camray/raster.hpp"

#include "camray/geometry.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace camray {

namespace {

void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

std::uint32_t get_u32(const std::uint8_t *p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr size_t kHeaderSize = 8 + 4 * 4;

}  // namespace

std::vector<std::uint8_t> encode_raster(const Raster &r) {
    const size_t count = static_cast<size_t>(r.height) * r.width * r.channels;
    if (r.data.size() != count) {
        throw InputError("raster payload size does not match its dimensions");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + count * 4);
    for (char c : kRasterMagic) {
        out.push_back(static_cast<std::uint8_t>(c));
    }
    put_u32(out, kRasterVersion);
    put_u32(out, r.height);
    put_u32(out, r.width);
    put_u32(out, r.channels);
    for (float f : r.data) {
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

Raster decode_raster(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kRasterMagic, 8) != 0) {
        throw InputError("not a CRAYRAST file (bad magic)");
    }
    const std::uint8_t *p = bytes.data() + 8;
    if (get_u32(p) != kRasterVersion) {
        throw InputError("unsupported CRAYRAST version " + std::to_string(get_u32(p)));
    }
    Raster r;
    r.height = get_u32(p + 4);
    r.width = get_u32(p + 8);
    r.channels = get_u32(p + 12);
    const size_t count = static_cast<size_t>(r.height) * r.width * r.channels;
    if (bytes.size() != kHeaderSize + count * 4) {
        throw InputError("CRAYRAST payload length mismatch");
    }
    r.data.resize(count);
    const std::uint8_t *payload = bytes.data() + kHeaderSize;
    for (size_t i = 0; i < count; ++i) {
        r.data[i] = std::bit_cast<float>(get_u32(payload + 4 * i));
    }
    return r;
}

void write_raster(const std::filesystem::path &path, const Raster &r) {
    const auto bytes = encode_raster(r);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InputError("cannot open " + path.string() + " for writing");
    }
    f.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Raster read_raster(const std::filesystem::path &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw InputError("cannot open raster " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return decode_raster(bytes);
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace camray
