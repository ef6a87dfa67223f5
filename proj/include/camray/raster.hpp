#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace camray {

/// Float raster stored row-major with interleaved channels.
struct Raster {
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;
    std::vector<float> data;

    Raster() = default;
    Raster(std::uint32_t h, std::uint32_t w, std::uint32_t c, float fill = 0.0f)
        : height(h), width(w), channels(c), data(static_cast<size_t>(h) * w * c, fill) {}

    float &at(std::uint32_t row, std::uint32_t col, std::uint32_t ch) {
        return data[(static_cast<size_t>(row) * width + col) * channels + ch];
    }
    float at(std::uint32_t row, std::uint32_t col, std::uint32_t ch) const {
        return data[(static_cast<size_t>(row) * width + col) * channels + ch];
    }
};

// CRAYRAST layout: "CRAYRAST" | u32 version=1 | u32 height | u32 width | u32 channels |
// f32 payload, all little-endian.
inline constexpr char kRasterMagic[8] = {'C', 'R', 'A', 'Y', 'R', 'A', 'S', 'T'};
inline constexpr std::uint32_t kRasterVersion = 1;

std::vector<std::uint8_t> encode_raster(const Raster &r);
/// Throws InputError on bad magic, version, or payload length.
Raster decode_raster(const std::vector<std::uint8_t> &bytes);

void write_raster(const std::filesystem::path &path, const Raster &r);
Raster read_raster(const std::filesystem::path &path);

}  // namespace camray
