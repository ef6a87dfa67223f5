#pragma once

#include "camray/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace camray {

/// Images are Rasters with intensities in [0, 1].

/// Bilinear sample at continuous pixel position (x, y) measured in pixel-center units
/// (pixel (c, r) sits at x = c, y = r). Columns wrap around, rows clamp.
void sample_wrap_x(const Raster &img, double x, double y, float *out);

/// Same with both axes clamped to the image.
void sample_clamped(const Raster &img, double x, double y, float *out);

/// 8-bit PNG with 1, 3 or 4 channels. Values are rounded from [0, 1].
void write_png(const std::filesystem::path &path, const Raster &img);
/// Reads gray, gray+alpha, RGB or RGBA PNGs (8 or 16 bit) into a [0, 1] raster.
Raster read_png(const std::filesystem::path &path);

/// 0/1 mask as an 8-bit single-channel PNG (0 or 255).
void write_mask_png(const std::filesystem::path &path, const std::vector<std::uint8_t> &mask, int width, int height);

}  // namespace camray
