#include "camray/image.hpp"

#include "camray/geometry.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace camray {

namespace {

void blend(const Raster &img, int x0, int x1, int y0, int y1, double fx, double fy, float *out) {
    const double w00 = (1 - fx) * (1 - fy), w10 = fx * (1 - fy), w01 = (1 - fx) * fy, w11 = fx * fy;
    for (std::uint32_t ch = 0; ch < img.channels; ++ch) {
        out[ch] = static_cast<float>(w00 * img.at(y0, x0, ch) + w10 * img.at(y0, x1, ch) + w01 * img.at(y1, x0, ch) +
                                     w11 * img.at(y1, x1, ch));
    }
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

struct FileCloser {
    void operator()(FILE *f) const {
        if (f) std::fclose(f);
    }
};

}  // namespace

void sample_wrap_x(const Raster &img, double x, double y, float *out) {
    const int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
    const double xf = std::floor(x), yf = std::floor(y);
    const double fx = x - xf;
    int y0 = static_cast<int>(yf), y1 = y0 + 1;
    double fy = y - yf;
    if (y0 < 0) {
        y0 = y1 = 0;
        fy = 0.0;
    } else if (y1 > h - 1) {
        y0 = y1 = h - 1;
        fy = 0.0;
    }
    int x0 = static_cast<int>(xf) % w;
    if (x0 < 0) x0 += w;
    const int x1 = (x0 + 1) % w;
    blend(img, x0, x1, y0, y1, fx, fy, out);
}

void sample_clamped(const Raster &img, double x, double y, float *out) {
    const int w = static_cast<int>(img.width), h = static_cast<int>(img.height);
    const double xf = std::floor(x), yf = std::floor(y);
    double fx = x - xf, fy = y - yf;
    int x0 = static_cast<int>(xf), y0 = static_cast<int>(yf);
    int x1 = x0 + 1, y1 = y0 + 1;
    if (x0 < 0 || x1 > w - 1) {
        x0 = x1 = clamp_index(x0 < 0 ? 0 : w - 1, w);
        fx = 0.0;
    }
    if (y0 < 0 || y1 > h - 1) {
        y0 = y1 = clamp_index(y0 < 0 ? 0 : h - 1, h);
        fy = 0.0;
    }
    blend(img, x0, x1, y0, y1, fx, fy, out);
}

void write_png(const std::filesystem::path &path, const Raster &img) {
    int color;
    switch (img.channels) {
        case 1:
            color = PNG_COLOR_TYPE_GRAY;
            break;
        case 3:
            color = PNG_COLOR_TYPE_RGB;
            break;
        case 4:
            color = PNG_COLOR_TYPE_RGBA;
            break;
        default:
            throw InputError("PNG output supports 1, 3 or 4 channels");
    }
    std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) {
        throw InputError("cannot open " + path.string() + " for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw InputError("failed to encode PNG " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, color, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<size_t>(img.width) * img.channels);
    for (std::uint32_t r = 0; r < img.height; ++r) {
        for (std::uint32_t i = 0; i < row.size(); ++i) {
            const float v = img.data[static_cast<size_t>(r) * row.size() + i];
            const float c = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
            row[i] = static_cast<png_byte>(std::lround(c * 255.0f));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Raster read_png(const std::filesystem::path &path) {
    std::unique_ptr<FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
    if (!fp) {
        throw InputError("cannot open PNG " + path.string());
    }
    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw InputError(path.string() + " is not a PNG file");
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("failed to decode PNG " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_packing(png);
    const auto color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);
    Raster img(png_get_image_height(png, info), png_get_image_width(png, info), png_get_channels(png, info));
    std::vector<png_byte> row(png_get_rowbytes(png, info));
    for (std::uint32_t r = 0; r < img.height; ++r) {
        png_read_row(png, row.data(), nullptr);
        for (size_t i = 0; i < static_cast<size_t>(img.width) * img.channels; ++i) {
            img.data[static_cast<size_t>(r) * img.width * img.channels + i] = row[i] / 255.0f;
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_mask_png(const std::filesystem::path &path, const std::vector<std::uint8_t> &mask, int width, int height) {
    Raster r(height, width, 1);
    for (size_t i = 0; i < mask.size() && i < r.data.size(); ++i) {
        r.data[i] = mask[i] ? 1.0f : 0.0f;
    }
    write_png(path, r);
}

}  // namespace camray
