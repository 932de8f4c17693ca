// SPDX-License-Identifier: Apache-2.0
#include "surfhead/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

namespace surfhead {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const
    {
        if (f != nullptr) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

unsigned char quantize8(double v)
{
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::uint16_t quantize16(double v)
{
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

void write_png(const std::string& path, int width, int height, int bit_depth, int color_type,
               const std::vector<png_bytep>& rows)
{
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng error while writing " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

Image load_png(const std::string& path)
{
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng error while reading " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));

    std::vector<unsigned char> data(static_cast<std::size_t>(width) * height * 3);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * width * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(width, height);
    for (std::size_t i = 0; i < data.size(); ++i) {
        img.rgb[i] = static_cast<double>(data[i]) / 255.0;
    }
    return img;
}

void save_png_rgb8(const Image& img, const std::string& path)
{
    std::vector<unsigned char> data(static_cast<std::size_t>(img.width) * img.height * 3);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = quantize8(img.rgb[i]);
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) {
        rows[static_cast<std::size_t>(y)] =
            data.data() + static_cast<std::size_t>(y) * img.width * 3;
    }
    write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

void save_png_gray16(const std::vector<double>& values, int width, int height,
                     const std::string& path)
{
    // PNG stores 16-bit samples big-endian.
    std::vector<unsigned char> data(static_cast<std::size_t>(width) * height * 2);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::uint16_t v = quantize16(values[i]);
        data[i * 2] = static_cast<unsigned char>(v >> 8);
        data[i * 2 + 1] = static_cast<unsigned char>(v & 0xff);
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * width * 2;
    }
    write_png(path, width, height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

void save_png_gray8(const std::vector<double>& values, int width, int height,
                    const std::string& path)
{
    std::vector<unsigned char> data(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < values.size(); ++i) data[i] = quantize8(values[i]);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * width;
    }
    write_png(path, width, height, 8, PNG_COLOR_TYPE_GRAY, rows);
}

void save_buffers(const RenderBuffers& buffers, const std::string& dir, double near, double far)
{
    std::filesystem::create_directories(dir);
    const std::string base = dir + "/";

    save_png_rgb8(buffers_to_image(buffers), base + "color.png");

    Image normal(buffers.width, buffers.height);
    for (int y = 0; y < buffers.height; ++y) {
        for (int x = 0; x < buffers.width; ++x) {
            const Vec3 n = buffers.normal[buffers.index(x, y)];
            for (int c = 0; c < 3; ++c) normal.at(x, y, c) = n[c] * 0.5 + 0.5;
        }
    }
    save_png_rgb8(normal, base + "normal.png");

    std::vector<double> depth(buffers.depth.size());
    const double range = std::max(far - near, 1e-12);
    for (std::size_t i = 0; i < depth.size(); ++i) {
        depth[i] = (buffers.depth[i] - near) / range;
    }
    save_png_gray16(depth, buffers.width, buffers.height, base + "depth.png");

    save_png_gray8(buffers.transmittance, buffers.width, buffers.height,
                   base + "transmittance.png");
}

} // namespace surfhead
