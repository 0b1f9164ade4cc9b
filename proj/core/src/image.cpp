#include "vqloc/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

#include "vqloc/error.hpp"

namespace vqloc {

std::vector<double> to_grayscale(const Image& image) {
    std::vector<double> gray(static_cast<std::size_t>(image.width) * image.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const auto* p = image.rgb.data() + i * 3;
        gray[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
    }
    return gray;
}

Image resample_crop(const Image& src, const BBox& crop, int width, int height) {
    Image out(width, height);
    const double sx = crop.w / width;
    const double sy = crop.h / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp(crop.y + (y + 0.5) * sy - 0.5, 0.0, src.height - 1.0);
        const int y0 = static_cast<int>(std::floor(fy));
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double ty = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp(crop.x + (x + 0.5) * sx - 0.5, 0.0, src.width - 1.0);
            const int x0 = static_cast<int>(std::floor(fx));
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double tx = fx - x0;
            auto* dst = out.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                const double top = (1 - tx) * src.pixel(x0, y0)[c] + tx * src.pixel(x1, y0)[c];
                const double bot = (1 - tx) * src.pixel(x0, y1)[c] + tx * src.pixel(x1, y1)[c];
                dst[c] = static_cast<std::uint8_t>(std::clamp(std::lround((1 - ty) * top + ty * bot), 0L, 255L));
            }
        }
    }
    return out;
}

void draw_box(Image& image, const BBox& box, Rgb color, int thickness) {
    const int x0 = static_cast<int>(std::floor(box.x));
    const int y0 = static_cast<int>(std::floor(box.y));
    const int x1 = static_cast<int>(std::ceil(box.right())) - 1;
    const int y1 = static_cast<int>(std::ceil(box.bottom())) - 1;
    auto put = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= image.width || y >= image.height) return;
        std::copy(color.begin(), color.end(), image.pixel(x, y));
    };
    for (int t = 0; t < thickness; ++t) {
        for (int x = x0 - t; x <= x1 + t; ++x) {
            put(x, y0 - t);
            put(x, y1 + t);
        }
        for (int y = y0 - t; y <= y1 + t; ++y) {
            put(x0 - t, y);
            put(x1 + t, y);
        }
    }
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image read_png(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw InputError("cannot open image " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("libpng initialization failed");
    }
    Image img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG " + path.string());
    }
    png_init_io(png, f.get());
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    img = Image(static_cast<int>(png_get_image_width(png, info)), static_cast<int>(png_get_image_height(png, info)));
    rows.resize(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) rows[static_cast<std::size_t>(y)] = img.pixel(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::filesystem::path& path, const Image& image) {
    auto tmp = path;
    tmp += ".tmp";
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) throw InputError("cannot write image " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng initialization failed");
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("failed writing PNG " + path.string());
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y)
        rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(image.pixel(0, y));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fclose(f.release()) != 0) throw Error("failed writing PNG " + path.string());
    std::filesystem::rename(tmp, path);
}

}  // namespace vqloc
