#include "hfc/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "hfc/errors.hpp"

namespace hfc {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

ImageU8 read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IngestionError("cannot open image file: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw IngestionError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IngestionError("png reader allocation failed for: " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IngestionError("png info allocation failed for: " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IngestionError("png decode failed for: " + path);
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IngestionError("unsupported PNG layout (want 8-bit RGB): " + path);
    }

    ImageU8 image;
    image.width = width;
    image.height = height;
    image.rgb.resize(static_cast<size_t>(width) * height * 3);
    std::vector<png_bytep> rows(static_cast<size_t>(height));
    for (int y = 0; y < height; ++y)
        rows[static_cast<size_t>(y)] = image.rgb.data() + static_cast<size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

void write_png(const std::string& path, const ImageU8& image) {
    if (image.width <= 0 || image.height <= 0 ||
        image.rgb.size() != static_cast<size_t>(image.width) * image.height * 3)
        throw ParameterError("write_png: image buffer does not match its dimensions");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IngestionError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IngestionError("png writer allocation failed for: " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IngestionError("png info allocation failed for: " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IngestionError("png encode failed for: " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(static_cast<size_t>(image.height));
    for (int y = 0; y < image.height; ++y)
        rows[static_cast<size_t>(y)] =
            const_cast<png_bytep>(image.rgb.data() + static_cast<size_t>(y) * image.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageU8 resize_nearest(const ImageU8& image, int width, int height) {
    if (width <= 0 || height <= 0) throw ParameterError("resize_nearest: target extents must be positive");
    if (image.width == width && image.height == height) return image;
    ImageU8 out;
    out.width = width;
    out.height = height;
    out.rgb.resize(static_cast<size_t>(width) * height * 3);
    for (int y = 0; y < height; ++y) {
        const int sy = static_cast<int>(static_cast<int64_t>(y) * image.height / height);
        for (int x = 0; x < width; ++x) {
            const int sx = static_cast<int>(static_cast<int64_t>(x) * image.width / width);
            const size_t src = (static_cast<size_t>(sy) * image.width + sx) * 3;
            const size_t dst = (static_cast<size_t>(y) * width + x) * 3;
            out.rgb[dst] = image.rgb[src];
            out.rgb[dst + 1] = image.rgb[src + 1];
            out.rgb[dst + 2] = image.rgb[src + 2];
        }
    }
    return out;
}

Tensor<float> to_chw_float(const ImageU8& image) {
    Tensor<float> t({3, image.height, image.width});
    const int64_t plane = image.pixel_count();
    for (int64_t p = 0; p < plane; ++p)
        for (int c = 0; c < 3; ++c)
            t.data()[c * plane + p] = static_cast<float>(image.rgb[p * 3 + c]) / 255.0f;
    return t;
}

Tensor<float> load_image(const std::string& path, const std::array<int, 3>& target_shape) {
    if (target_shape[0] != 3)
        throw ParameterError("load_image: only 3-channel targets are supported");
    ImageU8 img = read_png(path);
    img = resize_nearest(img, target_shape[2], target_shape[1]);
    return to_chw_float(img);
}

} // namespace hfc
