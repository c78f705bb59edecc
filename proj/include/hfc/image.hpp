#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hfc/tensor.hpp"

namespace hfc {

// 8-bit RGB image, row-major HWC.
struct ImageU8 {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb;

    int64_t pixel_count() const { return static_cast<int64_t>(width) * height; }
};

// PNG is the only supported ingestion format. Decoding normalizes palette,
// grayscale, 16-bit and alpha variants down to 8-bit RGB.
ImageU8 read_png(const std::string& path);
void write_png(const std::string& path, const ImageU8& image);

ImageU8 resize_nearest(const ImageU8& image, int width, int height);

// HWC u8 -> CHW float in [0,1].
Tensor<float> to_chw_float(const ImageU8& image);

// Decode + nearest-neighbor resize to (C,H,W) with values in [0,1].
// target_shape is {channels, height, width}; channels must be 3.
Tensor<float> load_image(const std::string& path, const std::array<int, 3>& target_shape);

} // namespace hfc
