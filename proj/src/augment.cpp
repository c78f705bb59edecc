#include "hfc/augment.hpp"

#include <algorithm>
#include <string>

#include "hfc/errors.hpp"
#include "hfc/rng.hpp"

namespace hfc {

Tensor<float> augment(const Tensor<float>& chw, const AugmentOps& ops, uint64_t seed) {
    if (chw.rank() != 3) throw DimensionError("augment expects a CHW tensor");
    const int C = chw.dim(0), H = chw.dim(1), W = chw.dim(2);
    if (ops.horizontal_flip_p < 0.0 || ops.horizontal_flip_p > 1.0)
        throw ParameterError("horizontal_flip_p must lie in [0,1]");
    if (ops.brightness_jitter < 0.0 || ops.brightness_jitter > 0.5)
        throw ParameterError("brightness_jitter must lie in [0,0.5]");
    if (ops.random_crop_pad < 0 || ops.random_crop_pad >= std::min(H, W) / 2)
        throw ParameterError("random_crop_pad must satisfy 0 <= k < min(H,W)/2, got " +
                             std::to_string(ops.random_crop_pad));

    Rng rng(seed);
    const double coin = rng.uniform();
    const int k = ops.random_crop_pad;
    const int dy = k > 0 ? rng.uniform_int(2 * k + 1) : (rng.next_u64(), 0);
    const int dx = k > 0 ? rng.uniform_int(2 * k + 1) : (rng.next_u64(), 0);
    const double shift = rng.uniform(-ops.brightness_jitter, ops.brightness_jitter);

    Tensor<float> out = chw;
    const int64_t plane = static_cast<int64_t>(H) * W;

    if (coin < ops.horizontal_flip_p) {
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y) {
                float* row = out.data() + c * plane + static_cast<int64_t>(y) * W;
                std::reverse(row, row + W);
            }
    }

    if (k > 0) {
        // zero-pad k on all sides, then crop HxW at offset (dy,dx)
        Tensor<float> cropped({C, H, W});
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x) {
                    const int sy = y + dy - k;
                    const int sx = x + dx - k;
                    const float v = (sy >= 0 && sy < H && sx >= 0 && sx < W)
                                        ? out.data()[c * plane + static_cast<int64_t>(sy) * W + sx]
                                        : 0.0f;
                    cropped.data()[c * plane + static_cast<int64_t>(y) * W + x] = v;
                }
        out = std::move(cropped);
    }

    if (ops.brightness_jitter > 0.0) {
        const float s = static_cast<float>(shift);
        for (int64_t i = 0; i < out.size(); ++i) out.data()[i] += s;
    }

    for (int64_t i = 0; i < out.size(); ++i)
        out.data()[i] = std::clamp(out.data()[i], 0.0f, 1.0f);
    return out;
}

} // namespace hfc
