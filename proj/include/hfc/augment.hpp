#pragma once

#include <cstdint>

#include "hfc/tensor.hpp"

namespace hfc {

// Train-split augmentation knobs. All default to no-ops.
struct AugmentOps {
    double horizontal_flip_p = 0.0;   // in [0,1]
    double brightness_jitter = 0.0;   // delta in [0,0.5]; one shift per image
    int random_crop_pad = 0;          // pad k on each side, crop back at a random offset

    bool operator==(const AugmentOps&) const = default;
};

// Applies flip, crop-pad, brightness in that order. Four RNG draws are
// consumed per call regardless of which ops are enabled, so a replayed
// stream predicts the output exactly. Output stays in [0,1].
Tensor<float> augment(const Tensor<float>& chw, const AugmentOps& ops, uint64_t seed);

} // namespace hfc
