#pragma once

#include <cstdint>
#include <utility>

#include "rearing/chamber/types.hpp"
#include "rearing/core/rng.hpp"
#include "rearing/core/tensor.hpp"

namespace rearing::augment {

struct AugmentParams {
    double crop_scale_min = 0.2;  // area fraction range for the random crop
    double crop_scale_max = 1.0;
    double aspect_min = 3.0 / 4.0;
    double aspect_max = 4.0 / 3.0;
    double flip_prob = 0.5;
    double jitter_prob = 0.8;
    double brightness = 0.4;
    double contrast = 0.4;
    double saturation = 0.4;
    double hue = 0.1;  // fraction of the hue circle

    void validate() const;
};

/// 8-bit frame to float CHW [3,H,W] in [0,1].
Tensor image_to_tensor(const chamber::Image8& img);

/// Random area/aspect crop resized back to the input size with bilinear
/// sampling. Ten proposal attempts, then a center-crop fallback. With
/// crop_scale (1,1) the output equals the input for every draw.
Tensor random_resized_crop(const Tensor& img, Pcg32& rng, const AugmentParams& p);

void horizontal_flip_inplace(Tensor& img);

/// Brightness, contrast, saturation, then hue, each with a factor drawn from
/// the configured strength. Applied as a block with probability jitter_prob.
/// Values are clamped to [0,1] after each step.
void color_jitter_inplace(Tensor& img, Pcg32& rng, const AugmentParams& p);

/// Full pipeline: crop, coin-flip horizontal mirror, jitter. Consumes rng
/// draws in that fixed order.
Tensor augment_view(const Tensor& img, Pcg32& rng, const AugmentParams& p);

/// Generator for one augmented view, keyed so that every (epoch, sample, view)
/// triple gets its own stream regardless of evaluation order.
Pcg32 view_rng(std::uint64_t seed, int epoch, std::int64_t sample_index, int view_index);

/// Two independently augmented views of the same frame.
std::pair<Tensor, Tensor> make_views(const Tensor& img, std::uint64_t seed, int epoch,
                                     std::int64_t sample_index, const AugmentParams& p);

/// Bilinear resample of a crop region back to the full frame, exposed for
/// direct testing. Region is (top, left, height, width) in source pixels.
Tensor crop_resize_bilinear(const Tensor& img, int top, int left, int height, int width);

}  // namespace rearing::augment
