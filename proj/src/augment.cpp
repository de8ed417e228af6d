#include "rearing/augment/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rearing::augment {

namespace {

float clamp01(float x) { return std::min(1.0f, std::max(0.0f, x)); }

void require_chw(const Tensor& img, const char* what) {
    if (img.ndim() != 3 || img.dim(0) != 3 || img.dim(1) < 1 || img.dim(2) < 1) {
        throw std::invalid_argument(std::string(what) + ": expected [3,H,W] image, got " +
                                    img.shape_str());
    }
}

// Rec.601 luma, matching the usual grayscale conversion.
float luma(float r, float g, float b) { return 0.299f * r + 0.587f * g + 0.114f * b; }

void rgb_to_hsv(float r, float g, float b, float& h, float& s, float& v) {
    float maxc = std::max({r, g, b});
    float minc = std::min({r, g, b});
    v = maxc;
    float d = maxc - minc;
    s = maxc > 0.0f ? d / maxc : 0.0f;
    if (d <= 0.0f) {
        h = 0.0f;
        return;
    }
    if (maxc == r) {
        h = (g - b) / d;
        if (h < 0.0f) h += 6.0f;
    } else if (maxc == g) {
        h = (b - r) / d + 2.0f;
    } else {
        h = (r - g) / d + 4.0f;
    }
    h /= 6.0f;
}

void hsv_to_rgb(float h, float s, float v, float& r, float& g, float& b) {
    h -= std::floor(h);  // wrap to [0,1)
    float hf = h * 6.0f;
    int i = static_cast<int>(hf) % 6;
    float f = hf - std::floor(hf);
    float p = v * (1.0f - s);
    float q = v * (1.0f - f * s);
    float t = v * (1.0f - (1.0f - f) * s);
    switch (i) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

}  // namespace

void AugmentParams::validate() const {
    if (!(crop_scale_min > 0.0) || crop_scale_min > crop_scale_max || crop_scale_max > 1.0) {
        throw std::invalid_argument("AugmentParams: need 0 < crop_scale_min <= crop_scale_max <= 1");
    }
    if (!(aspect_min > 0.0) || aspect_min > aspect_max) {
        throw std::invalid_argument("AugmentParams: need 0 < aspect_min <= aspect_max");
    }
    if (flip_prob < 0.0 || flip_prob > 1.0 || jitter_prob < 0.0 || jitter_prob > 1.0) {
        throw std::invalid_argument("AugmentParams: probabilities must be in [0,1]");
    }
    if (brightness < 0.0 || contrast < 0.0 || saturation < 0.0) {
        throw std::invalid_argument("AugmentParams: jitter strengths must be >= 0");
    }
    if (hue < 0.0 || hue > 0.5) {
        throw std::invalid_argument("AugmentParams: hue strength must be in [0, 0.5]");
    }
}

Tensor image_to_tensor(const chamber::Image8& img) {
    Tensor t({3, img.h, img.w});
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < img.h; ++y) {
            for (int x = 0; x < img.w; ++x) {
                t[(static_cast<std::int64_t>(c) * img.h + y) * img.w + x] =
                    static_cast<float>(img.at(y, x, c)) * (1.0f / 255.0f);
            }
        }
    }
    return t;
}

Tensor crop_resize_bilinear(const Tensor& img, int top, int left, int height, int width) {
    require_chw(img, "crop_resize_bilinear");
    const int H = img.dim(1), W = img.dim(2);
    if (height < 1 || width < 1 || top < 0 || left < 0 || top + height > H || left + width > W) {
        throw std::invalid_argument("crop_resize_bilinear: crop region out of bounds");
    }
    Tensor out({3, H, W});
    const double sy_scale = static_cast<double>(height) / H;
    const double sx_scale = static_cast<double>(width) / W;
    for (int y = 0; y < H; ++y) {
        // Align-corners-false mapping; exact identity when the crop is the full frame.
        double sy = (y + 0.5) * sy_scale - 0.5;
        double syc = std::min(static_cast<double>(height - 1), std::max(0.0, sy));
        int y0 = static_cast<int>(syc);
        int y1 = std::min(y0 + 1, height - 1);
        float wy = static_cast<float>(syc - y0);
        for (int x = 0; x < W; ++x) {
            double sx = (x + 0.5) * sx_scale - 0.5;
            double sxc = std::min(static_cast<double>(width - 1), std::max(0.0, sx));
            int x0 = static_cast<int>(sxc);
            int x1 = std::min(x0 + 1, width - 1);
            float wx = static_cast<float>(sxc - x0);
            for (int c = 0; c < 3; ++c) {
                const float* src = img.data() + static_cast<std::int64_t>(c) * H * W;
                float v00 = src[(top + y0) * W + (left + x0)];
                float v01 = src[(top + y0) * W + (left + x1)];
                float v10 = src[(top + y1) * W + (left + x0)];
                float v11 = src[(top + y1) * W + (left + x1)];
                float a = v00 + (v01 - v00) * wx;
                float b = v10 + (v11 - v10) * wx;
                out[(static_cast<std::int64_t>(c) * H + y) * W + x] = a + (b - a) * wy;
            }
        }
    }
    return out;
}

Tensor random_resized_crop(const Tensor& img, Pcg32& rng, const AugmentParams& p) {
    require_chw(img, "random_resized_crop");
    p.validate();
    const int H = img.dim(1), W = img.dim(2);
    const double area = static_cast<double>(H) * W;
    const double log_min = std::log(p.aspect_min), log_max = std::log(p.aspect_max);

    for (int attempt = 0; attempt < 10; ++attempt) {
        double target_area = area * rng.uniform(p.crop_scale_min, p.crop_scale_max);
        double ratio = std::exp(rng.uniform(log_min, log_max));
        int w = static_cast<int>(std::lround(std::sqrt(target_area * ratio)));
        int h = static_cast<int>(std::lround(std::sqrt(target_area / ratio)));
        if (w > 0 && w <= W && h > 0 && h <= H) {
            int top = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(H - h + 1)));
            int left = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(W - w + 1)));
            return crop_resize_bilinear(img, top, left, h, w);
        }
    }

    // Fallback: largest center crop whose aspect fits the allowed range.
    double in_ratio = static_cast<double>(W) / H;
    int w, h;
    if (in_ratio < p.aspect_min) {
        w = W;
        h = static_cast<int>(std::lround(w / p.aspect_min));
    } else if (in_ratio > p.aspect_max) {
        h = H;
        w = static_cast<int>(std::lround(h * p.aspect_max));
    } else {
        w = W;
        h = H;
    }
    return crop_resize_bilinear(img, (H - h) / 2, (W - w) / 2, h, w);
}

void horizontal_flip_inplace(Tensor& img) {
    require_chw(img, "horizontal_flip_inplace");
    const int H = img.dim(1), W = img.dim(2);
    for (int c = 0; c < 3; ++c) {
        float* plane = img.data() + static_cast<std::int64_t>(c) * H * W;
        for (int y = 0; y < H; ++y) {
            float* row = plane + static_cast<std::int64_t>(y) * W;
            for (int x = 0; x < W / 2; ++x) std::swap(row[x], row[W - 1 - x]);
        }
    }
}

void color_jitter_inplace(Tensor& img, Pcg32& rng, const AugmentParams& p) {
    require_chw(img, "color_jitter_inplace");
    p.validate();
    if (rng.uniform() >= p.jitter_prob) return;

    const int H = img.dim(1), W = img.dim(2);
    const std::int64_t plane = static_cast<std::int64_t>(H) * W;
    float* r = img.data();
    float* g = img.data() + plane;
    float* b = img.data() + 2 * plane;

    float fb = static_cast<float>(rng.uniform(std::max(0.0, 1.0 - p.brightness), 1.0 + p.brightness));
    for (std::int64_t i = 0; i < 3 * plane; ++i) img[i] = clamp01(img[i] * fb);

    float fc = static_cast<float>(rng.uniform(std::max(0.0, 1.0 - p.contrast), 1.0 + p.contrast));
    float mean = 0.0f;
    {
        // Mean of the grayscale image, accumulated in double for stability.
        double acc = 0.0;
        for (std::int64_t i = 0; i < plane; ++i) acc += luma(r[i], g[i], b[i]);
        mean = static_cast<float>(acc / static_cast<double>(plane));
    }
    for (std::int64_t i = 0; i < 3 * plane; ++i) img[i] = clamp01(mean + (img[i] - mean) * fc);

    float fs = static_cast<float>(rng.uniform(std::max(0.0, 1.0 - p.saturation), 1.0 + p.saturation));
    for (std::int64_t i = 0; i < plane; ++i) {
        float gray = luma(r[i], g[i], b[i]);
        r[i] = clamp01(gray + (r[i] - gray) * fs);
        g[i] = clamp01(gray + (g[i] - gray) * fs);
        b[i] = clamp01(gray + (b[i] - gray) * fs);
    }

    float fh = static_cast<float>(rng.uniform(-p.hue, p.hue));
    for (std::int64_t i = 0; i < plane; ++i) {
        float hh, ss, vv;
        rgb_to_hsv(r[i], g[i], b[i], hh, ss, vv);
        hsv_to_rgb(hh + fh, ss, vv, r[i], g[i], b[i]);
        r[i] = clamp01(r[i]);
        g[i] = clamp01(g[i]);
        b[i] = clamp01(b[i]);
    }
}

Tensor augment_view(const Tensor& img, Pcg32& rng, const AugmentParams& p) {
    Tensor out = random_resized_crop(img, rng, p);
    if (rng.uniform() < p.flip_prob) horizontal_flip_inplace(out);
    color_jitter_inplace(out, rng, p);
    return out;
}

Pcg32 view_rng(std::uint64_t seed, int epoch, std::int64_t sample_index, int view_index) {
    std::uint64_t stream = derive_stream(
        seed, {0x6175676dULL, static_cast<std::uint64_t>(epoch),
               static_cast<std::uint64_t>(sample_index), static_cast<std::uint64_t>(view_index)});
    return Pcg32(seed, stream);
}

std::pair<Tensor, Tensor> make_views(const Tensor& img, std::uint64_t seed, int epoch,
                                     std::int64_t sample_index, const AugmentParams& p) {
    Pcg32 r0 = view_rng(seed, epoch, sample_index, 0);
    Pcg32 r1 = view_rng(seed, epoch, sample_index, 1);
    return {augment_view(img, r0, p), augment_view(img, r1, p)};
}

}  // namespace rearing::augment
