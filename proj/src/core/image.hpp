#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace mfv {

using Rgb = std::array<double, 3>;

// RGB image, doubles in [0,1], row-major, channel-interleaved.
//
// Every image this project renders or persists lives on the 256-level grid
// v = k/256 (k = 0..255). That grid makes the latent codec's affine map
// 2v - 1 exactly invertible in double precision, so round-trip and
// compositing checks can be bit-exact.
struct Image {
    int h = 0, w = 0;
    std::vector<double> px;  // h*w*3

    Image() = default;
    Image(int h_, int w_) : h(h_), w(w_), px(static_cast<size_t>(h_) * w_ * 3, 0.0) {}
    Image(int h_, int w_, const Rgb& fill);

    double& at(int y, int x, int c) { return px[(static_cast<size_t>(y) * w + x) * 3 + c]; }
    double at(int y, int x, int c) const { return px[(static_cast<size_t>(y) * w + x) * 3 + c]; }

    void set(int y, int x, const Rgb& color) {
        for (int c = 0; c < 3; ++c) at(y, x, c) = color[static_cast<size_t>(c)];
    }

    bool same_shape(const Image& o) const { return h == o.h && w == o.w; }
    bool all_finite() const;
};

// Binary mask, values in {0,1}.
struct Mask {
    int h = 0, w = 0;
    std::vector<uint8_t> v;  // h*w

    Mask() = default;
    Mask(int h_, int w_) : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, 0) {}

    uint8_t& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
    uint8_t at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }

    int64_t count() const;
    bool is_binary() const;
    bool same_shape(const Mask& o) const { return h == o.h && w == o.w; }
};

// value -> 256-level grid (k/256, k in 0..255)
inline double quantize_level(double v) {
    double k = std::floor(v * 256.0);
    if (k < 0.0) k = 0.0;
    if (k > 255.0) k = 255.0;
    return k / 256.0;
}
Rgb quantize_rgb(const Rgb& c);
void quantize_image(Image& img);

uint8_t to_byte(double v);        // floor(v*256) clamped to [0,255]
double from_byte(uint8_t b);      // b/256

// out = fg where mask=1, bg where mask=0; bit-exact selection
Image composite(const Image& fg, const Image& bg, const Mask& mask_fg);

// mean color over mask=1 pixels
Rgb mean_color(const Image& img, const Mask& region);

// pixel-space helpers
int64_t count_diff_pixels(const Image& a, const Image& b);
bool images_equal(const Image& a, const Image& b);
double mean_abs_error(const Image& a, const Image& b, const Mask* region = nullptr);

// PNG persistence (RGB8 for images, 1-bit gray for masks)
void save_image_png(const std::string& path, const Image& img);
Image load_image_png(const std::string& path);
void save_mask_png(const std::string& path, const Mask& m);
Mask load_mask_png(const std::string& path);

std::vector<uint8_t> image_png_bytes(const Image& img);
std::vector<uint8_t> mask_png_bytes(const Mask& m);

}  // namespace mfv
