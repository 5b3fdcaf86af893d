#include "image.hpp"

#include <cmath>

#include "png_io.hpp"

namespace mfv {

Image::Image(int h_, int w_, const Rgb& fill) : Image(h_, w_) {
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) set(y, x, fill);
}

bool Image::all_finite() const {
    for (double v : px)
        if (!std::isfinite(v)) return false;
    return true;
}

int64_t Mask::count() const {
    int64_t n = 0;
    for (uint8_t b : v) n += b;
    return n;
}

bool Mask::is_binary() const {
    for (uint8_t b : v)
        if (b > 1) return false;
    return true;
}

Rgb quantize_rgb(const Rgb& c) {
    return {quantize_level(c[0]), quantize_level(c[1]), quantize_level(c[2])};
}

void quantize_image(Image& img) {
    for (auto& v : img.px) v = quantize_level(v);
}

uint8_t to_byte(double v) {
    double k = std::floor(v * 256.0);
    if (k < 0.0) k = 0.0;
    if (k > 255.0) k = 255.0;
    return static_cast<uint8_t>(k);
}

double from_byte(uint8_t b) { return static_cast<double>(b) / 256.0; }

Image composite(const Image& fg, const Image& bg, const Mask& mask_fg) {
    require(fg.same_shape(bg), ErrCategory::usage, "composite: image shape mismatch");
    require(mask_fg.h == fg.h && mask_fg.w == fg.w, ErrCategory::usage,
            "composite: mask shape mismatch");
    require(mask_fg.is_binary(), ErrCategory::usage, "composite: mask must be binary");
    Image out = bg;
    for (int y = 0; y < fg.h; ++y)
        for (int x = 0; x < fg.w; ++x)
            if (mask_fg.at(y, x))
                for (int c = 0; c < 3; ++c) out.at(y, x, c) = fg.at(y, x, c);
    return out;
}

Rgb mean_color(const Image& img, const Mask& region) {
    require(region.h == img.h && region.w == img.w, ErrCategory::usage,
            "mean_color: mask shape mismatch");
    Rgb sum = {0, 0, 0};
    int64_t n = 0;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            if (region.at(y, x)) {
                for (int c = 0; c < 3; ++c) sum[static_cast<size_t>(c)] += img.at(y, x, c);
                ++n;
            }
    require(n > 0, ErrCategory::usage, "mean_color: empty region");
    return {sum[0] / static_cast<double>(n), sum[1] / static_cast<double>(n),
            sum[2] / static_cast<double>(n)};
}

int64_t count_diff_pixels(const Image& a, const Image& b) {
    require(a.same_shape(b), ErrCategory::usage, "count_diff_pixels: shape mismatch");
    int64_t n = 0;
    for (int y = 0; y < a.h; ++y)
        for (int x = 0; x < a.w; ++x)
            for (int c = 0; c < 3; ++c)
                if (a.at(y, x, c) != b.at(y, x, c)) {
                    ++n;
                    break;
                }
    return n;
}

bool images_equal(const Image& a, const Image& b) {
    return a.same_shape(b) && a.px == b.px;
}

double mean_abs_error(const Image& a, const Image& b, const Mask* region) {
    require(a.same_shape(b), ErrCategory::usage, "mean_abs_error: shape mismatch");
    double s = 0.0;
    int64_t n = 0;
    for (int y = 0; y < a.h; ++y)
        for (int x = 0; x < a.w; ++x) {
            if (region && !region->at(y, x)) continue;
            for (int c = 0; c < 3; ++c) s += std::fabs(a.at(y, x, c) - b.at(y, x, c));
            n += 3;
        }
    require(n > 0, ErrCategory::usage, "mean_abs_error: empty region");
    return s / static_cast<double>(n);
}

std::vector<uint8_t> image_png_bytes(const Image& img) {
    std::vector<uint8_t> rgb(static_cast<size_t>(img.h) * img.w * 3);
    for (size_t i = 0; i < rgb.size(); ++i) rgb[i] = to_byte(img.px[i]);
    return png_encode_rgb8(img.w, img.h, rgb);
}

std::vector<uint8_t> mask_png_bytes(const Mask& m) {
    require(m.is_binary(), ErrCategory::usage, "mask_png_bytes: mask must be binary");
    return png_encode_gray1(m.w, m.h, m.v);
}

void save_image_png(const std::string& path, const Image& img) {
    write_file_bytes(path, image_png_bytes(img));
}

Image load_image_png(const std::string& path) {
    PngImage p = png_decode(read_file_bytes(path));
    require(p.channels == 3, ErrCategory::io, "expected RGB PNG: " + path);
    Image img(p.height, p.width);
    for (size_t i = 0; i < p.pixels.size(); ++i) img.px[i] = from_byte(p.pixels[i]);
    return img;
}

void save_mask_png(const std::string& path, const Mask& m) {
    write_file_bytes(path, mask_png_bytes(m));
}

Mask load_mask_png(const std::string& path) {
    PngImage p = png_decode(read_file_bytes(path));
    require(p.channels == 1, ErrCategory::io, "expected 1-bit PNG: " + path);
    Mask m(p.height, p.width);
    m.v = p.pixels;
    return m;
}

}  // namespace mfv
