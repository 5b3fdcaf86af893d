#include "codec.hpp"

namespace mfv::codec {

Tensor encode_tensor(const Image& img, int patch, bool normalize) {
    require(patch >= 1, ErrCategory::usage, "encode: patch factor must be >= 1");
    require(img.h % patch == 0 && img.w % patch == 0, ErrCategory::usage,
            "encode: image dimensions must be divisible by the patch factor");
    int h = img.h / patch, w = img.w / patch, c = 3 * patch * patch;
    Tensor out({c, h, w});
    for (int dy = 0; dy < patch; ++dy)
        for (int dx = 0; dx < patch; ++dx)
            for (int rgb = 0; rgb < 3; ++rgb) {
                int ch = (dy * patch + dx) * 3 + rgb;
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) {
                        double v = img.at(y * patch + dy, x * patch + dx, rgb);
                        out.at3(ch, y, x) = normalize ? 2.0 * v - 1.0 : v;
                    }
            }
    return out;
}

Image decode_tensor(const Tensor& latent, int patch, bool normalize) {
    require(latent.rank() == 3, ErrCategory::usage, "decode: latent must be rank 3");
    require(latent.dim(0) == 3 * patch * patch, ErrCategory::usage,
            "decode: channel count does not match patch factor");
    int h = latent.dim(1), w = latent.dim(2);
    Image img(h * patch, w * patch);
    for (int dy = 0; dy < patch; ++dy)
        for (int dx = 0; dx < patch; ++dx)
            for (int rgb = 0; rgb < 3; ++rgb) {
                int ch = (dy * patch + dx) * 3 + rgb;
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) {
                        double l = latent.at3(ch, y, x);
                        img.at(y * patch + dy, x * patch + dx, rgb) =
                            normalize ? (l + 1.0) * 0.5 : l;
                    }
            }
    return img;
}

LatentTensor encode(const Image& img, int patch, bool normalize) {
    return LatentTensor{encode_tensor(img, patch, normalize), patch};
}

Image decode(const LatentTensor& latent, bool normalize) {
    return decode_tensor(latent.data, latent.patch_factor, normalize);
}

}  // namespace mfv::codec
