#pragma once

#include "image.hpp"
#include "tensor.hpp"

namespace mfv::codec {

// Exactly invertible pixel <-> latent codec: space-to-depth rearrangement by
// `patch` plus the affine map l = 2v - 1 (midpoint 0.5 -> 0). On the project's
// 256-level pixel grid the affine is exact in doubles, so decode(encode(x))
// is bit-identical to x.
//
// Latent layout: [c, h, w] with h = H/patch, w = W/patch and
// c = 3*patch^2; channel index c = (dy*patch + dx)*3 + rgb.

struct LatentTensor {
    Tensor data;          // [c, h, w]
    int patch_factor = 4;

    int channels() const { return data.dim(0); }
    int h() const { return data.dim(1); }
    int w() const { return data.dim(2); }
};

LatentTensor encode(const Image& img, int patch = 4, bool normalize = true);
Image decode(const LatentTensor& latent, bool normalize = true);

// raw-tensor variants used inside the networks (same layout rules)
Tensor encode_tensor(const Image& img, int patch = 4, bool normalize = true);
Image decode_tensor(const Tensor& latent, int patch = 4, bool normalize = true);

}  // namespace mfv::codec
