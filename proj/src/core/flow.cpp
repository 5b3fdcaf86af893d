#include "flow.hpp"

namespace mfv::flow {

Tensor gaussian_tensor(const std::vector<int>& shape, Prng& rng) {
    Tensor t(shape);
    for (auto& v : t.data) v = rng.normal();
    return t;
}

Tensor interpolate(const Tensor& x0, const Tensor& noise, double t) {
    require(x0.same_shape(noise), ErrCategory::usage, "interpolate: shape mismatch");
    require(t >= 0.0 && t <= 1.0, ErrCategory::usage, "interpolate: t must be in [0,1]");
    Tensor z = x0;
    for (size_t i = 0; i < z.data.size(); ++i)
        z.data[i] = (1.0 - t) * x0.data[i] + t * noise.data[i];
    return z;
}

Tensor velocity_target(const Tensor& x0, const Tensor& noise) {
    require(x0.same_shape(noise), ErrCategory::usage, "velocity_target: shape mismatch");
    Tensor u = noise;
    for (size_t i = 0; i < u.data.size(); ++i) u.data[i] -= x0.data[i];
    return u;
}

}  // namespace mfv::flow
