#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "rng.hpp"
#include "tape.hpp"
#include "tensor.hpp"

namespace mfv::flow {

using mfv::Tensor;
using nn::ParamStore;
using nn::Tape;
using nn::Var;

// Rectified-flow training objective and sampler. The probability path is the
// straight line z_t = (1-t) x0 + t eps, its velocity target u = eps - x0 is
// constant in t, and sampling integrates dz/dt = v from t=1 down to t=0 with
// plain deterministic Euler steps.

enum class Weighting { uniform, t_scaled };
enum class TDistribution { uniform01, logit_normal };

struct FlowConfig {
    Weighting weighting = Weighting::uniform;
    int num_sample_steps = 8;
    TDistribution t_dist = TDistribution::uniform01;
};

inline double weight_lambda(Weighting w, double t) {
    return w == Weighting::uniform ? 1.0 : 4.0 * t * (1.0 - t);
}

inline double sample_t(TDistribution d, Prng& rng) {
    if (d == TDistribution::uniform01) return rng.uniform();
    return 1.0 / (1.0 + std::exp(-rng.normal()));
}

Tensor gaussian_tensor(const std::vector<int>& shape, Prng& rng);

Tensor interpolate(const Tensor& x0, const Tensor& noise, double t);
Tensor velocity_target(const Tensor& x0, const Tensor& noise);

// CFM loss over a batch; Model must define a nested Sample type (carrying x0
// plus whatever conditioning it wants) and
//   Var forward(Tape&, Var z_t, double t, const Sample&).
// The (t, eps) draws depend only on (seed, batch index), so a forward-only
// evaluation sees exactly the loss the gradient pass differentiated — that is
// what makes finite-difference checking meaningful.
template <class Model>
double cfm_loss(Model& model, ParamStore& ps, const std::vector<typename Model::Sample>& batch,
                const FlowConfig& cfg, uint64_t seed, bool with_grads) {
    require(!batch.empty(), ErrCategory::usage, "cfm_loss: empty batch");
    Tape tape(&ps, with_grads);
    std::vector<Var> losses;
    losses.reserve(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) {
        const auto& s = batch[i];
        Prng rng(mix_seed(seed, i, 0xcf3f));
        double t = sample_t(cfg.t_dist, rng);
        Tensor eps = gaussian_tensor(s.x0.shape, rng);
        Var z = tape.leaf(interpolate(s.x0, eps, t));
        Var target = tape.leaf(velocity_target(s.x0, eps));
        Var pred = model.forward(tape, z, t, s);
        Var diff = tape.sub(pred, target);
        Var mse = tape.mean_all(tape.mul(diff, diff));
        losses.push_back(tape.scale(mse, weight_lambda(cfg.weighting, t)));
    }
    Var total = tape.scale(tape.sum_vars(losses), 1.0 / static_cast<double>(batch.size()));
    double loss = tape.value(total).data[0];
    if (!std::isfinite(loss)) fail_numeric("non-finite CFM loss (training divergence)");
    if (with_grads) {
        tape.backward(total);
        tape.harvest_param_grads(1.0);
    }
    return loss;
}

// Deterministic Euler integration from t=1 to t=0, starting at seeded noise.
// VelocityFn: Tensor(const Tensor& z, double t).
template <class VelocityFn>
Tensor euler_sample(VelocityFn&& vel, const std::vector<int>& shape, int steps, uint64_t seed) {
    require(steps >= 1, ErrCategory::usage, "euler_sample: steps must be >= 1");
    Prng rng(mix_seed(seed, 0x65756c65));
    Tensor z = gaussian_tensor(shape, rng);
    double dt = -1.0 / static_cast<double>(steps);
    for (int k = 0; k < steps; ++k) {
        double t = 1.0 - static_cast<double>(k) / static_cast<double>(steps);
        Tensor v = vel(z, t);
        require(v.same_shape(z), ErrCategory::usage, "euler_sample: velocity shape mismatch");
        for (size_t i = 0; i < z.data.size(); ++i) z.data[i] += dt * v.data[i];
        if (!z.all_finite())
            fail_numeric("sampler diverged at step " + std::to_string(k) +
                         " (|z|_max=" + std::to_string(z.abs_max()) + ")");
    }
    return z;
}

}  // namespace mfv::flow
