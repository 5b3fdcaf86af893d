#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "tape.hpp"

namespace mfv::nn {

// Shape of the denoiser family. One instance is shared by TryonNet and
// ReferenceNet (which differ in input channels and in having an up path).
struct NetConfig {
    int canvas_h = 64, canvas_w = 48, patch = 4;
    int stem_ch = 32;   // channels at full latent resolution
    int base_ch = 64;   // first down level (attention at h/2 x w/2)
    int mid_ch = 128;   // second down level and bottleneck (attention at h/4 x w/4)
    int d_text = 64;
    int n_semantic = 4, d_semantic = 64;
    int time_dim = 64, time_hidden = 128;
    double lambda_ip = 1.0;
    int groups = 8;
    uint64_t init_seed = 42;

    int latent_c() const { return 3 * patch * patch; }
    int latent_h() const { return canvas_h / patch; }
    int latent_w() const { return canvas_w / patch; }
    // context layout: [E(masked person or cond); mask plane; E(pose)]
    int ctx_channels() const { return 2 * latent_c() + 1; }
    int in_channels() const { return latent_c() + ctx_channels(); }

    nlohmann::json to_json() const;
    static NetConfig from_json(const nlohmann::json& j);
};

// parameter init seed derived from (base seed, parameter name)
uint64_t name_seed(uint64_t base, const std::string& name);

// plain (non-tape) conv for frozen trunks
Tensor conv2d_raw(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int pad);
Tensor silu_raw(const Tensor& x);

struct Linear {
    int w = -1, b = -1;
    int din = 0, dout = 0;

    Linear() = default;
    Linear(ParamStore& ps, const std::string& prefix, int din, int dout, uint64_t seed,
           double scale = 1.0, bool bias = true);

    Var apply(Tape& t, Var x) const;       // [n,din] -> [n,dout]
    Var apply_vec(Tape& t, Var v) const;   // [din]   -> [dout]
};

struct Conv {
    int w = -1, b = -1;
    int stride = 1, pad = 1;

    Conv() = default;
    Conv(ParamStore& ps, const std::string& prefix, int cin, int cout, int k, int stride, int pad,
         uint64_t seed, double scale = 1.0);

    Var apply(Tape& t, Var x) const;
};

struct GroupNorm {
    int gamma = -1, beta = -1;
    int groups = 8;

    GroupNorm() = default;
    GroupNorm(ParamStore& ps, const std::string& prefix, int channels, int groups);

    Var apply(Tape& t, Var x) const;
};

// GN-SiLU-conv x2 with residual; optional per-block time conditioning.
struct ResBlock {
    GroupNorm gn1, gn2;
    Conv conv1, conv2;
    std::optional<Conv> skip;        // 1x1 when cin != cout
    std::optional<Linear> time_proj; // time_hidden -> cout
    int cin = 0, cout = 0;

    ResBlock() = default;
    ResBlock(ParamStore& ps, const std::string& prefix, int cin, int cout, int groups,
             int time_hidden, uint64_t seed);

    Var apply(Tape& t, Var x, std::optional<Var> temb) const;
};

// Single-head self-attention over spatial tokens; reference tokens, when
// given, are concatenated into keys/values (the ReferenceNet injection).
struct SelfAttention {
    GroupNorm gn;
    Linear q, k, v, o;
    int channels = 0;

    SelfAttention() = default;
    SelfAttention(ParamStore& ps, const std::string& prefix, int channels, int groups,
                  uint64_t seed);

    // probs_out, when non-null, receives the [N, N+Nr] softmax Var
    Var apply(Tape& t, Var x_chw, std::optional<Var> ref_tokens, Var* probs_out = nullptr) const;
};

// Single-branch cross-attention (queries from the map, keys/values from a
// token matrix); used by ReferenceNet for its prompt conditioning.
struct CrossAttention {
    GroupNorm gn;
    Linear q, k, v, o;
    int channels = 0;

    CrossAttention() = default;
    CrossAttention(ParamStore& ps, const std::string& prefix, int channels, int d_tokens,
                   int groups, uint64_t seed);

    Var apply(Tape& t, Var x_chw, Var tokens) const;
};

// Two softmax branches sharing queries: prompt tokens plus semantic tokens,
// summed with weight lambda on the semantic branch.
struct DecoupledCrossAttention {
    GroupNorm gn;
    Linear q, kj, vj, ki, vi, o;
    int channels = 0;

    DecoupledCrossAttention() = default;
    DecoupledCrossAttention(ParamStore& ps, const std::string& prefix, int channels, int d_prompt,
                            int d_sem, int groups, uint64_t seed);

    Var apply(Tape& t, Var x_chw, Var prompt_tokens, Var sem_tokens, double lambda) const;
};

struct TimeEmbedding {
    Linear fc1, fc2;
    int dim = 0, hidden = 0;

    TimeEmbedding() = default;
    TimeEmbedding(ParamStore& ps, const std::string& prefix, int dim, int hidden, uint64_t seed);

    Var apply(Tape& t, double time) const;  // -> [hidden]
};

}  // namespace mfv::nn
