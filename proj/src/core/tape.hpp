#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tensor.hpp"

namespace mfv::nn {

using mfv::Tensor;

// Named trainable tensors plus their gradients and Adam state. Models
// register parameters here; checkpoints serialize exactly this store.
struct ParamDef {
    std::string name;
    Tensor value;
    Tensor grad;
    Tensor adam_m, adam_v;
    bool trainable = true;
};

class ParamStore {
public:
    int add(const std::string& name, Tensor init, bool trainable = true);
    ParamDef& at(int id) { return items_[static_cast<size_t>(id)]; }
    const ParamDef& at(int id) const { return items_[static_cast<size_t>(id)]; }
    int find(const std::string& name) const;  // -1 if absent
    size_t size() const { return items_.size(); }
    std::vector<ParamDef>& items() { return items_; }
    const std::vector<ParamDef>& items() const { return items_; }

    void zero_grads();
    int64_t total_parameters() const;

private:
    std::vector<ParamDef> items_;
    std::unordered_map<std::string, int> index_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One Adam update from accumulated grads; `step` starts at 1.
void adam_step(ParamStore& ps, const AdamConfig& cfg, int64_t step);

// Reverse-mode autodiff over a per-step graph. Creation order is the
// topological order; backward walks it in reverse. With grad_enabled=false
// the tape is a plain forward evaluator (used for sampling / inference).
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

class Tape {
public:
    explicit Tape(ParamStore* ps = nullptr, bool grad_enabled = true)
        : ps_(ps), grad_(grad_enabled) {}

    bool grad_enabled() const { return grad_; }

    Var leaf(Tensor value, bool requires_grad = false);
    Var param(int param_id);  // binds a ParamStore tensor (memoized per tape)

    const Tensor& value(Var v) const { return nodes_[static_cast<size_t>(v.id)].value; }
    const Tensor& grad_of(Var v) const { return nodes_[static_cast<size_t>(v.id)].grad; }

    // elementwise
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double c);
    Var silu(Var a);

    // linear algebra ([n,k] row-major matrices)
    Var matmul(Var a, Var b);     // A[n,k] * B[k,m]
    Var matmul_nt(Var a, Var b);  // A[n,k] * B[m,k]^T
    Var softmax_rows(Var a);

    // conv / spatial ([c,h,w])
    Var conv2d(Var x, Var w, Var b, int stride, int pad);
    Var upsample2(Var x);
    Var group_norm(Var x, Var gamma, Var beta, int groups, double eps = 1e-5);

    // layout
    Var concat_rows(Var a, Var b);
    Var concat_channels(Var a, Var b);
    Var chw_tokens(Var x);                 // [c,h,w] -> [h*w, c]
    Var tokens_chw(Var t, int h, int w);   // inverse
    Var reshape(Var x, std::vector<int> shape);

    // tables / broadcasts
    Var gather_rows(Var table, const std::vector<int>& ids);
    Var add_row(Var x, Var row);            // [n,d] + [d]
    Var add_channel_bias(Var x, Var bias);  // [c,h,w] + [c]

    // reductions
    Var mean_all(Var x);
    Var sum_vars(const std::vector<Var>& xs);

    void backward(Var loss);

    // adds (scale * tape gradient) into ParamStore grads for bound params
    void harvest_param_grads(double scale = 1.0);

    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        Tensor value;
        Tensor grad;  // allocated lazily
        std::function<void(Tape&)> back;
        bool rq = false;
    };

    int push(Tensor value, bool rq, std::function<void(Tape&)> back);
    void accum(int id, const Tensor& g);
    void accum_raw(int id, const double* g, int64_t n);
    Tensor& grad_ref(int id);
    bool rq(Var v) const { return nodes_[static_cast<size_t>(v.id)].rq; }

    ParamStore* ps_;
    bool grad_;
    int cursor_ = -1;  // node whose backward is currently running
    std::vector<Node> nodes_;
    std::unordered_map<int, int> param_binding_;  // param_id -> node id
};

// deterministic parameter initializers
Tensor normal_init(std::vector<int> shape, double stddev, uint64_t seed);
Tensor he_conv_init(int cout, int cin, int k, uint64_t seed);
Tensor he_linear_init(int dout, int din, uint64_t seed);

}  // namespace mfv::nn
