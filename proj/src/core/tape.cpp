#include "tape.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "rng.hpp"

namespace mfv::nn {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

// C[n,m] (+)= op(A) * op(B)
void gemm(const double* a, int ar, int ac, bool ta, const double* b, int br, int bc, bool tb,
          double* c, bool accumulate) {
    CMap A(a, ar, ac), B(b, br, bc);
    int n = ta ? ac : ar;
    int m = tb ? br : bc;
    MMap C(c, n, m);
    if (!ta && !tb) accumulate ? void(C.noalias() += A * B) : void(C.noalias() = A * B);
    else if (!ta && tb) accumulate ? void(C.noalias() += A * B.transpose()) : void(C.noalias() = A * B.transpose());
    else if (ta && !tb) accumulate ? void(C.noalias() += A.transpose() * B) : void(C.noalias() = A.transpose() * B);
    else accumulate ? void(C.noalias() += A.transpose() * B.transpose()) : void(C.noalias() = A.transpose() * B.transpose());
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ConvDims {
    int ci, hi, wi, co, k, stride, pad, ho, wo;
};

ConvDims conv_dims(const Tensor& x, const Tensor& w, int stride, int pad) {
    require(x.rank() == 3 && w.rank() == 4, ErrCategory::usage, "conv2d: bad ranks");
    ConvDims d;
    d.ci = x.dim(0); d.hi = x.dim(1); d.wi = x.dim(2);
    d.co = w.dim(0); d.k = w.dim(2);
    d.stride = stride; d.pad = pad;
    require(w.dim(1) == d.ci && w.dim(3) == d.k, ErrCategory::usage,
            "conv2d: weight shape mismatch " + w.shape_str() + " vs input " + x.shape_str());
    d.ho = (d.hi + 2 * pad - d.k) / stride + 1;
    d.wo = (d.wi + 2 * pad - d.k) / stride + 1;
    require(d.ho > 0 && d.wo > 0, ErrCategory::usage, "conv2d: empty output");
    return d;
}

void im2col(const Tensor& x, const ConvDims& d, std::vector<double>& col) {
    col.assign(static_cast<size_t>(d.ci) * d.k * d.k * d.ho * d.wo, 0.0);
    int hw = d.ho * d.wo;
    for (int ci = 0; ci < d.ci; ++ci)
        for (int ky = 0; ky < d.k; ++ky)
            for (int kx = 0; kx < d.k; ++kx) {
                double* dst = col.data() + (static_cast<size_t>(ci) * d.k * d.k + ky * d.k + kx) * hw;
                for (int oy = 0; oy < d.ho; ++oy) {
                    int iy = oy * d.stride + ky - d.pad;
                    if (iy < 0 || iy >= d.hi) continue;
                    for (int ox = 0; ox < d.wo; ++ox) {
                        int ix = ox * d.stride + kx - d.pad;
                        if (ix < 0 || ix >= d.wi) continue;
                        dst[oy * d.wo + ox] = x.at3(ci, iy, ix);
                    }
                }
            }
}

void col2im_accum(const std::vector<double>& col, const ConvDims& d, Tensor& dx) {
    int hw = d.ho * d.wo;
    for (int ci = 0; ci < d.ci; ++ci)
        for (int ky = 0; ky < d.k; ++ky)
            for (int kx = 0; kx < d.k; ++kx) {
                const double* src =
                    col.data() + (static_cast<size_t>(ci) * d.k * d.k + ky * d.k + kx) * hw;
                for (int oy = 0; oy < d.ho; ++oy) {
                    int iy = oy * d.stride + ky - d.pad;
                    if (iy < 0 || iy >= d.hi) continue;
                    for (int ox = 0; ox < d.wo; ++ox) {
                        int ix = ox * d.stride + kx - d.pad;
                        if (ix < 0 || ix >= d.wi) continue;
                        dx.at3(ci, iy, ix) += src[oy * d.wo + ox];
                    }
                }
            }
}

}  // namespace

// --------------------------- ParamStore -------------------------------------

int ParamStore::add(const std::string& name, Tensor init, bool trainable) {
    require(index_.count(name) == 0, ErrCategory::usage, "duplicate parameter name: " + name);
    ParamDef def;
    def.name = name;
    def.grad = Tensor::zeros(init.shape);
    def.adam_m = Tensor::zeros(init.shape);
    def.adam_v = Tensor::zeros(init.shape);
    def.value = std::move(init);
    def.trainable = trainable;
    items_.push_back(std::move(def));
    int id = static_cast<int>(items_.size()) - 1;
    index_[name] = id;
    return id;
}

int ParamStore::find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

void ParamStore::zero_grads() {
    for (auto& p : items_)
        std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
}

int64_t ParamStore::total_parameters() const {
    int64_t n = 0;
    for (const auto& p : items_) n += p.value.numel();
    return n;
}

void adam_step(ParamStore& ps, const AdamConfig& cfg, int64_t step) {
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
    for (auto& p : ps.items()) {
        if (!p.trainable) continue;
        for (size_t i = 0; i < p.value.data.size(); ++i) {
            double g = p.grad.data[i];
            p.adam_m.data[i] = cfg.beta1 * p.adam_m.data[i] + (1.0 - cfg.beta1) * g;
            p.adam_v.data[i] = cfg.beta2 * p.adam_v.data[i] + (1.0 - cfg.beta2) * g * g;
            double mhat = p.adam_m.data[i] / bc1;
            double vhat = p.adam_v.data[i] / bc2;
            p.value.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

// ----------------------------- Tape -----------------------------------------

int Tape::push(Tensor value, bool rq, std::function<void(Tape&)> back) {
    Node n;
    n.value = std::move(value);
    n.rq = rq && grad_;
    if (n.rq) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
}

Var Tape::leaf(Tensor value, bool requires_grad) {
    return Var{push(std::move(value), requires_grad, nullptr)};
}

Var Tape::param(int param_id) {
    require(ps_ != nullptr, ErrCategory::usage, "tape has no parameter store");
    auto it = param_binding_.find(param_id);
    if (it != param_binding_.end()) return Var{it->second};
    const ParamDef& def = ps_->at(param_id);
    int id = push(def.value, def.trainable, nullptr);
    param_binding_[param_id] = id;
    return Var{id};
}

Tensor& Tape::grad_ref(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.data.empty()) n.grad = Tensor::zeros(n.value.shape);
    return n.grad;
}

void Tape::accum(int id, const Tensor& g) {
    Tensor& dst = grad_ref(id);
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
}

void Tape::accum_raw(int id, const double* g, int64_t n) {
    Tensor& dst = grad_ref(id);
    for (int64_t i = 0; i < n; ++i) dst.data[static_cast<size_t>(i)] += g[i];
}

void Tape::backward(Var loss) {
    require(grad_, ErrCategory::usage, "backward on a no-grad tape");
    require(loss.valid() && value(loss).numel() == 1, ErrCategory::usage,
            "backward expects a scalar loss");
    grad_ref(loss.id).data[0] = 1.0;
    for (int i = loss.id; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (n.rq && n.back && !n.grad.data.empty()) {
            cursor_ = i;
            n.back(*this);
        }
    }
}

void Tape::harvest_param_grads(double scale) {
    require(ps_ != nullptr, ErrCategory::usage, "tape has no parameter store");
    for (const auto& [pid, nid] : param_binding_) {
        const Node& n = nodes_[static_cast<size_t>(nid)];
        if (n.grad.data.empty()) continue;
        ParamDef& def = ps_->at(pid);
        for (size_t i = 0; i < def.grad.data.size(); ++i)
            def.grad.data[i] += scale * n.grad.data[i];
    }
}

// ------------------------------ ops ------------------------------------------

Var Tape::add(Var a, Var b) {
    require(value(a).same_shape(value(b)), ErrCategory::usage,
            "add: shape mismatch " + value(a).shape_str() + " vs " + value(b).shape_str());
    Tensor out = value(a);
    const Tensor& vb = value(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += vb.data[i];
    int ia = a.id, ib = b.id;
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        if (t.nodes_[static_cast<size_t>(ia)].rq) t.accum(ia, g);
        if (t.nodes_[static_cast<size_t>(ib)].rq) t.accum(ib, g);
    });
    return Var{id};
}

Var Tape::sub(Var a, Var b) {
    require(value(a).same_shape(value(b)), ErrCategory::usage, "sub: shape mismatch");
    Tensor out = value(a);
    const Tensor& vb = value(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= vb.data[i];
    int ia = a.id, ib = b.id;
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        if (t.nodes_[static_cast<size_t>(ia)].rq) t.accum(ia, g);
        if (t.nodes_[static_cast<size_t>(ib)].rq) {
            Tensor& dst = t.grad_ref(ib);
            for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] -= g.data[i];
        }
    });
    return Var{id};
}

Var Tape::mul(Var a, Var b) {
    require(value(a).same_shape(value(b)), ErrCategory::usage, "mul: shape mismatch");
    Tensor out = value(a);
    const Tensor& vb = value(b);
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= vb.data[i];
    int ia = a.id, ib = b.id;
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        const Tensor& va = t.nodes_[static_cast<size_t>(ia)].value;
        const Tensor& vb2 = t.nodes_[static_cast<size_t>(ib)].value;
        if (t.nodes_[static_cast<size_t>(ia)].rq) {
            Tensor& dst = t.grad_ref(ia);
            for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i] * vb2.data[i];
        }
        if (t.nodes_[static_cast<size_t>(ib)].rq) {
            Tensor& dst = t.grad_ref(ib);
            for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i] * va.data[i];
        }
    });
    return Var{id};
}

Var Tape::scale(Var a, double c) {
    Tensor out = value(a);
    for (auto& v : out.data) v *= c;
    int ia = a.id;
    int id = push(std::move(out), rq(a), [ia, c](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        Tensor& dst = t.grad_ref(ia);
        for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += c * g.data[i];
    });
    return Var{id};
}

Var Tape::silu(Var a) {
    Tensor out = value(a);
    for (auto& v : out.data) v = v * sigmoid(v);
    int ia = a.id;
    int id = push(std::move(out), rq(a), [ia](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        const Tensor& x = t.nodes_[static_cast<size_t>(ia)].value;
        Tensor& dst = t.grad_ref(ia);
        for (size_t i = 0; i < dst.data.size(); ++i) {
            double s = sigmoid(x.data[i]);
            dst.data[i] += g.data[i] * s * (1.0 + x.data[i] * (1.0 - s));
        }
    });
    return Var{id};
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require(va.rank() == 2 && vb.rank() == 2 && va.dim(1) == vb.dim(0), ErrCategory::usage,
            "matmul: shape mismatch " + va.shape_str() + " x " + vb.shape_str());
    Tensor out({va.dim(0), vb.dim(1)});
    gemm(va.data.data(), va.dim(0), va.dim(1), false, vb.data.data(), vb.dim(0), vb.dim(1), false,
         out.data.data(), false);
    int ia = a.id, ib = b.id;
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        const Tensor& va2 = t.nodes_[static_cast<size_t>(ia)].value;
        const Tensor& vb2 = t.nodes_[static_cast<size_t>(ib)].value;
        if (t.nodes_[static_cast<size_t>(ia)].rq) {
            Tensor& dst = t.grad_ref(ia);  // dA += g * B^T
            gemm(g.data.data(), g.dim(0), g.dim(1), false, vb2.data.data(), vb2.dim(0), vb2.dim(1),
                 true, dst.data.data(), true);
        }
        if (t.nodes_[static_cast<size_t>(ib)].rq) {
            Tensor& dst = t.grad_ref(ib);  // dB += A^T * g
            gemm(va2.data.data(), va2.dim(0), va2.dim(1), true, g.data.data(), g.dim(0), g.dim(1),
                 false, dst.data.data(), true);
        }
    });
    return Var{id};
}

Var Tape::matmul_nt(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require(va.rank() == 2 && vb.rank() == 2 && va.dim(1) == vb.dim(1), ErrCategory::usage,
            "matmul_nt: shape mismatch " + va.shape_str() + " x " + vb.shape_str() + "^T");
    Tensor out({va.dim(0), vb.dim(0)});
    gemm(va.data.data(), va.dim(0), va.dim(1), false, vb.data.data(), vb.dim(0), vb.dim(1), true,
         out.data.data(), false);
    int ia = a.id, ib = b.id;
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        const Tensor& va2 = t.nodes_[static_cast<size_t>(ia)].value;
        const Tensor& vb2 = t.nodes_[static_cast<size_t>(ib)].value;
        if (t.nodes_[static_cast<size_t>(ia)].rq) {
            Tensor& dst = t.grad_ref(ia);  // dA += g * B
            gemm(g.data.data(), g.dim(0), g.dim(1), false, vb2.data.data(), vb2.dim(0), vb2.dim(1),
                 false, dst.data.data(), true);
        }
        if (t.nodes_[static_cast<size_t>(ib)].rq) {
            Tensor& dst = t.grad_ref(ib);  // dB += g^T * A
            gemm(g.data.data(), g.dim(0), g.dim(1), true, va2.data.data(), va2.dim(0), va2.dim(1),
                 false, dst.data.data(), true);
        }
    });
    return Var{id};
}

Var Tape::softmax_rows(Var a) {
    const Tensor& va = value(a);
    require(va.rank() == 2, ErrCategory::usage, "softmax_rows: expects rank 2");
    Tensor out = va;
    int n = va.dim(0), m = va.dim(1);
    for (int r = 0; r < n; ++r) {
        double mx = -1e300;
        for (int c = 0; c < m; ++c) mx = std::max(mx, out.at2(r, c));
        double sum = 0;
        for (int c = 0; c < m; ++c) {
            double e = std::exp(out.at2(r, c) - mx);
            out.at2(r, c) = e;
            sum += e;
        }
        for (int c = 0; c < m; ++c) out.at2(r, c) /= sum;
    }
    int ia = a.id;
    int id = push(std::move(out), rq(a), [ia](Tape& t) {
        int self = t.cursor_;
        const Tensor& g = t.nodes_[static_cast<size_t>(self)].grad;
        const Tensor& p = t.nodes_[static_cast<size_t>(self)].value;
        Tensor& dst = t.grad_ref(ia);
        int n2 = p.dim(0), m2 = p.dim(1);
        for (int r = 0; r < n2; ++r) {
            double dot = 0;
            for (int c = 0; c < m2; ++c) dot += g.at2(r, c) * p.at2(r, c);
            for (int c = 0; c < m2; ++c)
                dst.at2(r, c) += p.at2(r, c) * (g.at2(r, c) - dot);
        }
    });
    return Var{id};
}

Var Tape::conv2d(Var x, Var w, Var b, int stride, int pad) {
    const Tensor& vx = value(x);
    const Tensor& vw = value(w);
    const Tensor& vb = value(b);
    ConvDims d = conv_dims(vx, vw, stride, pad);
    require(vb.rank() == 1 && vb.dim(0) == d.co, ErrCategory::usage, "conv2d: bad bias shape");

    std::vector<double> col;
    im2col(vx, d, col);
    Tensor out({d.co, d.ho, d.wo});
    gemm(vw.data.data(), d.co, d.ci * d.k * d.k, false, col.data(), d.ci * d.k * d.k, d.ho * d.wo,
         false, out.data.data(), false);
    int hw = d.ho * d.wo;
    for (int co = 0; co < d.co; ++co) {
        double bias = vb.data[static_cast<size_t>(co)];
        double* row = out.data.data() + static_cast<size_t>(co) * hw;
        for (int i = 0; i < hw; ++i) row[i] += bias;
    }

    int ix = x.id, iw = w.id, ib = b.id;
    int id = push(std::move(out), rq(x) || rq(w) || rq(b), [ix, iw, ib, d](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        const Tensor& vx2 = t.nodes_[static_cast<size_t>(ix)].value;
        const Tensor& vw2 = t.nodes_[static_cast<size_t>(iw)].value;
        int hw2 = d.ho * d.wo;
        int kk = d.ci * d.k * d.k;
        if (t.nodes_[static_cast<size_t>(ib)].rq) {
            Tensor& db = t.grad_ref(ib);
            for (int co = 0; co < d.co; ++co) {
                double s = 0;
                const double* row = g.data.data() + static_cast<size_t>(co) * hw2;
                for (int i = 0; i < hw2; ++i) s += row[i];
                db.data[static_cast<size_t>(co)] += s;
            }
        }
        if (t.nodes_[static_cast<size_t>(iw)].rq) {
            std::vector<double> col2;
            im2col(vx2, d, col2);
            Tensor& dw = t.grad_ref(iw);  // dW += g [co, hw] * col^T [hw, kk]
            gemm(g.data.data(), d.co, hw2, false, col2.data(), kk, hw2, true, dw.data.data(), true);
        }
        if (t.nodes_[static_cast<size_t>(ix)].rq) {
            std::vector<double> dcol(static_cast<size_t>(kk) * hw2);
            gemm(vw2.data.data(), d.co, kk, true, g.data.data(), d.co, hw2, false, dcol.data(),
                 false);
            col2im_accum(dcol, d, t.grad_ref(ix));
        }
    });
    return Var{id};
}

Var Tape::upsample2(Var x) {
    const Tensor& vx = value(x);
    require(vx.rank() == 3, ErrCategory::usage, "upsample2: expects [c,h,w]");
    int c = vx.dim(0), h = vx.dim(1), w = vx.dim(2);
    Tensor out({c, 2 * h, 2 * w});
    for (int ci = 0; ci < c; ++ci)
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx) {
                double v = vx.at3(ci, y, xx);
                out.at3(ci, 2 * y, 2 * xx) = v;
                out.at3(ci, 2 * y, 2 * xx + 1) = v;
                out.at3(ci, 2 * y + 1, 2 * xx) = v;
                out.at3(ci, 2 * y + 1, 2 * xx + 1) = v;
            }
    int ix = x.id;
    int id = push(std::move(out), rq(x), [ix, c, h, w](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        Tensor& dst = t.grad_ref(ix);
        for (int ci = 0; ci < c; ++ci)
            for (int y = 0; y < h; ++y)
                for (int xx = 0; xx < w; ++xx)
                    dst.at3(ci, y, xx) += g.at3(ci, 2 * y, 2 * xx) + g.at3(ci, 2 * y, 2 * xx + 1) +
                                          g.at3(ci, 2 * y + 1, 2 * xx) +
                                          g.at3(ci, 2 * y + 1, 2 * xx + 1);
    });
    return Var{id};
}

Var Tape::group_norm(Var x, Var gamma, Var beta, int groups, double eps) {
    const Tensor& vx = value(x);
    require(vx.rank() == 3, ErrCategory::usage, "group_norm: expects [c,h,w]");
    int c = vx.dim(0), h = vx.dim(1), w = vx.dim(2);
    require(c % groups == 0, ErrCategory::usage, "group_norm: channels not divisible by groups");
    require(value(gamma).numel() == c && value(beta).numel() == c, ErrCategory::usage,
            "group_norm: affine shape mismatch");
    int cg = c / groups;
    int64_t gsize = static_cast<int64_t>(cg) * h * w;

    std::vector<double> mean(static_cast<size_t>(groups)), inv_std(static_cast<size_t>(groups));
    Tensor out = vx;
    const Tensor& vg = value(gamma);
    const Tensor& vbt = value(beta);
    for (int g = 0; g < groups; ++g) {
        const double* base = vx.data.data() + static_cast<size_t>(g) * gsize;
        double mu = 0;
        for (int64_t i = 0; i < gsize; ++i) mu += base[i];
        mu /= static_cast<double>(gsize);
        double var = 0;
        for (int64_t i = 0; i < gsize; ++i) {
            double d0 = base[i] - mu;
            var += d0 * d0;
        }
        var /= static_cast<double>(gsize);
        mean[static_cast<size_t>(g)] = mu;
        inv_std[static_cast<size_t>(g)] = 1.0 / std::sqrt(var + eps);
    }
    for (int ci = 0; ci < c; ++ci) {
        int g = ci / cg;
        double mu = mean[static_cast<size_t>(g)], is = inv_std[static_cast<size_t>(g)];
        double ga = vg.data[static_cast<size_t>(ci)], be = vbt.data[static_cast<size_t>(ci)];
        double* row = out.data.data() + static_cast<size_t>(ci) * h * w;
        for (int i = 0; i < h * w; ++i) row[i] = (row[i] - mu) * is * ga + be;
    }

    int ix = x.id, ig = gamma.id, ib = beta.id;
    int id = push(std::move(out), rq(x) || rq(gamma) || rq(beta),
                  [ix, ig, ib, groups, cg, h, w, mean, inv_std](Tape& t) {
        const Tensor& gout = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        const Tensor& vx2 = t.nodes_[static_cast<size_t>(ix)].value;
        const Tensor& vg2 = t.nodes_[static_cast<size_t>(ig)].value;
        int hw = h * w;
        int64_t gsize2 = static_cast<int64_t>(cg) * hw;
        bool need_dx = t.nodes_[static_cast<size_t>(ix)].rq;
        bool need_dg = t.nodes_[static_cast<size_t>(ig)].rq;
        bool need_db = t.nodes_[static_cast<size_t>(ib)].rq;
        for (int g = 0; g < groups; ++g) {
            double mu = mean[static_cast<size_t>(g)], is = inv_std[static_cast<size_t>(g)];
            // per-group reductions over xhat and dy*gamma
            double sum_t = 0, sum_tx = 0;
            for (int cc = 0; cc < cg; ++cc) {
                int ci = g * cg + cc;
                double ga = vg2.data[static_cast<size_t>(ci)];
                const double* xrow = vx2.data.data() + static_cast<size_t>(ci) * hw;
                const double* grow = gout.data.data() + static_cast<size_t>(ci) * hw;
                for (int i = 0; i < hw; ++i) {
                    double xhat = (xrow[i] - mu) * is;
                    double tg = grow[i] * ga;
                    sum_t += tg;
                    sum_tx += tg * xhat;
                }
            }
            double mt = sum_t / static_cast<double>(gsize2);
            double mtx = sum_tx / static_cast<double>(gsize2);
            for (int cc = 0; cc < cg; ++cc) {
                int ci = g * cg + cc;
                double ga = vg2.data[static_cast<size_t>(ci)];
                const double* xrow = vx2.data.data() + static_cast<size_t>(ci) * hw;
                const double* grow = gout.data.data() + static_cast<size_t>(ci) * hw;
                double dga = 0, dbe = 0;
                double* dxrow = need_dx ? t.grad_ref(ix).data.data() + static_cast<size_t>(ci) * hw
                                        : nullptr;
                for (int i = 0; i < hw; ++i) {
                    double xhat = (xrow[i] - mu) * is;
                    if (need_dx)
                        dxrow[i] += is * (grow[i] * ga - mt - xhat * mtx);
                    dga += grow[i] * xhat;
                    dbe += grow[i];
                }
                if (need_dg) t.grad_ref(ig).data[static_cast<size_t>(ci)] += dga;
                if (need_db) t.grad_ref(ib).data[static_cast<size_t>(ci)] += dbe;
            }
        }
    });
    return Var{id};
}

Var Tape::concat_rows(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require(va.rank() == 2 && vb.rank() == 2 && va.dim(1) == vb.dim(1), ErrCategory::usage,
            "concat_rows: shape mismatch");
    Tensor out({va.dim(0) + vb.dim(0), va.dim(1)});
    std::copy(va.data.begin(), va.data.end(), out.data.begin());
    std::copy(vb.data.begin(), vb.data.end(), out.data.begin() + va.numel());
    int ia = a.id, ib = b.id;
    int64_t na = va.numel(), nb = vb.numel();
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib, na, nb](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        if (t.nodes_[static_cast<size_t>(ia)].rq) t.accum_raw(ia, g.data.data(), na);
        if (t.nodes_[static_cast<size_t>(ib)].rq) t.accum_raw(ib, g.data.data() + na, nb);
    });
    return Var{id};
}

Var Tape::concat_channels(Var a, Var b) {
    const Tensor& va = value(a);
    const Tensor& vb = value(b);
    require(va.rank() == 3 && vb.rank() == 3 && va.dim(1) == vb.dim(1) && va.dim(2) == vb.dim(2),
            ErrCategory::usage, "concat_channels: shape mismatch");
    Tensor out({va.dim(0) + vb.dim(0), va.dim(1), va.dim(2)});
    std::copy(va.data.begin(), va.data.end(), out.data.begin());
    std::copy(vb.data.begin(), vb.data.end(), out.data.begin() + va.numel());
    int ia = a.id, ib = b.id;
    int64_t na = va.numel(), nb = vb.numel();
    int id = push(std::move(out), rq(a) || rq(b), [ia, ib, na, nb](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        if (t.nodes_[static_cast<size_t>(ia)].rq) t.accum_raw(ia, g.data.data(), na);
        if (t.nodes_[static_cast<size_t>(ib)].rq) t.accum_raw(ib, g.data.data() + na, nb);
    });
    return Var{id};
}

Var Tape::chw_tokens(Var x) {
    const Tensor& vx = value(x);
    require(vx.rank() == 3, ErrCategory::usage, "chw_tokens: expects [c,h,w]");
    int c = vx.dim(0), h = vx.dim(1), w = vx.dim(2);
    Tensor out({h * w, c});
    for (int ci = 0; ci < c; ++ci)
        for (int i = 0; i < h * w; ++i)
            out.at2(i, ci) = vx.data[static_cast<size_t>(ci) * h * w + i];
    int ix = x.id;
    int id = push(std::move(out), rq(x), [ix, c, h, w](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        Tensor& dst = t.grad_ref(ix);
        for (int ci = 0; ci < c; ++ci)
            for (int i = 0; i < h * w; ++i)
                dst.data[static_cast<size_t>(ci) * h * w + i] += g.at2(i, ci);
    });
    return Var{id};
}

Var Tape::tokens_chw(Var tok, int h, int w) {
    const Tensor& vt = value(tok);
    require(vt.rank() == 2 && vt.dim(0) == h * w, ErrCategory::usage,
            "tokens_chw: token count does not match h*w");
    int c = vt.dim(1);
    Tensor out({c, h, w});
    for (int ci = 0; ci < c; ++ci)
        for (int i = 0; i < h * w; ++i)
            out.data[static_cast<size_t>(ci) * h * w + i] = vt.at2(i, ci);
    int it = tok.id;
    int id = push(std::move(out), rq(tok), [it, c, h, w](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        Tensor& dst = t.grad_ref(it);
        for (int ci = 0; ci < c; ++ci)
            for (int i = 0; i < h * w; ++i)
                dst.at2(i, ci) += g.data[static_cast<size_t>(ci) * h * w + i];
    });
    return Var{id};
}

Var Tape::reshape(Var x, std::vector<int> shape) {
    const Tensor& vx = value(x);
    require(numel_of(shape) == vx.numel(), ErrCategory::usage, "reshape: numel mismatch");
    Tensor out = vx;
    out.shape = shape;
    int ix = x.id;
    int64_t n = vx.numel();
    int id = push(std::move(out), rq(x), [ix, n](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        t.accum_raw(ix, g.data.data(), n);
    });
    return Var{id};
}

Var Tape::gather_rows(Var table, const std::vector<int>& ids) {
    const Tensor& vt = value(table);
    require(vt.rank() == 2, ErrCategory::usage, "gather_rows: table must be rank 2");
    int d = vt.dim(1);
    Tensor out({static_cast<int>(ids.size()), d});
    for (size_t r = 0; r < ids.size(); ++r) {
        require(ids[r] >= 0 && ids[r] < vt.dim(0), ErrCategory::usage,
                "gather_rows: id out of range");
        std::copy(vt.data.begin() + static_cast<int64_t>(ids[r]) * d,
                  vt.data.begin() + static_cast<int64_t>(ids[r] + 1) * d,
                  out.data.begin() + static_cast<int64_t>(r) * d);
    }
    int it = table.id;
    std::vector<int> ids_copy = ids;
    int id = push(std::move(out), rq(table), [it, ids_copy, d](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        Tensor& dst = t.grad_ref(it);
        for (size_t r = 0; r < ids_copy.size(); ++r)
            for (int c = 0; c < d; ++c)
                dst.at2(ids_copy[r], c) += g.at2(static_cast<int>(r), c);
    });
    return Var{id};
}

Var Tape::add_row(Var x, Var row) {
    const Tensor& vx = value(x);
    const Tensor& vr = value(row);
    require(vx.rank() == 2 && vr.rank() == 1 && vr.dim(0) == vx.dim(1), ErrCategory::usage,
            "add_row: shape mismatch");
    Tensor out = vx;
    int n = vx.dim(0), d = vx.dim(1);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < d; ++c) out.at2(r, c) += vr.data[static_cast<size_t>(c)];
    int ix = x.id, ir = row.id;
    int id = push(std::move(out), rq(x) || rq(row), [ix, ir, n, d](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        if (t.nodes_[static_cast<size_t>(ix)].rq) t.accum(ix, g);
        if (t.nodes_[static_cast<size_t>(ir)].rq) {
            Tensor& dst = t.grad_ref(ir);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < d; ++c) dst.data[static_cast<size_t>(c)] += g.at2(r, c);
        }
    });
    return Var{id};
}

Var Tape::add_channel_bias(Var x, Var bias) {
    const Tensor& vx = value(x);
    const Tensor& vb = value(bias);
    require(vx.rank() == 3 && vb.rank() == 1 && vb.dim(0) == vx.dim(0), ErrCategory::usage,
            "add_channel_bias: shape mismatch");
    Tensor out = vx;
    int c = vx.dim(0), hw = vx.dim(1) * vx.dim(2);
    for (int ci = 0; ci < c; ++ci) {
        double b = vb.data[static_cast<size_t>(ci)];
        double* row = out.data.data() + static_cast<size_t>(ci) * hw;
        for (int i = 0; i < hw; ++i) row[i] += b;
    }
    int ix = x.id, ib = bias.id;
    int id = push(std::move(out), rq(x) || rq(bias), [ix, ib, c, hw](Tape& t) {
        const Tensor& g = t.nodes_[static_cast<size_t>(t.cursor_)].grad;
        if (t.nodes_[static_cast<size_t>(ix)].rq) t.accum(ix, g);
        if (t.nodes_[static_cast<size_t>(ib)].rq) {
            Tensor& dst = t.grad_ref(ib);
            for (int ci = 0; ci < c; ++ci) {
                double s = 0;
                const double* row = g.data.data() + static_cast<size_t>(ci) * hw;
                for (int i = 0; i < hw; ++i) s += row[i];
                dst.data[static_cast<size_t>(ci)] += s;
            }
        }
    });
    return Var{id};
}

Var Tape::mean_all(Var x) {
    const Tensor& vx = value(x);
    double s = 0;
    for (double v : vx.data) s += v;
    int64_t n = vx.numel();
    Tensor out = Tensor::scalar(s / static_cast<double>(n));
    int ix = x.id;
    int id = push(std::move(out), rq(x), [ix, n](Tape& t) {
        double g = t.nodes_[static_cast<size_t>(t.cursor_)].grad.data[0] / static_cast<double>(n);
        Tensor& dst = t.grad_ref(ix);
        for (auto& v : dst.data) v += g;
    });
    return Var{id};
}

Var Tape::sum_vars(const std::vector<Var>& xs) {
    require(!xs.empty(), ErrCategory::usage, "sum_vars: empty list");
    Var acc = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) acc = add(acc, xs[i]);
    return acc;
}

// ------------------------- initializers -------------------------------------

Tensor normal_init(std::vector<int> shape, double stddev, uint64_t seed) {
    Tensor t(std::move(shape));
    Prng rng(seed);
    for (auto& v : t.data) v = stddev * rng.normal();
    return t;
}

Tensor he_conv_init(int cout, int cin, int k, uint64_t seed) {
    double std_ = std::sqrt(2.0 / (static_cast<double>(cin) * k * k));
    return normal_init({cout, cin, k, k}, std_, seed);
}

Tensor he_linear_init(int dout, int din, uint64_t seed) {
    double std_ = std::sqrt(2.0 / static_cast<double>(din));
    return normal_init({dout, din}, std_, seed);
}

}  // namespace mfv::nn
