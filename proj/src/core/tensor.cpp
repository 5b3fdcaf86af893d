#include "tensor.hpp"

#include <cmath>
#include <sstream>

namespace mfv {

int64_t numel_of(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        require(d > 0, ErrCategory::usage, "tensor dimension must be positive");
        n *= d;
    }
    return n;
}

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(static_cast<size_t>(numel_of(shape)), 0.0);
}

Tensor Tensor::full(std::vector<int> s, double v) {
    Tensor t(std::move(s));
    for (auto& x : t.data) x = v;
    return t;
}

Tensor Tensor::scalar(double v) {
    Tensor t({1});
    t.data[0] = v;
    return t;
}

bool Tensor::all_finite() const {
    for (double x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

double Tensor::abs_max() const {
    double m = 0.0;
    for (double x : data) m = std::max(m, std::fabs(x));
    return m;
}

double Tensor::norm2() const {
    double s = 0.0;
    for (double x : data) s += x * x;
    return std::sqrt(s);
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

Tensor operator+(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), ErrCategory::usage, "tensor shape mismatch in +");
    Tensor r = a;
    for (size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
    return r;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), ErrCategory::usage, "tensor shape mismatch in -");
    Tensor r = a;
    for (size_t i = 0; i < r.data.size(); ++i) r.data[i] -= b.data[i];
    return r;
}

Tensor operator*(double s, const Tensor& a) {
    Tensor r = a;
    for (auto& x : r.data) x *= s;
    return r;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    require(a.same_shape(b), ErrCategory::usage, "tensor shape mismatch in max_abs_diff");
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::fabs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace mfv
