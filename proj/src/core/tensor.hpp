#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"

namespace mfv {

// Dense row-major double tensor. Shapes used in practice are rank 1..4:
//   [n]          vectors / biases
//   [n, d]       token matrices
//   [c, h, w]    feature maps and latents
//   [co, ci, kh, kw] conv kernels
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s);

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }
    static Tensor full(std::vector<int> s, double v);
    static Tensor scalar(double v);

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    int rank() const { return static_cast<int>(shape.size()); }
    int dim(int i) const { return shape[static_cast<size_t>(i)]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    double& operator[](int64_t i) { return data[static_cast<size_t>(i)]; }
    double operator[](int64_t i) const { return data[static_cast<size_t>(i)]; }

    // [r, c] accessor for rank-2
    double& at2(int r, int c) { return data[static_cast<size_t>(r) * shape[1] + c]; }
    double at2(int r, int c) const { return data[static_cast<size_t>(r) * shape[1] + c]; }

    // [c, y, x] accessor for rank-3
    double& at3(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * shape[1] + y) * shape[2] + x];
    }
    double at3(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * shape[1] + y) * shape[2] + x];
    }

    bool all_finite() const;
    double abs_max() const;
    double norm2() const;  // sqrt(sum of squares)

    std::string shape_str() const;
};

int64_t numel_of(const std::vector<int>& shape);

// elementwise helpers on raw tensors (no autodiff)
Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(double s, const Tensor& a);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace mfv
