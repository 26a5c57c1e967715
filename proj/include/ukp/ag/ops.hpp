#pragma once

#include "ukp/ag/tensor.hpp"

namespace ukp::ag {

// Binary elementwise ops broadcast with trailing-dimension alignment: shapes
// are right-aligned and each aligned pair must be equal or contain a 1.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor neg(const Tensor& x);
Tensor scale(const Tensor& x, float s);
Tensor add_scalar(const Tensor& x, float s);
Tensor square(const Tensor& x);
Tensor sqrt(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, float slope);
// sign(x) * |x|^p, the odd extension of the power function. Exact identity at
// p = 1, plain power for non-negative input.
Tensor signed_pow(const Tensor& x, float p);
Tensor abs_pow(const Tensor& x, float p);

Tensor sum_all(const Tensor& x);                      // -> [1]
Tensor mean_all(const Tensor& x);                     // -> [1]
Tensor sum_to_shape(const Tensor& x, const Shape& s); // reduce broadcast dims
Tensor reduce_mean_last(const Tensor& x, int n_axes); // mean over trailing axes

// Per-row max over the last axis of a rank-2 tensor [C x N] -> [C].
// Gradient routes to the lowest-index argmax of each row.
Tensor reduce_max_over_points(const Tensor& x);

Tensor matmul(const Tensor& a, const Tensor& b);      // [m x k] * [k x n]
Tensor transpose2d(const Tensor& x);

Tensor reshape(const Tensor& x, const Shape& s);
// Concatenate along axis 0; ranks must match and trailing dims agree.
Tensor concat0(const Tensor& a, const Tensor& b);
Tensor slice_rows(const Tensor& x, int64_t row_begin, int64_t row_end);
// Select columns of a rank-2 tensor: out[:, j] = x[:, idx[j]].
Tensor gather_cols(const Tensor& x, const std::vector<int64_t>& idx);
// Inverse of gather_cols: scatter-add columns of g into an [R x n] zero tensor.
Tensor scatter_cols(const Tensor& g, const std::vector<int64_t>& idx, int64_t n);

// Cross-correlation over three spatial axes. Input is [Cin x W x H x D] or
// batched [B x Cin x W x H x D]; kernels are [Cout x Cin x k x k x k].
// Backward is native and does not support double differentiation.
Tensor conv3d(const Tensor& input, const Tensor& kernels, int stride, int padding);

// Kernel-size-1 convolution along the point axis: weights [Cout x Cin] applied
// to every column of [Cin x N]. Optional bias is [Cout x 1].
Tensor conv1d_pointwise(const Tensor& input, const Tensor& weights, const Tensor& bias = Tensor());

// v / max(||v||_2, 1e-8) applied to each column of [F x N] (or to a single
// rank-1 vector [F]).
Tensor l2_normalize(const Tensor& x);

}  // namespace ukp::ag
