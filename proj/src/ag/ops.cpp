#include "ukp/ag/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace ukp::ag {

namespace {

// ---------------------------------------------------------------------------
// Broadcasting (trailing-dimension alignment)

constexpr int kMaxRank = 5;

struct BcPlan {
    Shape out;
    int rank = 0;
    int64_t dims[kMaxRank];
    int64_t sa[kMaxRank];  // element strides into a, 0 on broadcast dims
    int64_t sb[kMaxRank];
};

BcPlan broadcast_plan(const Shape& a, const Shape& b, const char* who) {
    if (a.size() > kMaxRank || b.size() > kMaxRank)
        throw DimensionError(std::string(who) + ": rank above " + std::to_string(kMaxRank));
    BcPlan p;
    p.rank = static_cast<int>(std::max(a.size(), b.size()));
    for (int d = 0; d < p.rank; ++d) {
        int ia = static_cast<int>(a.size()) - p.rank + d;
        int ib = static_cast<int>(b.size()) - p.rank + d;
        int64_t da = ia >= 0 ? a[ia] : 1;
        int64_t db = ib >= 0 ? b[ib] : 1;
        if (da != db && da != 1 && db != 1)
            throw DimensionError(std::string(who) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                                 " are not broadcast-compatible");
        p.dims[d] = std::max(da, db);
    }
    p.out.assign(p.dims, p.dims + p.rank);
    // strides
    int64_t stra = 1, strb = 1;
    int64_t tmpa[kMaxRank], tmpb[kMaxRank];
    for (int d = p.rank - 1; d >= 0; --d) {
        int ia = static_cast<int>(a.size()) - p.rank + d;
        int ib = static_cast<int>(b.size()) - p.rank + d;
        int64_t da = ia >= 0 ? a[ia] : 1;
        int64_t db = ib >= 0 ? b[ib] : 1;
        tmpa[d] = da == 1 ? 0 : stra;
        tmpb[d] = db == 1 ? 0 : strb;
        stra *= da;
        strb *= db;
    }
    std::copy(tmpa, tmpa + p.rank, p.sa);
    std::copy(tmpb, tmpb + p.rank, p.sb);
    return p;
}

template <typename F>
std::vector<float> broadcast_apply(const Tensor& a, const Tensor& b, const BcPlan& p, F&& f) {
    const float* pa = a.data();
    const float* pb = b.data();
    int64_t n = shape_numel(p.out);
    std::vector<float> out(static_cast<size_t>(n));
    if (a.shape() == b.shape()) {  // fast path
        for (int64_t i = 0; i < n; ++i) out[i] = f(pa[i], pb[i]);
        return out;
    }
    if (b.numel() == 1) {
        float vb = pb[0];
        for (int64_t i = 0; i < n; ++i) out[i] = f(pa[i], vb);
        return out;
    }
    if (a.numel() == 1) {
        float va = pa[0];
        for (int64_t i = 0; i < n; ++i) out[i] = f(va, pb[i]);
        return out;
    }
    int64_t idx[kMaxRank] = {0, 0, 0, 0, 0};
    int64_t offa = 0, offb = 0;
    for (int64_t i = 0; i < n; ++i) {
        out[i] = f(pa[offa], pb[offb]);
        for (int d = p.rank - 1; d >= 0; --d) {
            ++idx[d];
            offa += p.sa[d];
            offb += p.sb[d];
            if (idx[d] < p.dims[d]) break;
            offa -= p.sa[d] * p.dims[d];
            offb -= p.sb[d] * p.dims[d];
            idx[d] = 0;
        }
    }
    return out;
}

bool reducible_to(const Shape& from, const Shape& to) {
    if (to.size() > from.size()) return false;
    for (size_t d = 0; d < to.size(); ++d) {
        int64_t df = from[from.size() - to.size() + d];
        int64_t dt = to[d];
        if (dt != df && dt != 1) return false;
    }
    return true;
}

template <typename F>
std::vector<float> map_unary(const Tensor& x, F&& f) {
    const float* px = x.data();
    int64_t n = x.numel();
    std::vector<float> out(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) out[i] = f(px[i]);
    return out;
}

float sigmoid_val(float x) {
    if (x >= 0.0f) return 1.0f / (1.0f + std::exp(-x));
    float e = std::exp(x);
    return e / (1.0f + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// Binary elementwise

Tensor add(const Tensor& a, const Tensor& b) {
    BcPlan p = broadcast_plan(a.shape(), b.shape(), "add");
    auto out = broadcast_apply(a, b, p, [](float x, float y) { return x + y; });
    Shape sa = a.shape(), sb = b.shape();
    return make_op(p.out, std::move(out), "add", {a, b}, [sa, sb](const Tensor& g) {
        return std::vector<Tensor>{sum_to_shape(g, sa), sum_to_shape(g, sb)};
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    BcPlan p = broadcast_plan(a.shape(), b.shape(), "sub");
    auto out = broadcast_apply(a, b, p, [](float x, float y) { return x - y; });
    Shape sa = a.shape(), sb = b.shape();
    return make_op(p.out, std::move(out), "sub", {a, b}, [sa, sb](const Tensor& g) {
        return std::vector<Tensor>{sum_to_shape(g, sa), sum_to_shape(neg(g), sb)};
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    BcPlan p = broadcast_plan(a.shape(), b.shape(), "mul");
    auto out = broadcast_apply(a, b, p, [](float x, float y) { return x * y; });
    Shape sa = a.shape(), sb = b.shape();
    return make_op(p.out, std::move(out), "mul", {a, b}, [a, b, sa, sb](const Tensor& g) {
        return std::vector<Tensor>{sum_to_shape(mul(g, b), sa), sum_to_shape(mul(g, a), sb)};
    });
}

Tensor div(const Tensor& a, const Tensor& b) {
    BcPlan p = broadcast_plan(a.shape(), b.shape(), "div");
    auto out = broadcast_apply(a, b, p, [](float x, float y) { return x / y; });
    Shape sa = a.shape(), sb = b.shape();
    return make_op(p.out, std::move(out), "div", {a, b}, [a, b, sa, sb](const Tensor& g) {
        Tensor da = sum_to_shape(div(g, b), sa);
        Tensor db = sum_to_shape(neg(mul(g, div(a, square(b)))), sb);
        return std::vector<Tensor>{da, db};
    });
}

// ---------------------------------------------------------------------------
// Unary elementwise

Tensor neg(const Tensor& x) {
    return make_op(x.shape(), map_unary(x, [](float v) { return -v; }), "neg", {x},
                   [](const Tensor& g) { return std::vector<Tensor>{neg(g)}; });
}

Tensor scale(const Tensor& x, float s) {
    return make_op(x.shape(), map_unary(x, [s](float v) { return v * s; }), "scale", {x},
                   [s](const Tensor& g) { return std::vector<Tensor>{scale(g, s)}; });
}

Tensor add_scalar(const Tensor& x, float s) {
    return make_op(x.shape(), map_unary(x, [s](float v) { return v + s; }), "add_scalar", {x},
                   [](const Tensor& g) { return std::vector<Tensor>{g}; });
}

Tensor square(const Tensor& x) {
    return make_op(x.shape(), map_unary(x, [](float v) { return v * v; }), "square", {x},
                   [x](const Tensor& g) { return std::vector<Tensor>{mul(g, scale(x, 2.0f))}; });
}

Tensor sqrt(const Tensor& x) {
    return make_op(x.shape(), map_unary(x, [](float v) { return std::sqrt(v); }), "sqrt", {x},
                   [x](const Tensor& g) {
                       // d sqrt(x)/dx = 0.5 / sqrt(x), expressed via x so the
                       // second pass can differentiate it. The denominator is
                       // floored to keep 0 * inf out of zero-gradient paths.
                       constexpr float kFloor = 1e-6f;
                       Tensor root = sqrt(x);
                       Tensor guarded = add_scalar(relu(add_scalar(root, -kFloor)), kFloor);
                       return std::vector<Tensor>{div(scale(g, 0.5f), guarded)};
                   });
}

Tensor sigmoid(const Tensor& x) {
    return make_op(x.shape(), map_unary(x, sigmoid_val), "sigmoid", {x}, [x](const Tensor& g) {
        Tensor s = sigmoid(x);
        return std::vector<Tensor>{mul(g, mul(s, add_scalar(neg(s), 1.0f)))};
    });
}

Tensor relu(const Tensor& x) {
    return make_op(x.shape(), map_unary(x, [](float v) { return v > 0.0f ? v : 0.0f; }), "relu", {x},
                   [x](const Tensor& g) {
                       auto mask = map_unary(x, [](float v) { return v > 0.0f ? 1.0f : 0.0f; });
                       Tensor m = Tensor::from_data(x.shape(), std::move(mask));
                       return std::vector<Tensor>{mul(g, m)};
                   });
}

Tensor leaky_relu(const Tensor& x, float slope) {
    return make_op(x.shape(), map_unary(x, [slope](float v) { return v > 0.0f ? v : slope * v; }),
                   "leaky_relu", {x}, [x, slope](const Tensor& g) {
                       auto mask = map_unary(x, [slope](float v) { return v > 0.0f ? 1.0f : slope; });
                       Tensor m = Tensor::from_data(x.shape(), std::move(mask));
                       return std::vector<Tensor>{mul(g, m)};
                   });
}

Tensor signed_pow(const Tensor& x, float p) {
    if (p == 1.0f) return x;
    auto val = map_unary(x, [p](float v) {
        float a = std::pow(std::fabs(v), p);
        return v < 0.0f ? -a : a;
    });
    return make_op(x.shape(), std::move(val), "signed_pow", {x}, [x, p](const Tensor& g) {
        return std::vector<Tensor>{mul(g, scale(abs_pow(x, p - 1.0f), p))};
    });
}

Tensor abs_pow(const Tensor& x, float p) {
    auto val = map_unary(x, [p](float v) { return std::pow(std::fabs(v), p); });
    return make_op(x.shape(), std::move(val), "abs_pow", {x}, [x, p](const Tensor& g) {
        return std::vector<Tensor>{mul(g, scale(signed_pow(x, p - 1.0f), p))};
    });
}

// ---------------------------------------------------------------------------
// Reductions

Tensor sum_all(const Tensor& x) {
    const float* px = x.data();
    double acc = 0.0;
    for (int64_t i = 0; i < x.numel(); ++i) acc += px[i];
    Shape sx = x.shape();
    return make_op({1}, {static_cast<float>(acc)}, "sum_all", {x}, [sx](const Tensor& g) {
        return std::vector<Tensor>{add(Tensor::zeros(sx), g)};
    });
}

Tensor mean_all(const Tensor& x) { return scale(sum_all(x), 1.0f / static_cast<float>(x.numel())); }

Tensor sum_to_shape(const Tensor& x, const Shape& s) {
    if (x.shape() == s) return x;
    if (!reducible_to(x.shape(), s))
        throw DimensionError("sum_to_shape: cannot reduce " + shape_str(x.shape()) + " to " + shape_str(s));
    BcPlan p = broadcast_plan(s, x.shape(), "sum_to_shape");  // p.out == x.shape
    std::vector<float> out(static_cast<size_t>(shape_numel(s)), 0.0f);
    const float* px = x.data();
    int64_t n = x.numel();
    int64_t idx[kMaxRank] = {0, 0, 0, 0, 0};
    int64_t offo = 0;
    for (int64_t i = 0; i < n; ++i) {
        out[static_cast<size_t>(offo)] += px[i];
        for (int d = p.rank - 1; d >= 0; --d) {
            ++idx[d];
            offo += p.sa[d];
            if (idx[d] < p.dims[d]) break;
            offo -= p.sa[d] * p.dims[d];
            idx[d] = 0;
        }
    }
    Shape sx = x.shape();
    return make_op(s, std::move(out), "sum_to_shape", {x}, [sx](const Tensor& g) {
        return std::vector<Tensor>{add(Tensor::zeros(sx), g)};
    });
}

Tensor reduce_mean_last(const Tensor& x, int n_axes) {
    if (n_axes <= 0 || static_cast<size_t>(n_axes) >= x.rank() + 1)
        throw DimensionError("reduce_mean_last: invalid axis count");
    Shape lead(x.shape().begin(), x.shape().end() - n_axes);
    if (lead.empty()) lead = {1};
    int64_t v = 1;
    for (size_t d = x.rank() - n_axes; d < x.rank(); ++d) v *= x.shape()[d];
    int64_t m = shape_numel(lead);
    std::vector<float> out(static_cast<size_t>(m), 0.0f);
    const float* px = x.data();
    for (int64_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int64_t j = 0; j < v; ++j) acc += px[i * v + j];
        out[static_cast<size_t>(i)] = static_cast<float>(acc / static_cast<double>(v));
    }
    Shape sx = x.shape();
    int64_t vcap = v;
    return make_op(lead, std::move(out), "reduce_mean_last", {x}, [sx, lead, n_axes, vcap](const Tensor& g) {
        Shape gshape = lead;
        for (int i = 0; i < n_axes; ++i) gshape.push_back(1);
        Tensor gb = add(Tensor::zeros(sx), reshape(g, gshape));
        return std::vector<Tensor>{scale(gb, 1.0f / static_cast<float>(vcap))};
    });
}

namespace {

// Routing pair used by reduce_max_over_points' backward. Both are linear, so
// the gradient-penalty double pass works through them.
Tensor gather_rows_at(const Tensor& x, std::shared_ptr<std::vector<int64_t>> idx);

Tensor scatter_rows_at(const Tensor& g, std::shared_ptr<std::vector<int64_t>> idx, int64_t n_cols) {
    if (g.rank() != 1) throw DimensionError("scatter_rows_at: expected rank-1");
    int64_t c = g.dim(0);
    std::vector<float> out(static_cast<size_t>(c * n_cols), 0.0f);
    const float* pg = g.data();
    for (int64_t i = 0; i < c; ++i) out[static_cast<size_t>(i * n_cols + (*idx)[i])] = pg[i];
    return make_op({c, n_cols}, std::move(out), "scatter_rows_at", {g}, [idx](const Tensor& gg) {
        return std::vector<Tensor>{gather_rows_at(gg, idx)};
    });
}

Tensor gather_rows_at(const Tensor& x, std::shared_ptr<std::vector<int64_t>> idx) {
    if (x.rank() != 2) throw DimensionError("gather_rows_at: expected rank-2");
    int64_t c = x.dim(0), n = x.dim(1);
    std::vector<float> out(static_cast<size_t>(c));
    const float* px = x.data();
    for (int64_t i = 0; i < c; ++i) out[static_cast<size_t>(i)] = px[i * n + (*idx)[i]];
    return make_op({c}, std::move(out), "gather_rows_at", {x}, [idx, n](const Tensor& g) {
        return std::vector<Tensor>{scatter_rows_at(g, idx, n)};
    });
}

}  // namespace

Tensor reduce_max_over_points(const Tensor& x) {
    if (x.rank() != 2) throw DimensionError("reduce_max_over_points: expected [C x N], got " + shape_str(x.shape()));
    int64_t c = x.dim(0), n = x.dim(1);
    if (n < 1) throw DimensionError("reduce_max_over_points: empty point axis");
    std::vector<float> out(static_cast<size_t>(c));
    auto idx = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(c), 0);
    const float* px = x.data();
    for (int64_t i = 0; i < c; ++i) {
        float best = px[i * n];
        int64_t bj = 0;
        for (int64_t j = 1; j < n; ++j) {
            if (px[i * n + j] > best) {  // strict: ties go to the lowest index
                best = px[i * n + j];
                bj = j;
            }
        }
        out[static_cast<size_t>(i)] = best;
        (*idx)[static_cast<size_t>(i)] = bj;
    }
    return make_op({c}, std::move(out), "reduce_max_over_points", {x}, [idx, n](const Tensor& g) {
        return std::vector<Tensor>{scatter_rows_at(g, idx, n)};
    });
}

// ---------------------------------------------------------------------------
// Linear algebra

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2)
        throw DimensionError("matmul: expected rank-2 operands, got " + shape_str(a.shape()) + " and " +
                             shape_str(b.shape()));
    int64_t m = a.dim(0), k = a.dim(1), k2 = b.dim(0), n = b.dim(1);
    if (k != k2)
        throw DimensionError("matmul: inner dimensions disagree: " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    std::vector<float> out(static_cast<size_t>(m * n), 0.0f);
    const float* pa = a.data();
    const float* pb = b.data();
    for (int64_t i = 0; i < m; ++i) {
        float* orow = out.data() + i * n;
        for (int64_t l = 0; l < k; ++l) {
            float av = pa[i * k + l];
            const float* brow = pb + l * n;
            for (int64_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    return make_op({m, n}, std::move(out), "matmul", {a, b}, [a, b](const Tensor& g) {
        return std::vector<Tensor>{matmul(g, transpose2d(b)), matmul(transpose2d(a), g)};
    });
}

Tensor transpose2d(const Tensor& x) {
    if (x.rank() != 2) throw DimensionError("transpose2d: expected rank-2, got " + shape_str(x.shape()));
    int64_t r = x.dim(0), c = x.dim(1);
    std::vector<float> out(static_cast<size_t>(r * c));
    const float* px = x.data();
    for (int64_t i = 0; i < r; ++i)
        for (int64_t j = 0; j < c; ++j) out[static_cast<size_t>(j * r + i)] = px[i * c + j];
    return make_op({c, r}, std::move(out), "transpose2d", {x},
                   [](const Tensor& g) { return std::vector<Tensor>{transpose2d(g)}; });
}

// ---------------------------------------------------------------------------
// Shape & indexing

Tensor reshape(const Tensor& x, const Shape& s) {
    if (shape_numel(s) != x.numel())
        throw DimensionError("reshape: " + shape_str(x.shape()) + " to " + shape_str(s) + " changes element count");
    Shape sx = x.shape();
    // Row-major reshape is a relabeling; copy keeps node ownership simple.
    return make_op(s, x.vec(), "reshape", {x}, [sx](const Tensor& g) {
        return std::vector<Tensor>{reshape(g, sx)};
    });
}

namespace {

Tensor embed_rows(const Tensor& g, int64_t row_begin, int64_t total_rows);

}

Tensor slice_rows(const Tensor& x, int64_t row_begin, int64_t row_end) {
    if (x.rank() < 1) throw DimensionError("slice_rows: rank-0 input");
    int64_t rows = x.dim(0);
    if (row_begin < 0 || row_end > rows || row_begin >= row_end)
        throw DimensionError("slice_rows: bad range [" + std::to_string(row_begin) + "," + std::to_string(row_end) +
                             ") of " + std::to_string(rows));
    int64_t rsz = x.numel() / rows;
    Shape s = x.shape();
    s[0] = row_end - row_begin;
    std::vector<float> out(static_cast<size_t>((row_end - row_begin) * rsz));
    std::memcpy(out.data(), x.data() + row_begin * rsz, out.size() * sizeof(float));
    return make_op(s, std::move(out), "slice_rows", {x}, [row_begin, rows](const Tensor& g) {
        return std::vector<Tensor>{embed_rows(g, row_begin, rows)};
    });
}

namespace {

Tensor embed_rows(const Tensor& g, int64_t row_begin, int64_t total_rows) {
    int64_t rows = g.dim(0);
    int64_t rsz = g.numel() / rows;
    Shape s = g.shape();
    s[0] = total_rows;
    std::vector<float> out(static_cast<size_t>(total_rows * rsz), 0.0f);
    std::memcpy(out.data() + row_begin * rsz, g.data(), static_cast<size_t>(rows * rsz) * sizeof(float));
    int64_t row_end = row_begin + rows;
    return make_op(s, std::move(out), "embed_rows", {g}, [row_begin, row_end](const Tensor& gg) {
        return std::vector<Tensor>{slice_rows(gg, row_begin, row_end)};
    });
}

}  // namespace

Tensor concat0(const Tensor& a, const Tensor& b) {
    if (a.rank() != b.rank() || a.rank() < 1)
        throw DimensionError("concat0: rank mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
    for (size_t d = 1; d < a.rank(); ++d)
        if (a.shape()[d] != b.shape()[d])
            throw DimensionError("concat0: trailing dims disagree: " + shape_str(a.shape()) + " vs " +
                                 shape_str(b.shape()));
    Shape s = a.shape();
    s[0] += b.shape()[0];
    std::vector<float> out(static_cast<size_t>(shape_numel(s)));
    std::memcpy(out.data(), a.data(), static_cast<size_t>(a.numel()) * sizeof(float));
    std::memcpy(out.data() + a.numel(), b.data(), static_cast<size_t>(b.numel()) * sizeof(float));
    int64_t a0 = a.dim(0), b0 = b.dim(0);
    return make_op(s, std::move(out), "concat0", {a, b}, [a0, b0](const Tensor& g) {
        return std::vector<Tensor>{slice_rows(g, 0, a0), slice_rows(g, a0, a0 + b0)};
    });
}

Tensor gather_cols(const Tensor& x, const std::vector<int64_t>& idx) {
    if (x.rank() != 2) throw DimensionError("gather_cols: expected rank-2, got " + shape_str(x.shape()));
    int64_t r = x.dim(0), n = x.dim(1);
    for (int64_t j : idx)
        if (j < 0 || j >= n) throw DimensionError("gather_cols: index out of range");
    int64_t k = static_cast<int64_t>(idx.size());
    std::vector<float> out(static_cast<size_t>(r * k));
    const float* px = x.data();
    for (int64_t i = 0; i < r; ++i)
        for (int64_t j = 0; j < k; ++j) out[static_cast<size_t>(i * k + j)] = px[i * n + idx[j]];
    auto idx_copy = idx;
    return make_op({r, k}, std::move(out), "gather_cols", {x}, [idx_copy, n](const Tensor& g) {
        return std::vector<Tensor>{scatter_cols(g, idx_copy, n)};
    });
}

Tensor scatter_cols(const Tensor& g, const std::vector<int64_t>& idx, int64_t n) {
    if (g.rank() != 2) throw DimensionError("scatter_cols: expected rank-2");
    int64_t r = g.dim(0), k = g.dim(1);
    if (k != static_cast<int64_t>(idx.size())) throw DimensionError("scatter_cols: index count mismatch");
    std::vector<float> out(static_cast<size_t>(r * n), 0.0f);
    const float* pg = g.data();
    for (int64_t i = 0; i < r; ++i)
        for (int64_t j = 0; j < k; ++j) out[static_cast<size_t>(i * n + idx[j])] += pg[i * k + j];
    auto idx_copy = idx;
    return make_op({r, n}, std::move(out), "scatter_cols", {g}, [idx_copy](const Tensor& gg) {
        return std::vector<Tensor>{gather_cols(gg, idx_copy)};
    });
}

// ---------------------------------------------------------------------------
// Convolutions

namespace {

struct Conv3dDims {
    int64_t batch, cin, w, h, d;
    int64_t cout, k;
    int64_t ow, oh, od;
    bool batched;
};

Conv3dDims conv3d_dims(const Tensor& input, const Tensor& kernels, int stride, int padding) {
    Conv3dDims dd{};
    if (kernels.rank() != 5) throw DimensionError("conv3d: kernels must be [Cout x Cin x k x k x k]");
    if (kernels.dim(2) != kernels.dim(3) || kernels.dim(3) != kernels.dim(4))
        throw DimensionError("conv3d: only cubic kernels supported");
    if (input.rank() == 4) {
        dd.batched = false;
        dd.batch = 1;
        dd.cin = input.dim(0);
        dd.w = input.dim(1);
        dd.h = input.dim(2);
        dd.d = input.dim(3);
    } else if (input.rank() == 5) {
        dd.batched = true;
        dd.batch = input.dim(0);
        dd.cin = input.dim(1);
        dd.w = input.dim(2);
        dd.h = input.dim(3);
        dd.d = input.dim(4);
    } else {
        throw DimensionError("conv3d: input must be rank 4 or 5, got " + shape_str(input.shape()));
    }
    dd.cout = kernels.dim(0);
    dd.k = kernels.dim(2);
    if (kernels.dim(1) != dd.cin)
        throw DimensionError("conv3d: kernel Cin " + std::to_string(kernels.dim(1)) + " != input Cin " +
                             std::to_string(dd.cin));
    if (stride < 1) throw DimensionError("conv3d: stride must be >= 1");
    if (padding < 0) throw DimensionError("conv3d: negative padding");
    auto osz = [&](int64_t in) { return (in + 2 * padding - dd.k) / stride + 1; };
    dd.ow = osz(dd.w);
    dd.oh = osz(dd.h);
    dd.od = osz(dd.d);
    if (dd.ow < 1 || dd.oh < 1 || dd.od < 1)
        throw DimensionError("conv3d: non-positive output dims for input " + shape_str(input.shape()));
    return dd;
}

// Gather padded patches of one sample into [Cin*k^3 x ow*oh*od], rows ordered
// to match the row-major kernel layout.
void im2col(const float* x, const Conv3dDims& dd, int stride, int padding, float* cols) {
    int64_t nvox = dd.ow * dd.oh * dd.od;
    int64_t k = dd.k;
    for (int64_t ci = 0; ci < dd.cin; ++ci) {
        const float* xc = x + ci * dd.w * dd.h * dd.d;
        for (int64_t kx = 0; kx < k; ++kx)
            for (int64_t ky = 0; ky < k; ++ky)
                for (int64_t kz = 0; kz < k; ++kz) {
                    float* crow = cols + (((ci * k + kx) * k + ky) * k + kz) * nvox;
                    int64_t v = 0;
                    for (int64_t ox = 0; ox < dd.ow; ++ox) {
                        int64_t ix = ox * stride - padding + kx;
                        bool xin = ix >= 0 && ix < dd.w;
                        for (int64_t oy = 0; oy < dd.oh; ++oy) {
                            int64_t iy = oy * stride - padding + ky;
                            bool yin = iy >= 0 && iy < dd.h;
                            for (int64_t oz = 0; oz < dd.od; ++oz, ++v) {
                                int64_t iz = oz * stride - padding + kz;
                                crow[v] = (xin && yin && iz >= 0 && iz < dd.d)
                                              ? xc[(ix * dd.h + iy) * dd.d + iz]
                                              : 0.0f;
                            }
                        }
                    }
                }
    }
}

void col2im_add(const float* cols, const Conv3dDims& dd, int stride, int padding, float* x) {
    int64_t nvox = dd.ow * dd.oh * dd.od;
    int64_t k = dd.k;
    for (int64_t ci = 0; ci < dd.cin; ++ci) {
        float* xc = x + ci * dd.w * dd.h * dd.d;
        for (int64_t kx = 0; kx < k; ++kx)
            for (int64_t ky = 0; ky < k; ++ky)
                for (int64_t kz = 0; kz < k; ++kz) {
                    const float* crow = cols + (((ci * k + kx) * k + ky) * k + kz) * nvox;
                    int64_t v = 0;
                    for (int64_t ox = 0; ox < dd.ow; ++ox) {
                        int64_t ix = ox * stride - padding + kx;
                        bool xin = ix >= 0 && ix < dd.w;
                        for (int64_t oy = 0; oy < dd.oh; ++oy) {
                            int64_t iy = oy * stride - padding + ky;
                            bool yin = iy >= 0 && iy < dd.h;
                            for (int64_t oz = 0; oz < dd.od; ++oz, ++v) {
                                int64_t iz = oz * stride - padding + kz;
                                if (xin && yin && iz >= 0 && iz < dd.d)
                                    xc[(ix * dd.h + iy) * dd.d + iz] += crow[v];
                            }
                        }
                    }
                }
    }
}

// C[m x n] += A[m x k] * B[k x n]
void gemm_acc(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        float* crow = c + i * n;
        for (int64_t l = 0; l < k; ++l) {
            float av = a[i * k + l];
            const float* brow = b + l * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[m x n] += A^T (A is [k x m]) * B[k x n]
void gemm_at_acc(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
    for (int64_t l = 0; l < k; ++l) {
        const float* arow = a + l * m;
        const float* brow = b + l * n;
        for (int64_t i = 0; i < m; ++i) {
            float av = arow[i];
            float* crow = c + i * n;
            for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[m x n] += A[m x k] * B^T (B is [n x k])
void gemm_bt_acc(const float* a, const float* b, float* c, int64_t m, int64_t k, int64_t n) {
    for (int64_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        float* crow = c + i * n;
        for (int64_t j = 0; j < n; ++j) {
            const float* brow = b + j * k;
            float acc = 0.0f;
            for (int64_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] += acc;
        }
    }
}

}  // namespace

Tensor conv3d(const Tensor& input, const Tensor& kernels, int stride, int padding) {
    Conv3dDims dd = conv3d_dims(input, kernels, stride, padding);
    int64_t nvox = dd.ow * dd.oh * dd.od;
    int64_t krows = dd.cin * dd.k * dd.k * dd.k;
    std::vector<float> out(static_cast<size_t>(dd.batch * dd.cout * nvox), 0.0f);
    std::vector<float> cols(static_cast<size_t>(krows * nvox));
    const float* px = input.data();
    const float* pk = kernels.data();
    int64_t in_sample = dd.cin * dd.w * dd.h * dd.d;
    for (int64_t b = 0; b < dd.batch; ++b) {
        im2col(px + b * in_sample, dd, stride, padding, cols.data());
        gemm_acc(pk, cols.data(), out.data() + b * dd.cout * nvox, dd.cout, krows, nvox);
    }
    Shape oshape = dd.batched ? Shape{dd.batch, dd.cout, dd.ow, dd.oh, dd.od}
                              : Shape{dd.cout, dd.ow, dd.oh, dd.od};
    return make_op(oshape, std::move(out), "conv3d", {input, kernels},
                   [input, kernels, stride, padding, dd](const Tensor& g) {
                       if (recording_enabled())
                           throw GraphError("conv3d: double differentiation is not supported");
                       int64_t nvox = dd.ow * dd.oh * dd.od;
                       int64_t krows = dd.cin * dd.k * dd.k * dd.k;
                       int64_t in_sample = dd.cin * dd.w * dd.h * dd.d;
                       std::vector<float> dx(static_cast<size_t>(input.numel()), 0.0f);
                       std::vector<float> dk(static_cast<size_t>(kernels.numel()), 0.0f);
                       std::vector<float> cols(static_cast<size_t>(krows * nvox));
                       std::vector<float> colg(static_cast<size_t>(krows * nvox));
                       const float* pg = g.data();
                       const float* px = input.data();
                       const float* pk = kernels.data();
                       for (int64_t b = 0; b < dd.batch; ++b) {
                           const float* gs = pg + b * dd.cout * nvox;
                           im2col(px + b * in_sample, dd, stride, padding, cols.data());
                           // dK += g_s * cols^T
                           gemm_bt_acc(gs, cols.data(), dk.data(), dd.cout, nvox, krows);
                           // dX_s = col2im(K^T * g_s)
                           std::fill(colg.begin(), colg.end(), 0.0f);
                           gemm_at_acc(pk, gs, colg.data(), krows, dd.cout, nvox);
                           col2im_add(colg.data(), dd, stride, padding, dx.data() + b * in_sample);
                       }
                       Tensor dxt = Tensor::from_data(input.shape(), std::move(dx));
                       Tensor dkt = Tensor::from_data(kernels.shape(), std::move(dk));
                       return std::vector<Tensor>{dxt, dkt};
                   });
}

Tensor conv1d_pointwise(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (input.rank() != 2) throw DimensionError("conv1d_pointwise: input must be [Cin x N]");
    if (weights.rank() != 2 || weights.dim(1) != input.dim(0))
        throw DimensionError("conv1d_pointwise: weights " + shape_str(weights.shape()) + " do not match input " +
                             shape_str(input.shape()));
    Tensor y = matmul(weights, input);
    if (bias.defined()) y = add(y, bias);
    return y;
}

// ---------------------------------------------------------------------------

Tensor l2_normalize(const Tensor& x) {
    constexpr float kEps = 1e-8f;
    if (x.rank() == 1) {
        Tensor n = sqrt(sum_all(square(x)));
        Tensor guarded = add_scalar(relu(add_scalar(n, -kEps)), kEps);  // max(n, eps)
        return div(x, guarded);
    }
    if (x.rank() == 2) {
        Tensor ones = Tensor::full({1, x.dim(0)}, 1.0f);
        Tensor n = sqrt(matmul(ones, square(x)));  // [1 x N] column norms
        Tensor guarded = add_scalar(relu(add_scalar(n, -kEps)), kEps);
        return div(x, guarded);
    }
    throw DimensionError("l2_normalize: expected rank-1 or rank-2, got " + shape_str(x.shape()));
}

}  // namespace ukp::ag
