#include "ukp/train/losses.hpp"

#include <cmath>

#include "ukp/geom/chamfer.hpp"

namespace ukp::train {

using ag::Tensor;
using geom::Vec3;

namespace {

Tensor abs_op(const Tensor& x) { return ag::add(ag::relu(x), ag::relu(ag::neg(x))); }

std::vector<Vec3> tensor_points(const Tensor& t) {
    int64_t m = t.dim(1);
    const float* d = t.data();
    std::vector<Vec3> out;
    out.reserve(static_cast<size_t>(m));
    for (int64_t j = 0; j < m; ++j)
        out.emplace_back(d[j], d[m + j], d[2 * m + j]);
    return out;
}

Tensor const_points(const std::vector<Vec3>& pts, const std::vector<int64_t>& idx) {
    int64_t m = static_cast<int64_t>(idx.size());
    std::vector<float> data(static_cast<size_t>(3 * m));
    for (int64_t j = 0; j < m; ++j) {
        const Vec3& p = pts[static_cast<size_t>(idx[static_cast<size_t>(j)])];
        data[static_cast<size_t>(j)] = p.x;
        data[static_cast<size_t>(m + j)] = p.y;
        data[static_cast<size_t>(2 * m + j)] = p.z;
    }
    return Tensor::from_data({3, m}, std::move(data));
}

}  // namespace

Tensor chamfer_loss(const Tensor& decoded, const std::vector<Vec3>& target) {
    if (decoded.rank() != 2 || decoded.dim(0) != 3)
        throw DimensionError("chamfer_loss: decoded must be [3 x M]");
    if (target.empty()) throw GeometryError("chamfer_loss: empty target");
    std::vector<Vec3> dec_pts = tensor_points(decoded);

    // decoded -> target term
    std::vector<int64_t> to_target = geom::nearest_indices(dec_pts, target);
    Tensor matched_t = const_points(target, to_target);
    Tensor d1 = ag::sub(decoded, matched_t);
    Tensor term_a = ag::scale(ag::sum_all(ag::square(d1)), 1.0f / static_cast<float>(dec_pts.size()));

    // target -> decoded term
    std::vector<int64_t> to_decoded = geom::nearest_indices(target, dec_pts);
    Tensor gathered = ag::gather_cols(decoded, to_decoded);
    std::vector<int64_t> all_t(target.size());
    for (size_t i = 0; i < target.size(); ++i) all_t[i] = static_cast<int64_t>(i);
    Tensor target_t = const_points(target, all_t);
    Tensor d2 = ag::sub(gathered, target_t);
    Tensor term_b = ag::scale(ag::sum_all(ag::square(d2)), 1.0f / static_cast<float>(target.size()));

    return ag::add(term_a, term_b);
}

Tensor recon_loss(const model::UkpModel& model, const Tensor& saliency, const Tensor& embeddings,
                  const std::vector<Vec3>& target) {
    Tensor g = model.global_feature(saliency, embeddings);
    Tensor decoded = model.decode(g);
    return chamfer_loss(decoded, target);
}

CriticLoss critic_loss(const std::vector<std::vector<float>>& real_rows,
                       const std::vector<std::vector<float>>& fake_rows, const model::UkpModel& model,
                       float lambda_gp, Rng& rng) {
    if (real_rows.size() != fake_rows.size() || real_rows.empty())
        throw TrainingError("critic_loss: real/fake batch shapes disagree");
    const float inv_b = 1.0f / static_cast<float>(real_rows.size());

    Tensor wass_sum = Tensor::zeros({1});
    Tensor pen_sum = Tensor::zeros({1});
    for (size_t b = 0; b < real_rows.size(); ++b) {
        if (real_rows[b].size() != fake_rows[b].size())
            throw TrainingError("critic_loss: sample length mismatch");
        int64_t n = static_cast<int64_t>(real_rows[b].size());
        Tensor real_t = Tensor::from_data({1, n}, real_rows[b]);
        Tensor fake_t = Tensor::from_data({1, n}, fake_rows[b]);
        Tensor d_real = model.critic_score(real_t);
        Tensor d_fake = model.critic_score(fake_t);
        wass_sum = ag::add(wass_sum, ag::sub(d_fake, d_real));

        float eps = static_cast<float>(rng.uniform01());
        std::vector<float> mix(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i)
            mix[static_cast<size_t>(i)] = eps * real_rows[b][static_cast<size_t>(i)] +
                                          (1.0f - eps) * fake_rows[b][static_cast<size_t>(i)];
        Tensor xhat = Tensor::from_data({1, n}, std::move(mix));
        xhat.set_requires_grad(true);
        Tensor d_hat = model.critic_score(xhat);
        Tensor grad = ag::tape::grad_of_scalar_wrt(d_hat, xhat, /*create_graph=*/true);
        // small floor keeps the norm differentiable at zero gradient
        Tensor norm = ag::sqrt(ag::add_scalar(ag::sum_all(ag::square(grad)), 1e-12f));
        pen_sum = ag::add(pen_sum, ag::square(ag::add_scalar(norm, -1.0f)));
    }
    CriticLoss out;
    Tensor wass = ag::scale(wass_sum, inv_b);
    Tensor pen = ag::scale(pen_sum, inv_b);
    out.total = ag::add(wass, ag::scale(pen, lambda_gp));
    out.wasserstein = wass.item();
    out.penalty = pen.item();
    if (!std::isfinite(out.total.item()))
        throw TrainingError("critic_loss: non-finite value (penalty " + std::to_string(out.penalty) + ")");
    return out;
}

Tensor generator_gan_loss(const std::vector<ag::Tensor>& fake_rows, const model::UkpModel& model) {
    if (fake_rows.empty()) throw TrainingError("generator_gan_loss: empty batch");
    Tensor sum = Tensor::zeros({1});
    for (const Tensor& row : fake_rows) sum = ag::add(sum, model.critic_score(row));
    return ag::neg(ag::scale(sum, 1.0f / static_cast<float>(fake_rows.size())));
}

Tensor sym_loss(const Tensor& saliency, const Tensor& embeddings,
                const std::vector<std::pair<int64_t, int64_t>>& pairs) {
    if (pairs.empty()) return Tensor::zeros({1});
    std::vector<int64_t> left, right;
    left.reserve(pairs.size());
    right.reserve(pairs.size());
    for (auto [i, j] : pairs) {
        left.push_back(i);
        right.push_back(j);
    }
    Tensor dphi = abs_op(ag::sub(ag::gather_cols(saliency, left), ag::gather_cols(saliency, right)));
    Tensor dh = abs_op(ag::sub(ag::gather_cols(embeddings, left), ag::gather_cols(embeddings, right)));
    float inv = 1.0f / static_cast<float>(pairs.size());
    return ag::scale(ag::add(ag::sum_all(dphi), ag::sum_all(dh)), inv);
}

}  // namespace ukp::train
