// Acceptance suite: one pass/fail line per criterion. Training-backed
// criteria run on desk-scale configurations of the full pipeline; oracle
// criteria check implementations against independent references.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <vector>

#include "../fd_check.hpp"
#include "../ref64.hpp"
#include "ukp/data/dataset.hpp"
#include "ukp/eval/metrics.hpp"
#include "ukp/geom/chamfer.hpp"
#include "ukp/geom/nms.hpp"
#include "ukp/geom/grid_index.hpp"
#include "ukp/geom/rotation.hpp"
#include "ukp/geom/symmetry.hpp"
#include "ukp/model/beta.hpp"
#include "ukp/model/model.hpp"
#include "ukp/train/losses.hpp"
#include "ukp/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace ukp;
using ag::Tensor;
using geom::PointCloud;
using geom::Vec3;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Tensor random_tensor(const ag::Shape& s, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<float> d(static_cast<size_t>(ag::shape_numel(s)));
    for (auto& v : d) v = static_cast<float>(rng.uniform(lo, hi));
    return Tensor::from_data(s, std::move(d));
}

// Desk-scale architecture: every module of the reference design at reduced
// width so the adversarial runs fit a CPU budget.
model::RunConfig desk_config() {
    model::RunConfig cfg;
    cfg.sdv_grid = 8;
    cfg.lrf_radius = 0.35f;
    cfg.encoder_channels = {8, 8, 16, 16, 32, 32, 32};
    cfg.encoder_strides = {1, 2, 1, 2, 1, 2, 1};
    cfg.trunk_widths = {64, 32};
    cfg.embed_dim = 16;
    cfg.critic_channels = {64, 32, 16, 1};
    cfg.decoder_leaves = 256;
    cfg.lr = 1e-3f;
    cfg.batch_size = 8;
    cfg.critic_steps_per_gen = 5;
    cfg.seed = 11;
    cfg.beta_alpha = 0.01f;
    cfg.beta_beta = 0.3f;
    return cfg;
}

struct TrainedRun {
    model::RunConfig cfg;
    std::vector<PointCloud> test_clouds;
    std::string model_dir;
    double minutes = 0.0;
};

TrainedRun train_run(const std::string& name, const std::vector<data::ShapeFamily>& families,
                     int epochs, const std::string& ablation, int64_t train_per_family,
                     int64_t test_per_family, uint64_t corpus_seed) {
    auto t0 = std::chrono::steady_clock::now();
    data::CorpusCounts counts;
    counts.train = train_per_family;
    counts.val = 0;
    counts.test = test_per_family;
    data::Corpus corpus = data::build_corpus(families, counts, 256, 0.004f, corpus_seed);

    TrainedRun run;
    run.cfg = desk_config();
    run.cfg.epochs = epochs;
    if (!ablation.empty()) run.cfg.set_ablation(ablation);
    run.model_dir = (fs::temp_directory_path() / ("ukp_acceptance_" + name)).string();
    fs::remove_all(run.model_dir);

    std::vector<PointCloud> train_clouds;
    for (int64_t i : corpus.split_indices("train")) train_clouds.push_back(corpus.clouds[static_cast<size_t>(i)]);
    for (int64_t i : corpus.split_indices("test")) run.test_clouds.push_back(corpus.clouds[static_cast<size_t>(i)]);

    model::UkpModel m(run.cfg, run.cfg.seed);
    std::printf("-- training %s (%d epochs, %zu clouds)\n", name.c_str(), epochs, train_clouds.size());
    std::fflush(stdout);
    train::train(m, train_clouds, run.cfg, run.model_dir, /*verbose=*/false);
    run.minutes = seconds_since(t0) / 60.0;
    return run;
}

model::UkpModel load_run(const TrainedRun& run) {
    model::UkpModel m(run.cfg, run.cfg.seed);
    m.load((fs::path(run.model_dir) / "model.ukpf").string());
    return m;
}

// ---------------------------------------------------------------------------
// criterion 1: gradient integrity

void criterion_1() {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    Rng rng(404);

    {  // matmul
        Tensor a = random_tensor({5, 4}, rng), b = random_tensor({4, 3}, rng);
        a.set_requires_grad(true);
        b.set_requires_grad(true);
        Tensor w = random_tensor({5, 3}, rng, 0.5, 1.5);
        worst = std::max(worst, fd_max_rel_err([&]() { return ag::sum_all(ag::mul(w, ag::matmul(a, b))); },
                                               {a, b}));
    }
    {  // conv3d
        Tensor x = random_tensor({1, 4, 4, 4}, rng), k = random_tensor({2, 1, 3, 3, 3}, rng);
        x.set_requires_grad(true);
        k.set_requires_grad(true);
        Tensor w = random_tensor({2, 2, 2, 2}, rng, 0.5, 1.5);
        worst = std::max(worst, fd_max_rel_err([&]() { return ag::sum_all(ag::mul(w, ag::conv3d(x, k, 2, 1))); },
                                               {x, k}));
    }
    {  // conv1d_pointwise
        Tensor x = random_tensor({3, 7}, rng), w = random_tensor({4, 3}, rng), b = random_tensor({4, 1}, rng);
        x.set_requires_grad(true);
        w.set_requires_grad(true);
        b.set_requires_grad(true);
        Tensor ww = random_tensor({4, 7}, rng, 0.5, 1.5);
        worst = std::max(worst,
                         fd_max_rel_err([&]() { return ag::sum_all(ag::mul(ww, ag::conv1d_pointwise(x, w, b))); },
                                        {x, w, b}));
    }
    {  // reduce_max_over_points
        Tensor x = random_tensor({4, 9}, rng);
        x.set_requires_grad(true);
        Tensor w = random_tensor({4}, rng, 0.5, 1.5);
        worst = std::max(worst, fd_max_rel_err([&]() { return ag::sum_all(ag::mul(w, ag::reduce_max_over_points(x))); },
                                               {x}));
    }
    {  // elementwise chain + l2_normalize
        Tensor a = random_tensor({3, 4}, rng, 0.2, 1.2), b = random_tensor({3, 4}, rng, 0.3, 1.4);
        a.set_requires_grad(true);
        b.set_requires_grad(true);
        auto chain = [&]() {
            Tensor t = ag::mul(ag::sigmoid(a), ag::sqrt(ag::add_scalar(b, 2.0f)));
            Tensor u = ag::leaky_relu(ag::sub(ag::mul(a, b), ag::square(a)), 0.2f);
            return ag::sum_all(ag::add(ag::div(t, ag::add_scalar(ag::square(b), 1.0f)), ag::neg(u)));
        };
        worst = std::max(worst, fd_max_rel_err(chain, {a, b}));
        Tensor v = random_tensor({6}, rng, 0.3, 1.2);
        v.set_requires_grad(true);
        Tensor vw = random_tensor({6}, rng, 0.5, 1.5);
        worst = std::max(worst, fd_max_rel_err([&]() { return ag::sum_all(ag::mul(vw, ag::l2_normalize(v))); }, {v}));
    }
    bool per_op = worst < 1e-3;

    // end-to-end: full pipeline loss on a 16-point cloud
    model::RunConfig cfg = desk_config();
    cfg.lrf_radius = 1.5f;
    model::UkpModel m(cfg, 50);
    jitter_params(m.all_params(), 0.05, 9001);
    data::ShapeSpec spec;
    spec.family = data::ShapeFamily::kRectangle;
    spec.n_points = 64;
    spec.jitter = 0.01f;
    spec.seed = 21;
    PointCloud pc = data::downsample(data::generate(spec), 16, 22);
    model::CloudFeatures feats = model::extract_features(pc, cfg);
    auto loss = [&]() {
        Tensor f = m.encode(feats);
        auto [s, e] = m.heads(f);
        return train::chamfer_loss(m.decode(m.distill(s, e)), pc.points);
    };
    std::vector<Tensor> leaves = {*m.generator_params().find("encoder.conv0.w"),
                                  *m.generator_params().find("saliency.b"),
                                  *m.generator_params().find("embed.b"),
                                  *m.generator_params().find("decoder.level1.b2")};
    double cover = 0.0;
    double e2e = fd_max_rel_err(loss, leaves, 2e-4, 0.25, &cover);
    double secs = seconds_since(t0);
    bool pass = per_op && e2e < 1e-2 && cover > 0.8 && secs < 60.0;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "gradient integrity: per-op rel err %.2e (<1e-3), end-to-end %.2e (<1e-2, coverage %.0f%%), "
                  "%.1fs (<60s)",
                  worst, e2e, cover * 100.0, secs);
    report(1, pass, buf);
}

// criterion 2: gradient-penalty correctness against 64-bit finite differences

void criterion_2() {
    Rng rng(47);
    const int64_t n = 3, hidden = 4;
    Tensor x = random_tensor({1, n}, rng, 0.1, 0.9);
    Tensor w1 = random_tensor({hidden, 1}, rng), b1 = random_tensor({hidden, 1}, rng, -0.3, 0.3);
    Tensor w2 = random_tensor({1, hidden}, rng), b2 = random_tensor({1, 1}, rng, -0.3, 0.3);
    for (Tensor* t : {&x, &w1, &b1, &w2, &b2}) t->set_requires_grad(true);
    const float slope = 0.2f;

    Tensor h = ag::leaky_relu(ag::add(ag::matmul(w1, x), b1), slope);
    Tensor score = ag::reduce_max_over_points(ag::add(ag::matmul(w2, h), b2));
    Tensor g = ag::tape::grad_of_scalar_wrt(score, x, /*create_graph=*/true);
    Tensor pen = ag::square(ag::add_scalar(ag::sqrt(ag::sum_all(ag::square(g))), -1.0f));
    ag::tape::backward(pen);

    ref64::ToyCritic critic;
    critic.n_points = n;
    critic.hidden = hidden;
    critic.slope = slope;
    critic.w1.assign(w1.data(), w1.data() + hidden);
    critic.b1.assign(b1.data(), b1.data() + hidden);
    critic.w2.assign(w2.data(), w2.data() + hidden);
    critic.b2 = b2.item();
    ref64::Vec xv(x.data(), x.data() + n);

    double worst = 0.0;
    const double h_fd = 1e-4;
    auto check = [&](const Tensor& param, ref64::Vec& field) {
        Tensor grad = param.grad();
        for (size_t i = 0; i < field.size(); ++i) {
            double saved = field[i];
            field[i] = saved + h_fd;
            double f1 = critic.penalty(xv);
            field[i] = saved - h_fd;
            double f2 = critic.penalty(xv);
            field[i] = saved;
            double numeric = (f1 - f2) / (2.0 * h_fd);
            double analytic = grad.defined() ? grad.data()[static_cast<int64_t>(i)] : 0.0;
            worst = std::max(worst, std::fabs(analytic - numeric) /
                                        std::max({std::fabs(analytic), std::fabs(numeric), 0.25}));
        }
    };
    check(w1, critic.w1);
    check(w2, critic.w2);
    check(b1, critic.b1);
    bool pass = worst < 1e-2 && std::fabs(critic.penalty(xv) - pen.item()) < 1e-5;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "gradient penalty vs 64-bit finite differences: rel err %.2e (<1e-2)", worst);
    report(2, pass, buf);
}

// criterion 6: distillation oracle equivalence

void criterion_6() {
    model::RunConfig cfg = desk_config();
    cfg.embed_dim = 4;
    model::UkpModel m(cfg, 46);
    Rng rng(777);
    double worst_max = 0.0, worst_soft = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int64_t n = 2 + rng.uniform_int(40);
        int64_t f = 1 + rng.uniform_int(6);
        std::vector<float> phi(static_cast<size_t>(n)), h(static_cast<size_t>(f * n));
        for (auto& v : phi) v = static_cast<float>(rng.uniform01());
        for (auto& v : h) v = static_cast<float>(rng.uniform(-1.0, 1.0));
        Tensor tp = Tensor::from_data({1, n}, phi);
        Tensor th = Tensor::from_data({f, n}, h);
        Tensor gmax = m.distill(tp, th);
        Tensor gsoft = m.distill_soft(tp, th, 1.0f);
        double zs = 0.0;
        for (float v : phi) zs += v;
        for (int64_t d = 0; d < f; ++d) {
            double pos = 0.0, neg = 0.0, acc = 0.0;
            for (int64_t i = 0; i < n; ++i) {
                double hp = h[static_cast<size_t>(d * n + i)];
                pos = std::max(pos, static_cast<double>(phi[static_cast<size_t>(i)]) * std::max(hp, 0.0));
                neg = std::max(neg, static_cast<double>(phi[static_cast<size_t>(i)]) * std::max(-hp, 0.0));
                acc += phi[static_cast<size_t>(i)] * hp;
            }
            worst_max = std::max(worst_max, std::fabs(gmax.data()[d] - pos));
            worst_max = std::max(worst_max, std::fabs(gmax.data()[f + d] - neg));
            worst_soft = std::max(worst_soft, std::fabs(gsoft.data()[d] - acc / zs));
        }
    }
    bool pass = worst_max < 1e-6 && worst_soft < 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "distillation oracles on 1000 instances: signed max err %.2e, soft gamma=1 err %.2e (<1e-6)",
                  worst_max, worst_soft);
    report(6, pass, buf);
}

// criterion 7: Beta sampler statistics

void criterion_7() {
    Rng rng(101);
    model::BetaPrior prior{0.01, 0.05};
    const int64_t n = 100000;
    std::vector<float> s = model::sample_beta_prior(prior, n, rng);
    double mean = 0.0;
    int64_t mid = 0;
    for (float v : s) {
        mean += v;
        if (v > 0.2f && v < 0.8f) ++mid;
    }
    mean /= static_cast<double>(n);
    double mid_frac = static_cast<double>(mid) / static_cast<double>(n);
    bool pass = std::fabs(mean - 1.0 / 6.0) < 0.01 && mid_frac < 0.05;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "Beta(0.01,0.05) sampler: mean %.4f (1/6 +- 0.01), mass in (0.2,0.8) %.2f%% (<5%%)", mean,
                  mid_frac * 100.0);
    report(7, pass, buf);
}

// criterion 8: metric implementations match brute-force references

void criterion_8() {
    Rng rng(808);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int64_t n = 8 + rng.uniform_int(60);
        std::vector<Vec3> pts;
        std::vector<float> scores;
        PointCloud pc;
        for (int64_t i = 0; i < n; ++i) {
            Vec3 p(static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1)),
                   static_cast<float>(rng.uniform(-1, 1)));
            pts.push_back(p);
            pc.points.push_back(p);
            scores.push_back(static_cast<float>(rng.uniform01()));
        }

        // nms vs brute-force greedy
        float radius = static_cast<float>(rng.uniform(0.1, 0.8));
        float thr = static_cast<float>(rng.uniform(0.0, 0.4));
        {
            std::vector<char> alive(static_cast<size_t>(n), 1);
            std::vector<int64_t> ref;
            for (;;) {
                int64_t best = -1;
                for (int64_t i = 0; i < n; ++i)
                    if (alive[static_cast<size_t>(i)] && scores[static_cast<size_t>(i)] >= thr &&
                        (best < 0 || scores[static_cast<size_t>(i)] > scores[static_cast<size_t>(best)]))
                        best = i;
                if (best < 0) break;
                ref.push_back(best);
                for (int64_t i = 0; i < n; ++i)
                    if (alive[static_cast<size_t>(i)] &&
                        geom::dist(pts[static_cast<size_t>(i)], pts[static_cast<size_t>(best)]) <= radius)
                        alive[static_cast<size_t>(i)] = 0;
            }
            if (geom::nms(pts, scores, radius, thr) != ref) ++bad;
        }

        // chamfer vs quadratic scan
        {
            std::vector<Vec3> b;
            for (int i = 0; i < 20; ++i)
                b.emplace_back(static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1)),
                               static_cast<float>(rng.uniform(-1, 1)));
            double sa = 0.0, sb = 0.0;
            for (const Vec3& p : pts) {
                double bd = 1e300;
                for (const Vec3& q : b) bd = std::min(bd, static_cast<double>(geom::dist2(p, q)));
                sa += bd;
            }
            for (const Vec3& q : b) {
                double bd = 1e300;
                for (const Vec3& p : pts) bd = std::min(bd, static_cast<double>(geom::dist2(p, q)));
                sb += bd;
            }
            double ref = sa / static_cast<double>(pts.size()) + sb / static_cast<double>(b.size());
            if (std::fabs(geom::chamfer_distance(pts, b) - ref) > 1e-6) ++bad;
        }

        // radius_neighbors vs quadratic scan
        {
            int64_t center = rng.uniform_int(n);
            float r = static_cast<float>(rng.uniform(0.1, 1.2));
            std::vector<int64_t> ref;
            for (int64_t i = 0; i < n; ++i)
                if (geom::dist(pc.points[static_cast<size_t>(i)], pc.points[static_cast<size_t>(center)]) <= r)
                    ref.push_back(i);
            if (geom::radius_neighbors(pc, center, r) != ref) ++bad;
        }

        // repeatability fraction vs quadratic scan
        {
            std::vector<int64_t> set_a, set_b;
            for (int j = 0; j < 5; ++j) {
                set_a.push_back(rng.uniform_int(n));
                set_b.push_back(rng.uniform_int(n));
            }
            std::set<int64_t> ua(set_a.begin(), set_a.end()), ub(set_b.begin(), set_b.end());
            if (ua.size() == 5 && ub.size() == 5) {
                int call = 0;
                model::Detector det = [&](const PointCloud&) {
                    model::DetectionResult r;
                    r.keypoint_indices = (call++ == 0) ? set_a : set_b;
                    r.scores.assign(5, 1.0f);
                    return r;
                };
                double got = eval::rotation_repeatability(det, pc, 5, 0.3, 1, 5);
                int64_t rep = 0;
                for (int64_t a : set_a) {
                    float best = 1e30f;
                    for (int64_t bb : set_b)
                        best = std::min(best, geom::dist(pc.points[static_cast<size_t>(a)],
                                                         pc.points[static_cast<size_t>(bb)]));
                    if (best <= 0.3f) ++rep;
                }
                if (std::fabs(got - 100.0 * static_cast<double>(rep) / 5.0) > 1e-6) ++bad;
            }
        }

        // miou greedy matching vs exhaustive optimal matching (small sets)
        {
            geom::KnnGraph graph = geom::build_knn_graph(pc, 4);
            std::vector<int64_t> detected, gt;
            std::set<int64_t> used;
            while (detected.size() < 3) {
                int64_t i = rng.uniform_int(n);
                if (used.insert(i).second) detected.push_back(i);
            }
            while (gt.size() < 3) {
                int64_t i = rng.uniform_int(n);
                if (used.insert(i).second) gt.push_back(i);
            }
            double thr = rng.uniform(0.2, 1.0);
            double got = eval::keypoint_miou(detected, gt, graph, thr);
            std::vector<std::vector<double>> dist;
            for (int64_t g : gt) dist.push_back(geom::geodesic_distances(graph, g));
            std::vector<int> perm = {0, 1, 2};
            int best = 0;
            do {
                int matched = 0;
                for (size_t j = 0; j < gt.size(); ++j) {
                    double d = dist[j][static_cast<size_t>(detected[static_cast<size_t>(perm[j])])];
                    if (std::isfinite(d) && d <= thr) ++matched;
                }
                best = std::max(best, matched);
            } while (std::next_permutation(perm.begin(), perm.end()));
            double expect = static_cast<double>(best) / static_cast<double>(6 - best);
            if (std::fabs(got - expect) > 1e-9) ++bad;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "metric oracles on 100 randomized instances: %d disagreements", bad);
    report(8, bad == 0, buf);
}

// ---------------------------------------------------------------------------
// helpers for the trained criteria

std::vector<float> cloud_saliency(const model::UkpModel& m, const PointCloud& pc) {
    return model::infer(m, pc).saliency;
}

double phi_outside_fraction(const model::UkpModel& m, const std::vector<PointCloud>& clouds) {
    int64_t outside = 0, total = 0;
    for (const PointCloud& pc : clouds) {
        for (float v : cloud_saliency(m, pc)) {
            if (v <= 0.2f || v >= 0.8f) ++outside;
            ++total;
        }
    }
    return static_cast<double>(outside) / static_cast<double>(total);
}

double max_phi(const model::UkpModel& m, const std::vector<PointCloud>& clouds) {
    float peak = 0.0f;
    for (const PointCloud& pc : clouds)
        for (float v : cloud_saliency(m, pc)) peak = std::max(peak, v);
    return peak;
}

double mean_sym_gap(const model::UkpModel& m, const std::vector<PointCloud>& clouds) {
    double acc = 0.0;
    int64_t count = 0;
    for (const PointCloud& pc : clouds) {
        float tol = 2.0f * geom::median_nn_spacing(pc);
        auto pairs = geom::symmetric_pairs(pc, *pc.symmetry_plane, tol);
        std::vector<float> phi = cloud_saliency(m, pc);
        for (auto [i, j] : pairs) {
            acc += std::fabs(phi[static_cast<size_t>(i)] - phi[static_cast<size_t>(j)]);
            ++count;
        }
    }
    return acc / static_cast<double>(std::max<int64_t>(count, 1));
}

}  // namespace

int main() {
    std::printf("== fast criteria ==\n");
    criterion_1();
    criterion_2();
    criterion_6();
    criterion_7();
    criterion_8();

    std::printf("== trained criteria (desk scale) ==\n");

    // rectangles: full model, no_sym ablation, no_gan ablation
    TrainedRun rect_full = train_run("rect_full", {data::ShapeFamily::kRectangle}, 150, "", 16, 10, 501);
    TrainedRun rect_nosym = train_run("rect_nosym", {data::ShapeFamily::kRectangle}, 150, "no_sym", 16, 10, 501);
    TrainedRun rect_nogan = train_run("rect_nogan", {data::ShapeFamily::kRectangle}, 60, "no_gan", 16, 10, 501);

    // criterion 4: corner recovery on held-out rectangles
    {
        model::UkpModel m = load_run(rect_full);
        int64_t ok_shapes = 0;
        for (const PointCloud& pc : rect_full.test_clouds) {
            bool shape_ok = true;
            model::DetectionResult det;
            try {
                det = model::detect(m, pc, 0.1f, 0.5f, 4);
            } catch (const MetricError&) {
                shape_ok = false;
            }
            if (shape_ok) {
                geom::KnnGraph graph = geom::build_knn_graph(pc);
                std::vector<std::vector<double>> corner_dist;
                for (int64_t g : pc.gt_keypoints) corner_dist.push_back(geom::geodesic_distances(graph, g));
                for (int64_t kp : det.keypoint_indices) {
                    double best = 1e300;
                    for (const auto& d : corner_dist) best = std::min(best, d[static_cast<size_t>(kp)]);
                    if (!(best <= 0.1)) shape_ok = false;
                }
            }
            ok_shapes += shape_ok ? 1 : 0;
        }
        double frac = static_cast<double>(ok_shapes) / static_cast<double>(rect_full.test_clouds.size());
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "corner recovery: top-4 keypoints within geodesic 0.1 of corners on %.0f%% of "
                      "held-out rectangles (>=90%%)",
                      frac * 100.0);
        report(4, frac >= 0.90, buf);
    }

    // criterion 5: saliency bimodality, and its collapse without the GAN
    {
        model::UkpModel m_full = load_run(rect_full);
        model::UkpModel m_nogan = load_run(rect_nogan);
        double full_frac = phi_outside_fraction(m_full, rect_full.test_clouds);
        double nogan_frac = phi_outside_fraction(m_nogan, rect_nogan.test_clouds);
        double full_max = max_phi(m_full, rect_full.test_clouds);
        double nogan_max = max_phi(m_nogan, rect_nogan.test_clouds);
        bool pass = full_frac >= 0.80 && nogan_frac < 0.80 && nogan_max < 0.5 * full_max;
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "sparsity bimodality: %.0f%% of trained phi outside (0.2,0.8) (>=80%%); no_gan %.0f%% "
                      "(<80%%), max phi %.3f vs %.3f (L1 collapse)",
                      full_frac * 100.0, nogan_frac * 100.0, nogan_max, full_max);
        report(5, pass, buf);
    }

    // criterion 9: symmetry ablation ordering
    {
        model::UkpModel m_full = load_run(rect_full);
        model::UkpModel m_nosym = load_run(rect_nosym);
        double gap_full = mean_sym_gap(m_full, rect_full.test_clouds);
        double gap_nosym = mean_sym_gap(m_nosym, rect_nosym.test_clouds);
        bool pass = gap_full <= 0.5 * gap_nosym;
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "symmetry ordering: mean |phi_i - phi_j| %.4f with beta3 vs %.4f without (need <= half)",
                      gap_full, gap_nosym);
        report(9, pass, buf);
    }

    // box + table: full model and the no_lrf ablation, timed for criterion 3
    auto t_bt = std::chrono::steady_clock::now();
    TrainedRun bt_full =
        train_run("bt_full", {data::ShapeFamily::kBox, data::ShapeFamily::kTable}, 120, "", 8, 4, 901);
    TrainedRun bt_nolrf =
        train_run("bt_nolrf", {data::ShapeFamily::kBox, data::ShapeFamily::kTable}, 60, "no_lrf", 8, 4, 901);

    // criterion 3: rotation repeatability with 4 keypoints
    {
        model::UkpModel m_full = load_run(bt_full);
        model::UkpModel m_nolrf = load_run(bt_nolrf);
        double acc_full = 0.0, acc_nolrf = 0.0;
        int64_t count = 0;
        for (const PointCloud& pc : bt_full.test_clouds) {
            model::Detector det_full = [&](const PointCloud& c) {
                return model::detect(m_full, c, 0.1f, 0.0f, 4);
            };
            model::Detector det_nolrf = [&](const PointCloud& c) {
                return model::detect(m_nolrf, c, 0.1f, 0.0f, 4);
            };
            acc_full += eval::rotation_repeatability(det_full, pc, 4, 0.1, 20, 1000 + count);
            acc_nolrf += eval::rotation_repeatability(det_nolrf, pc, 4, 0.1, 20, 1000 + count);
            ++count;
        }
        double rep_full = acc_full / static_cast<double>(count);
        double rep_nolrf = acc_nolrf / static_cast<double>(count);
        double minutes = seconds_since(t_bt) / 60.0;
        bool pass = rep_full >= 95.0 && rep_nolrf < 50.0 && minutes <= 30.0;
        char buf[240];
        std::snprintf(buf, sizeof(buf),
                      "rotation repeatability (box+table, 4 kp, 20 rotations): %.1f%% (>=95%%); no_lrf %.1f%% "
                      "(<50%%); %.1f min (<=30)",
                      rep_full, rep_nolrf, minutes);
        report(3, pass, buf);
    }

    // criterion 10: downsampling stability on held-out tables
    {
        model::UkpModel m = load_run(bt_full);
        data::CorpusCounts counts;
        counts.train = 0;
        counts.val = 0;
        counts.test = 4;
        data::Corpus tables = data::build_corpus({data::ShapeFamily::kTable}, counts, 2048, 0.004f, 31337);
        double acc = 0.0;
        int64_t count = 0;
        for (int64_t i : tables.split_indices("test")) {
            const PointCloud& full_cloud = tables.clouds[static_cast<size_t>(i)];
            PointCloud small_cloud = data::downsample(full_cloud, 512, 99 + static_cast<uint64_t>(i));
            model::DetectionResult da = model::detect(m, full_cloud, 0.1f, 0.5f);
            model::DetectionResult db = model::detect(m, small_cloud, 0.1f, 0.5f);
            acc += eval::correspondence_iou(da.keypoint_indices, full_cloud.correspondence_ids,
                                            db.keypoint_indices, small_cloud.correspondence_ids);
            ++count;
        }
        double iou = acc / static_cast<double>(count);
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "downsampling stability: correspondence IoU between 2048- and 512-point detections of "
                      "held-out tables %.1f%% (>=70%%)",
                      iou);
        report(10, iou >= 70.0, buf);
    }

    std::printf("== run times: rect %.1f + %.1f + %.1f min, box+table %.1f + %.1f min ==\n", rect_full.minutes,
                rect_nosym.minutes, rect_nogan.minutes, bt_full.minutes, bt_nolrf.minutes);
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria failed\n", g_failures);
    return 1;
}
