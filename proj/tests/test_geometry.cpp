#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "ukp/geom/chamfer.hpp"
#include "ukp/geom/geodesic.hpp"
#include "ukp/geom/grid_index.hpp"
#include "ukp/geom/lrf.hpp"
#include "ukp/geom/nms.hpp"
#include "ukp/geom/ply_io.hpp"
#include "ukp/geom/point_cloud.hpp"
#include "ukp/geom/rotation.hpp"
#include "ukp/geom/sdv.hpp"
#include "ukp/geom/symmetry.hpp"
#include "ukp/rng.hpp"

using namespace ukp;
using namespace ukp::geom;

namespace {

PointCloud random_cloud(int64_t n, Rng& rng, float scale = 1.0f) {
    PointCloud pc;
    pc.points.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i)
        pc.points.emplace_back(static_cast<float>(rng.uniform(-scale, scale)),
                               static_cast<float>(rng.uniform(-scale, scale)),
                               static_cast<float>(rng.uniform(-scale, scale)));
    return pc;
}

// Skewed anisotropic blob with decisive majority votes: the chosen center
// sits near the low corner so neighbors pile up on the positive side of
// every eigenvector.
PointCloud anisotropic_cloud(int64_t n, Rng& rng) {
    PointCloud pc;
    pc.points.emplace_back(0.05f, 0.02f, 0.01f);  // center, index 0
    for (int64_t i = 1; i < n; ++i)
        pc.points.emplace_back(static_cast<float>(rng.uniform(0.0, 2.0)),
                               static_cast<float>(rng.uniform(0.0, 0.6)),
                               static_cast<float>(rng.uniform(0.0, 0.25)));
    return pc;
}

std::vector<int64_t> brute_radius_neighbors(const PointCloud& pc, int64_t center, float r) {
    std::vector<int64_t> out;
    for (int64_t i = 0; i < pc.size(); ++i)
        if (dist(pc.points[static_cast<size_t>(i)], pc.points[static_cast<size_t>(center)]) <= r)
            out.push_back(i);
    return out;
}

double brute_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double sa = 0.0;
    for (const Vec3& p : a) {
        double best = 1e300;
        for (const Vec3& q : b) best = std::min(best, static_cast<double>(dist2(p, q)));
        sa += best;
    }
    double sb = 0.0;
    for (const Vec3& q : b) {
        double best = 1e300;
        for (const Vec3& p : a) best = std::min(best, static_cast<double>(dist2(p, q)));
        sb += best;
    }
    return sa / static_cast<double>(a.size()) + sb / static_cast<double>(b.size());
}

std::vector<int64_t> brute_nms(const std::vector<Vec3>& pts, const std::vector<float>& scores,
                               float radius, float threshold) {
    std::vector<char> alive(pts.size(), 1);
    std::vector<int64_t> kept;
    for (;;) {
        int64_t best = -1;
        for (size_t i = 0; i < pts.size(); ++i) {
            if (!alive[i] || scores[i] < threshold) continue;
            if (best < 0 || scores[i] > scores[static_cast<size_t>(best)]) best = static_cast<int64_t>(i);
        }
        if (best < 0) break;
        kept.push_back(best);
        for (size_t i = 0; i < pts.size(); ++i)
            if (alive[i] && dist(pts[i], pts[static_cast<size_t>(best)]) <= radius) alive[i] = 0;
    }
    return kept;
}

}  // namespace

TEST_CASE("normalize_cloud") {
    PointCloud cube;
    for (int x = 0; x <= 1; ++x)
        for (int y = 0; y <= 1; ++y)
            for (int z = 0; z <= 1; ++z) cube.points.emplace_back(static_cast<float>(x), static_cast<float>(y), static_cast<float>(z));
    PointCloud n = normalize_cloud(cube);
    Vec3 c{0, 0, 0};
    for (const Vec3& p : n.points) c += p;
    CHECK(c.norm() < 1e-6);
    float max_norm = 0.0f;
    for (const Vec3& p : n.points) max_norm = std::max(max_norm, p.norm());
    CHECK(max_norm == doctest::Approx(1.0));

    // idempotence on an already-normalized cloud
    PointCloud n2 = normalize_cloud(n);
    for (int64_t i = 0; i < n.size(); ++i)
        CHECK(dist(n.points[static_cast<size_t>(i)], n2.points[static_cast<size_t>(i)]) < 1e-6);

    Rng rng(3);
    PointCloud r = random_cloud(64, rng, 7.0f);
    PointCloud r1 = normalize_cloud(r);
    PointCloud r2 = normalize_cloud(r1);
    for (int64_t i = 0; i < r.size(); ++i)
        CHECK(dist(r1.points[static_cast<size_t>(i)], r2.points[static_cast<size_t>(i)]) < 1e-6);
    // max pairwise distance after normalization
    float maxd = 0.0f;
    for (const Vec3& a : r1.points)
        for (const Vec3& b : r1.points) maxd = std::max(maxd, dist(a, b));
    CHECK(maxd <= 2.0f + 1e-6f);

    PointCloud degenerate;
    degenerate.points.assign(5, Vec3{1, 1, 1});
    CHECK_THROWS_AS(normalize_cloud(degenerate), GeometryError);
}

TEST_CASE("radius_neighbors matches the quadratic scan") {
    Rng rng(5);
    PointCloud pc = random_cloud(200, rng);
    // saturation
    auto all = radius_neighbors(pc, 3, 100.0f);
    CHECK(all.size() == 200);
    // vanishing radius keeps only the center
    auto self_only = radius_neighbors(pc, 3, 1e-6f);
    REQUIRE(self_only.size() == 1);
    CHECK(self_only[0] == 3);
    // randomized agreement with the O(N^2) oracle
    for (int t = 0; t < 25; ++t) {
        int64_t center = rng.uniform_int(pc.size());
        float r = static_cast<float>(rng.uniform(0.05, 1.5));
        CHECK(radius_neighbors(pc, center, r) == brute_radius_neighbors(pc, center, r));
    }
}

TEST_CASE("estimate_lrf") {
    Rng rng(7);
    SUBCASE("planar cloud gives plane normal as z axis") {
        PointCloud pc;
        for (int i = 0; i < 200; ++i)
            pc.points.emplace_back(static_cast<float>(rng.uniform(-1.0, 1.0)),
                                   static_cast<float>(rng.uniform(-0.4, 0.4)), 0.0f);
        pc.points[0] = Vec3(0.1f, 0.05f, 0.0f);
        LocalReferenceFrame lrf = estimate_lrf(pc, 0, 10.0f);
        Vec3 z = lrf.rotation.col(2);
        CHECK(std::fabs(std::fabs(z.z) - 1.0f) < 1e-3);
        CHECK(std::fabs(z.x) < 1e-3);
        CHECK(std::fabs(z.y) < 1e-3);
        // right-handed orthonormal
        Mat3 rtr = lrf.rotation.transposed() * lrf.rotation;
        for (int c = 0; c < 3; ++c)
            for (int rr = 0; rr < 3; ++rr)
                CHECK(std::fabs(rtr.m[3 * c + rr] - (c == rr ? 1.0f : 0.0f)) < 1e-5);
        CHECK(lrf.rotation.det() == doctest::Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("rotating the cloud rotates the frame") {
        PointCloud pc = anisotropic_cloud(300, rng);
        LocalReferenceFrame base = estimate_lrf(pc, 0, 10.0f);
        for (int t = 0; t < 20; ++t) {
            Mat3 rot = random_rotation(rng);
            PointCloud rotated = rotate_cloud(pc, rot);
            LocalReferenceFrame lrf = estimate_lrf(rotated, 0, 10.0f);
            for (int cidx = 0; cidx < 3; ++cidx) {
                Vec3 expect = rot * base.rotation.col(cidx);
                Vec3 got = lrf.rotation.col(cidx);
                CHECK(dist(expect, got) < 1e-4f);
            }
        }
    }
    SUBCASE("isotropic blob is degenerate") {
        PointCloud pc;
        const int n = 200000;
        for (int i = 0; i < n; ++i)
            pc.points.emplace_back(static_cast<float>(rng.normal()), static_cast<float>(rng.normal()),
                                   static_cast<float>(rng.normal()));
        // oracle: the sample eigenvalue spread itself sits below the gate
        double mean[3] = {0, 0, 0};
        for (const Vec3& p : pc.points) {
            mean[0] += p.x;
            mean[1] += p.y;
            mean[2] += p.z;
        }
        for (double& m : mean) m /= n;
        double cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        for (const Vec3& p : pc.points) {
            double d[3] = {p.x - mean[0], p.y - mean[1], p.z - mean[2]};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) cov[a][b] += d[a] * d[b] / n;
        }
        double ev[3];
        Vec3 axes[3];
        symmetric_eigen3(cov, ev, axes);
        REQUIRE(ev[2] / ev[1] < kLrfEigenRatio);
        CHECK_THROWS_AS(estimate_lrf(pc, 0, 1000.0f), DegenerateLrf);
    }
    SUBCASE("too few neighbors") {
        PointCloud pc;
        pc.points = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
        CHECK_THROWS_AS(estimate_lrf(pc, 0, 10.0f), DegenerateLrf);
    }
}

TEST_CASE("compute_sdv") {
    SdvConfig cfg;
    cfg.grid_width = 16;
    SUBCASE("single point splats the central region") {
        PointCloud pc;
        pc.points = {{0, 0, 0}};
        LocalReferenceFrame lrf;
        lrf.origin = {0, 0, 0};
        SdvDescriptor d = compute_sdv(pc, 0, lrf, 0.3f, {0}, cfg);
        // peak belongs to the voxels adjacent to the grid center
        float peak = 0.0f;
        int argmax = -1;
        for (size_t i = 0; i < d.grid.size(); ++i)
            if (d.grid[i] > peak) {
                peak = d.grid[i];
                argmax = static_cast<int>(i);
            }
        CHECK(peak == doctest::Approx(1.0));
        int w = cfg.grid_width;
        int vx = argmax / (w * w), vy = (argmax / w) % w, vz = argmax % w;
        CHECK(std::abs(vx - w / 2) <= 1);
        CHECK(std::abs(vy - w / 2) <= 1);
        CHECK(std::abs(vz - w / 2) <= 1);
        double total = 0.0;
        for (float v : d.grid) total += v;
        CHECK(total > 0.0);
    }
    SUBCASE("rotation leaves the grid unchanged") {
        Rng rng(11);
        PointCloud pc = anisotropic_cloud(400, rng);
        pc = normalize_cloud(pc);
        auto neigh = radius_neighbors(pc, 0, 0.3f);
        REQUIRE(neigh.size() >= 8);
        LocalReferenceFrame lrf = estimate_lrf(pc, 0, neigh);
        SdvDescriptor base = compute_sdv(pc, 0, lrf, 0.3f, neigh, cfg);
        for (int t = 0; t < 20; ++t) {
            Mat3 rot = random_rotation(rng);
            PointCloud rc = rotate_cloud(pc, rot);
            auto neigh2 = radius_neighbors(rc, 0, 0.3f);
            LocalReferenceFrame lrf2 = estimate_lrf(rc, 0, neigh2);
            SdvDescriptor d2 = compute_sdv(rc, 0, lrf2, 0.3f, neigh2, cfg);
            float worst = 0.0f;
            for (size_t i = 0; i < base.grid.size(); ++i)
                worst = std::max(worst, std::fabs(base.grid[i] - d2.grid[i]));
            CHECK(worst < 1e-3f);
        }
    }
    SUBCASE("mirrored neighborhoods give grids equal up to an axis flip") {
        Rng rng(13);
        PointCloud pc = anisotropic_cloud(400, rng);
        PointCloud mirrored = pc;
        for (Vec3& p : mirrored.points) p.x = -p.x;
        auto neigh = radius_neighbors(pc, 0, 0.5f);
        LocalReferenceFrame lrf = estimate_lrf(pc, 0, neigh);
        SdvDescriptor a = compute_sdv(pc, 0, lrf, 0.5f, neigh, cfg);
        auto neigh_m = radius_neighbors(mirrored, 0, 0.5f);
        LocalReferenceFrame lrf_m = estimate_lrf(mirrored, 0, neigh_m);
        SdvDescriptor b = compute_sdv(mirrored, 0, lrf_m, 0.5f, neigh_m, cfg);
        // mirroring flips the handedness closure, so the grid flips along y
        int w = cfg.grid_width;
        float worst = 0.0f;
        for (int vx = 0; vx < w; ++vx)
            for (int vy = 0; vy < w; ++vy)
                for (int vz = 0; vz < w; ++vz)
                    worst = std::max(worst, std::fabs(a.grid[static_cast<size_t>((vx * w + vy) * w + vz)] -
                                                      b.grid[static_cast<size_t>((vx * w + (w - 1 - vy)) * w + vz)]));
        CHECK(worst < 1e-3f);
    }
}

TEST_CASE("chamfer_distance") {
    Rng rng(17);
    std::vector<Vec3> a;
    for (int i = 0; i < 50; ++i)
        a.emplace_back(static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1)),
                       static_cast<float>(rng.uniform(-1, 1)));
    CHECK(chamfer_distance(a, a) == doctest::Approx(0.0));

    std::vector<Vec3> s1 = {{0, 0, 0}};
    std::vector<Vec3> s2 = {{1, 0, 0}};
    CHECK(chamfer_distance(s1, s2) == doctest::Approx(2.0));

    std::vector<Vec3> b;
    for (int i = 0; i < 50; ++i)
        b.emplace_back(static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1)),
                       static_cast<float>(rng.uniform(-1, 1)));
    double got = chamfer_distance(a, b);
    CHECK(std::fabs(got - brute_chamfer(a, b)) < 1e-6);
    CHECK(chamfer_distance(b, a) == doctest::Approx(got));  // symmetry

    CHECK_THROWS_AS(chamfer_distance({}, s1), GeometryError);
}

TEST_CASE("geodesic_distances") {
    SUBCASE("identity and path graph") {
        PointCloud line;
        line.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
        auto d = geodesic_distances(line, 0, 1);
        CHECK(d[0] == doctest::Approx(0.0));
        CHECK(d[1] == doctest::Approx(1.0));
        CHECK(d[2] == doctest::Approx(2.0));
    }
    SUBCASE("circle antipodes") {
        PointCloud circle;
        const int n = 500;
        for (int i = 0; i < n; ++i) {
            double a = 2.0 * M_PI * i / n;
            circle.points.emplace_back(static_cast<float>(std::cos(a)), static_cast<float>(std::sin(a)), 0.0f);
        }
        auto d = geodesic_distances(circle, 0);
        CHECK(std::fabs(d[n / 2] - M_PI) / M_PI < 0.05);
    }
    SUBCASE("triangle inequality on sampled triples") {
        Rng rng(19);
        PointCloud pc = random_cloud(150, rng);
        KnnGraph g = build_knn_graph(pc);
        std::vector<std::vector<double>> d;
        for (int64_t s = 0; s < 12; ++s) d.push_back(geodesic_distances(g, s));
        for (int t = 0; t < 300; ++t) {
            int64_t i = rng.uniform_int(12), j = rng.uniform_int(12);
            int64_t k = rng.uniform_int(pc.size());
            if (std::isinf(d[static_cast<size_t>(i)][static_cast<size_t>(k)])) continue;
            CHECK(d[static_cast<size_t>(i)][static_cast<size_t>(k)] <=
                  d[static_cast<size_t>(i)][static_cast<size_t>(j)] + d[static_cast<size_t>(j)][static_cast<size_t>(k)] + 1e-9);
        }
    }
}

TEST_CASE("nms") {
    SUBCASE("suppression within the radius") {
        std::vector<Vec3> pts = {{0, 0, 0}, {0.05f, 0, 0}};
        std::vector<float> sc = {0.9f, 0.8f};
        auto kept = nms(pts, sc, 0.1f, 0.0f);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0] == 0);
    }
    SUBCASE("all below threshold") {
        std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}};
        std::vector<float> sc = {0.3f, 0.2f};
        CHECK(nms(pts, sc, 0.1f, 0.5f).empty());
    }
    SUBCASE("matches the brute-force greedy reference") {
        Rng rng(23);
        for (int t = 0; t < 50; ++t) {
            int64_t n = 5 + rng.uniform_int(60);
            std::vector<Vec3> pts;
            std::vector<float> sc;
            for (int64_t i = 0; i < n; ++i) {
                pts.emplace_back(static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1)),
                                 static_cast<float>(rng.uniform(-1, 1)));
                sc.push_back(static_cast<float>(rng.uniform(0, 1)));
            }
            float radius = static_cast<float>(rng.uniform(0.05, 0.8));
            float thr = static_cast<float>(rng.uniform(0.0, 0.5));
            CHECK(nms(pts, sc, radius, thr) == brute_nms(pts, sc, radius, thr));
        }
    }
    SUBCASE("output set is independent of input ordering") {
        Rng rng(29);
        int64_t n = 80;
        std::vector<Vec3> pts;
        std::vector<float> sc;
        for (int64_t i = 0; i < n; ++i) {
            pts.emplace_back(static_cast<float>(rng.uniform(-1, 1)), static_cast<float>(rng.uniform(-1, 1)), 0.0f);
            sc.push_back(static_cast<float>(rng.uniform(0, 1)));
        }
        auto base = nms(pts, sc, 0.3f, 0.1f);
        std::vector<int64_t> perm(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        rng.shuffle(perm);
        std::vector<Vec3> pts2(pts.size());
        std::vector<float> sc2(sc.size());
        for (int64_t i = 0; i < n; ++i) {
            pts2[static_cast<size_t>(perm[static_cast<size_t>(i)])] = pts[static_cast<size_t>(i)];
            sc2[static_cast<size_t>(perm[static_cast<size_t>(i)])] = sc[static_cast<size_t>(i)];
        }
        auto permuted = nms(pts2, sc2, 0.3f, 0.1f);
        REQUIRE(permuted.size() == base.size());
        std::set<int64_t> base_set(base.begin(), base.end());
        for (int64_t idx : permuted) {
            // map back through the permutation
            int64_t orig = -1;
            for (int64_t i = 0; i < n; ++i)
                if (perm[static_cast<size_t>(i)] == idx) orig = i;
            CHECK(base_set.count(orig) == 1);
        }
    }
}

TEST_CASE("symmetric_pairs") {
    SymmetryPlane plane;  // x = 0
    SUBCASE("exact mirror pair") {
        PointCloud pc;
        pc.points = {{1, 0, 0}, {-1, 0, 0}};
        auto pairs = symmetric_pairs(pc, plane, 0.01f);
        REQUIRE(pairs.size() == 1);
        CHECK(pairs[0].first == 0);
        CHECK(pairs[0].second == 1);
    }
    SUBCASE("no mates within tolerance") {
        PointCloud pc;
        pc.points = {{1, 0, 0}, {-1, 0.5f, 0}, {0.7f, 0.2f, 0.1f}};
        CHECK(symmetric_pairs(pc, plane, 0.01f).empty());
    }
    SUBCASE("box corners pair up") {
        PointCloud pc;
        for (int x = -1; x <= 1; x += 2)
            for (int y = -1; y <= 1; y += 2)
                for (int z = -1; z <= 1; z += 2)
                    pc.points.emplace_back(static_cast<float>(x) * 0.8f, static_cast<float>(y) * 0.5f,
                                           static_cast<float>(z) * 0.3f);
        auto pairs = symmetric_pairs(pc, plane, 0.01f);
        CHECK(pairs.size() == 4);
        for (auto [i, j] : pairs) {
            CHECK(pc.points[static_cast<size_t>(i)].x == doctest::Approx(-pc.points[static_cast<size_t>(j)].x));
            CHECK(pc.points[static_cast<size_t>(i)].y == doctest::Approx(pc.points[static_cast<size_t>(j)].y));
        }
    }
}

TEST_CASE("random_rotation") {
    Rng rng(31);
    for (int t = 0; t < 30; ++t) {
        Mat3 r = random_rotation(rng);
        Mat3 rtr = r.transposed() * r;
        for (int c = 0; c < 3; ++c)
            for (int rr = 0; rr < 3; ++rr)
                CHECK(std::fabs(rtr.m[3 * c + rr] - (c == rr ? 1.0f : 0.0f)) < 1e-6);
        CHECK(r.det() == doctest::Approx(1.0).epsilon(1e-6));
    }
    // determinism per seed
    Mat3 a = random_rotation(uint64_t{42});
    Mat3 b = random_rotation(uint64_t{42});
    for (int i = 0; i < 9; ++i) CHECK(a.m[i] == b.m[i]);

    // uniformity: E |first column . z| = 1/2
    Rng rng2(37);
    double acc = 0.0;
    for (int i = 0; i < 1000; ++i) acc += std::fabs(random_rotation(rng2).col(0).z);
    CHECK(std::fabs(acc / 1000.0 - 0.5) < 0.05);
}

TEST_CASE("ply io") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "ukp_ply_test";
    fs::create_directories(dir);

    SUBCASE("round trip with annotations") {
        Rng rng(41);
        PointCloud pc = random_cloud(40, rng);
        pc.part_labels.assign(40, 0);
        for (int i = 0; i < 40; ++i) pc.part_labels[static_cast<size_t>(i)] = i % 3;
        pc.correspondence_ids.resize(40);
        for (int i = 0; i < 40; ++i) pc.correspondence_ids[static_cast<size_t>(i)] = 100 + i;
        pc.gt_keypoints = {2, 17, 39};
        pc.symmetry_plane = SymmetryPlane{{1, 0, 0}, 0.25f};
        std::string path = (dir / "round.ply").string();
        write_ply(path, pc);
        PointCloud rd = read_ply(path);
        REQUIRE(rd.size() == pc.size());
        for (int64_t i = 0; i < pc.size(); ++i)
            CHECK(dist(rd.points[static_cast<size_t>(i)], pc.points[static_cast<size_t>(i)]) == doctest::Approx(0.0));
        CHECK(rd.part_labels == pc.part_labels);
        CHECK(rd.correspondence_ids == pc.correspondence_ids);
        CHECK(rd.gt_keypoints == pc.gt_keypoints);
        REQUIRE(rd.symmetry_plane.has_value());
        CHECK(rd.symmetry_plane->offset == doctest::Approx(0.25f));
    }
    SUBCASE("unknown property is skipped, cloud still loads") {
        std::string path = (dir / "extra.ply").string();
        std::ofstream os(path);
        os << "ply\nformat ascii 1.0\nelement vertex 2\n"
              "property float x\nproperty float y\nproperty float z\nproperty float confidence\n"
              "end_header\n0 0 0 0.5\n1 1 1 0.9\n";
        os.close();
        PointCloud pc = read_ply(path);
        CHECK(pc.size() == 2);
        CHECK(pc.points[1].x == doctest::Approx(1.0));
    }
    SUBCASE("meshes are rejected") {
        std::string path = (dir / "mesh.ply").string();
        std::ofstream os(path);
        os << "ply\nformat ascii 1.0\nelement vertex 3\n"
              "property float x\nproperty float y\nproperty float z\n"
              "element face 1\nproperty list uchar int vertex_indices\n"
              "end_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        os.close();
        CHECK_THROWS_AS(read_ply(path), ParseError);
    }
    SUBCASE("malformed rows report a line number") {
        std::string path = (dir / "bad.ply").string();
        std::ofstream os(path);
        os << "ply\nformat ascii 1.0\nelement vertex 2\n"
              "property float x\nproperty float y\nproperty float z\n"
              "end_header\n0 0 0\n1 oops 1\n";
        os.close();
        try {
            read_ply(path);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(":9:") != std::string::npos);
        }
    }
    SUBCASE("heat-map export re-parses with N vertices") {
        Rng rng(43);
        PointCloud pc = random_cloud(10, rng);
        std::vector<float> phi(10, 1.0f);
        std::string path = (dir / "heat.ply").string();
        write_ply_colored(path, pc, phi);
        std::ifstream is(path);
        std::string content((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        CHECK(content.find("property uchar red") != std::string::npos);
        CHECK(content.find("255 0 0") != std::string::npos);  // phi=1 is pure red
        PointCloud rd = read_ply(path);  // color props skipped with warnings
        CHECK(rd.size() == 10);
    }
    fs::remove_all(dir);
}
