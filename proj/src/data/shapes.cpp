#include "ukp/data/shapes.hpp"

#include <algorithm>
#include <cmath>

#include "ukp/errors.hpp"
#include "ukp/geom/grid_index.hpp"
#include "ukp/rng.hpp"

namespace ukp::data {

using geom::PointCloud;
using geom::Vec3;

namespace {

constexpr int kCorrGrid = 8;  // correspondence cells per patch axis

// Planar parallelogram patch: p(u, v) = origin + u*eu + v*ev, u,v in [0,1].
struct Patch {
    Vec3 origin, eu, ev;
    int part = 0;
    float area() const { return eu.cross(ev).norm(); }
};

struct ShapeModel {
    std::vector<Patch> patches;
    std::vector<Vec3> corners;  // analytic ground-truth keypoints
};

void add_cuboid(ShapeModel& m, const Vec3& lo, const Vec3& hi, int part, bool skip_top = false) {
    Vec3 dx{hi.x - lo.x, 0, 0}, dy{0, hi.y - lo.y, 0}, dz{0, 0, hi.z - lo.z};
    m.patches.push_back({lo, dx, dy, part});                         // bottom (z = lo.z)
    if (!skip_top) m.patches.push_back({{lo.x, lo.y, hi.z}, dx, dy, part});  // top
    m.patches.push_back({lo, dx, dz, part});                         // y = lo.y
    m.patches.push_back({{lo.x, hi.y, lo.z}, dx, dz, part});         // y = hi.y
    m.patches.push_back({lo, dy, dz, part});                         // x = lo.x
    m.patches.push_back({{hi.x, lo.y, lo.z}, dy, dz, part});         // x = hi.x
}

ShapeModel build_model(ShapeFamily family, const std::vector<float>& sp) {
    ShapeModel m;
    switch (family) {
        case ShapeFamily::kRectangle: {
            float a = sp[0], b = sp[1];
            m.patches.push_back({{-a, -b, 0}, {2 * a, 0, 0}, {0, 2 * b, 0}, 0});
            for (int sx = -1; sx <= 1; sx += 2)
                for (int sy = -1; sy <= 1; sy += 2)
                    m.corners.emplace_back(static_cast<float>(sx) * a, static_cast<float>(sy) * b, 0.0f);
            break;
        }
        case ShapeFamily::kBox: {
            float a = sp[0], b = sp[1], c = sp[2];
            add_cuboid(m, {-a, -b, -c}, {a, b, c}, 0);
            // faces as separate parts
            for (size_t i = 0; i < m.patches.size(); ++i) m.patches[i].part = static_cast<int>(i);
            for (int sx = -1; sx <= 1; sx += 2)
                for (int sy = -1; sy <= 1; sy += 2)
                    for (int sz = -1; sz <= 1; sz += 2)
                        m.corners.emplace_back(static_cast<float>(sx) * a, static_cast<float>(sy) * b,
                                               static_cast<float>(sz) * c);
            break;
        }
        case ShapeFamily::kTable: {
            float a = sp[0], b = sp[1], h = sp[2], t = sp[3], s = sp[4];
            add_cuboid(m, {-a, -b, h - t}, {a, b, h}, 0);
            int leg = 1;
            for (int sx = -1; sx <= 1; sx += 2)
                for (int sy = -1; sy <= 1; sy += 2) {
                    float x0 = sx < 0 ? -a : a - s;
                    float y0 = sy < 0 ? -b : b - s;
                    add_cuboid(m, {x0, y0, 0}, {x0 + s, y0 + s, h - t}, leg++, /*skip_top=*/true);
                }
            for (int sx = -1; sx <= 1; sx += 2)
                for (int sy = -1; sy <= 1; sy += 2) {
                    m.corners.emplace_back(static_cast<float>(sx) * a, static_cast<float>(sy) * b, h);
                    m.corners.emplace_back(static_cast<float>(sx) * a, static_cast<float>(sy) * b, 0.0f);
                }
            break;
        }
        case ShapeFamily::kChair: {
            float a = sp[0], b = sp[1], h = sp[2], t = sp[3], s = sp[4], bh = sp[5], bt = sp[6];
            add_cuboid(m, {-a, -b, h - t}, {a, b, h}, 0);                    // seat
            add_cuboid(m, {-a, b - bt, h}, {a, b, h + bh}, 1);               // back
            int leg = 2;
            for (int sx = -1; sx <= 1; sx += 2)
                for (int sy = -1; sy <= 1; sy += 2) {
                    float x0 = sx < 0 ? -a : a - s;
                    float y0 = sy < 0 ? -b : b - s;
                    add_cuboid(m, {x0, y0, 0}, {x0 + s, y0 + s, h - t}, leg++, /*skip_top=*/true);
                }
            for (int sx = -1; sx <= 1; sx += 2) {
                float x = static_cast<float>(sx) * a;
                m.corners.emplace_back(x, -b, h);          // seat front corners
                m.corners.emplace_back(x, b, h);           // seat rear corners
                m.corners.emplace_back(x, b, h + bh);      // back top corners
                m.corners.emplace_back(x, -b, 0.0f);       // front leg bottoms
                m.corners.emplace_back(x, b, 0.0f);        // rear leg bottoms
            }
            break;
        }
    }
    return m;
}

std::vector<float> default_params(ShapeFamily family, Rng& rng) {
    switch (family) {
        case ShapeFamily::kRectangle:
            return {1.0f, static_cast<float>(rng.uniform(0.45, 0.8))};
        case ShapeFamily::kBox:
            return {1.0f, static_cast<float>(rng.uniform(0.55, 0.75)), static_cast<float>(rng.uniform(0.3, 0.45))};
        case ShapeFamily::kTable:
            return {1.0f, static_cast<float>(rng.uniform(0.6, 0.8)), static_cast<float>(rng.uniform(1.0, 1.4)),
                    0.12f, 0.16f};
        case ShapeFamily::kChair:
            return {0.55f, static_cast<float>(rng.uniform(0.5, 0.6)), static_cast<float>(rng.uniform(0.55, 0.7)),
                    0.1f, 0.12f, static_cast<float>(rng.uniform(0.55, 0.75)), 0.1f};
    }
    throw GenerationError("unknown family");
}

size_t expected_params(ShapeFamily family) {
    switch (family) {
        case ShapeFamily::kRectangle: return 2;
        case ShapeFamily::kBox: return 3;
        case ShapeFamily::kTable: return 5;
        case ShapeFamily::kChair: return 7;
    }
    return 0;
}

// (part, corr) of a position: nearest patch, then the quantized (u, v) cell.
std::pair<int, int> classify(const ShapeModel& m, const Vec3& p) {
    int best_patch = 0;
    float best_d2 = std::numeric_limits<float>::max();
    float best_u = 0, best_v = 0;
    for (size_t k = 0; k < m.patches.size(); ++k) {
        const Patch& pa = m.patches[k];
        float lu2 = pa.eu.norm2(), lv2 = pa.ev.norm2();
        Vec3 d = p - pa.origin;
        float u = lu2 > 0 ? std::clamp(d.dot(pa.eu) / lu2, 0.0f, 1.0f) : 0.0f;
        float v = lv2 > 0 ? std::clamp(d.dot(pa.ev) / lv2, 0.0f, 1.0f) : 0.0f;
        Vec3 q = pa.origin + pa.eu * u + pa.ev * v;
        float d2 = geom::dist2(p, q);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_patch = static_cast<int>(k);
            best_u = u;
            best_v = v;
        }
    }
    int cu = std::min(kCorrGrid - 1, static_cast<int>(best_u * kCorrGrid));
    int cv = std::min(kCorrGrid - 1, static_cast<int>(best_v * kCorrGrid));
    int corr = best_patch * kCorrGrid * kCorrGrid + cu * kCorrGrid + cv;
    return {m.patches[static_cast<size_t>(best_patch)].part, corr};
}

}  // namespace

ShapeFamily family_from_string(const std::string& name) {
    if (name == "rectangle") return ShapeFamily::kRectangle;
    if (name == "box") return ShapeFamily::kBox;
    if (name == "table") return ShapeFamily::kTable;
    if (name == "chair") return ShapeFamily::kChair;
    throw GenerationError("unknown shape family: " + name);
}

std::string family_name(ShapeFamily f) {
    switch (f) {
        case ShapeFamily::kRectangle: return "rectangle";
        case ShapeFamily::kBox: return "box";
        case ShapeFamily::kTable: return "table";
        case ShapeFamily::kChair: return "chair";
    }
    return "?";
}

geom::PointCloud generate(const ShapeSpec& spec) {
    if (spec.n_points < 64) throw GenerationError("n_points must be >= 64");
    if (spec.jitter < 0.0f) throw GenerationError("jitter must be >= 0");
    Rng rng(spec.seed);
    std::vector<float> sp = spec.size_params.empty() ? default_params(spec.family, rng) : spec.size_params;
    if (sp.size() != expected_params(spec.family))
        throw GenerationError(family_name(spec.family) + " expects " +
                              std::to_string(expected_params(spec.family)) + " size parameters");
    for (float v : sp)
        if (!(v > 0.0f)) throw GenerationError("size parameters must be positive");

    ShapeModel model = build_model(spec.family, sp);

    std::vector<float> cum;
    cum.reserve(model.patches.size());
    float total = 0.0f;
    for (const Patch& p : model.patches) {
        total += p.area();
        cum.push_back(total);
    }

    PointCloud pc;
    int64_t half = (spec.n_points + 1) / 2;
    pc.points.reserve(static_cast<size_t>(spec.n_points));
    pc.part_labels.reserve(static_cast<size_t>(spec.n_points));
    pc.correspondence_ids.reserve(static_cast<size_t>(spec.n_points));

    auto push_classified = [&](const Vec3& p) {
        auto [part, corr] = classify(model, p);
        pc.points.push_back(p);
        pc.part_labels.push_back(part);
        pc.correspondence_ids.push_back(corr);
    };

    for (int64_t i = 0; i < half; ++i) {
        float pick = static_cast<float>(rng.uniform01()) * total;
        size_t k = static_cast<size_t>(std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
        if (k >= model.patches.size()) k = model.patches.size() - 1;
        const Patch& pa = model.patches[k];
        float u = static_cast<float>(rng.uniform01());
        float v = static_cast<float>(rng.uniform01());
        Vec3 p = pa.origin + pa.eu * u + pa.ev * v;
        push_classified(p);
        if (pc.size() < spec.n_points) push_classified(Vec3{-p.x, p.y, p.z});  // mirror mate
    }

    if (spec.jitter > 0.0f) {
        for (Vec3& p : pc.points) {
            p.x += static_cast<float>(rng.normal()) * spec.jitter;
            p.y += static_cast<float>(rng.normal()) * spec.jitter;
            p.z += static_cast<float>(rng.normal()) * spec.jitter;
        }
    }

    // snap analytic corners to sampled points
    geom::GridIndex index(pc.points, 0.05f);
    for (const Vec3& c : model.corners) {
        int64_t idx = index.nearest(c);
        if (idx >= 0 && std::find(pc.gt_keypoints.begin(), pc.gt_keypoints.end(), idx) == pc.gt_keypoints.end())
            pc.gt_keypoints.push_back(idx);
    }

    pc.symmetry_plane = geom::SymmetryPlane{{1, 0, 0}, 0.0f};
    return normalize_cloud(pc);
}

geom::PointCloud downsample(const geom::PointCloud& pc, int64_t m, uint64_t seed) {
    if (m < 1 || m > pc.size()) throw GeometryError("downsample: m out of range");
    Rng rng(seed);
    std::vector<int64_t> idx(static_cast<size_t>(pc.size()));
    for (int64_t i = 0; i < pc.size(); ++i) idx[static_cast<size_t>(i)] = i;
    // partial Fisher-Yates
    for (int64_t i = 0; i < m; ++i) {
        int64_t j = i + rng.uniform_int(pc.size() - i);
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    }
    idx.resize(static_cast<size_t>(m));

    PointCloud out;
    out.points.reserve(static_cast<size_t>(m));
    for (int64_t i : idx) out.points.push_back(pc.points[static_cast<size_t>(i)]);
    if (pc.has_labels())
        for (int64_t i : idx) out.part_labels.push_back(pc.part_labels[static_cast<size_t>(i)]);
    if (pc.has_correspondence())
        for (int64_t i : idx) out.correspondence_ids.push_back(pc.correspondence_ids[static_cast<size_t>(i)]);
    out.symmetry_plane = pc.symmetry_plane;

    if (!pc.gt_keypoints.empty()) {
        geom::GridIndex index(out.points, 0.05f);
        for (int64_t k : pc.gt_keypoints) {
            int64_t snapped = index.nearest(pc.points[static_cast<size_t>(k)]);
            if (snapped >= 0 &&
                std::find(out.gt_keypoints.begin(), out.gt_keypoints.end(), snapped) == out.gt_keypoints.end())
                out.gt_keypoints.push_back(snapped);
        }
    }
    return out;
}

}  // namespace ukp::data
