// ukp: unsupervised keypoint pipeline driver.
// Subcommands: gen-data, train, detect, eval, export-heatmap.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "ukp/data/dataset.hpp"
#include "ukp/errors.hpp"
#include "ukp/eval/keypoint_io.hpp"
#include "ukp/eval/metrics.hpp"
#include "ukp/geom/ply_io.hpp"
#include "ukp/model/model.hpp"
#include "ukp/train/trainer.hpp"

namespace fs = std::filesystem;
using namespace ukp;

namespace {

int env_threads() {
    const char* v = std::getenv("UKP_THREADS");
    if (!v) return 1;
    int t = std::atoi(v);
    return t >= 1 ? t : 1;
}

model::RunConfig resolve_config(const std::string& config_path, const std::vector<std::string>& sets,
                                bool log_defaults = false) {
    model::RunConfig cfg;
    cfg.threads = env_threads();
    std::vector<std::string> applied;
    if (!config_path.empty()) model::merge_config_file(cfg, config_path, &applied);
    if (log_defaults && !config_path.empty()) {
        // report keys that stayed at their built-in defaults
        std::set<std::string> seen(applied.begin(), applied.end());
        model::RunConfig defaults;
        std::string missing;
        for (const char* key : {"lr", "batch_size", "epochs", "seed", "beta_alpha", "beta_beta"})
            if (!seen.count(key)) missing += missing.empty() ? key : std::string(", ") + key;
        if (!missing.empty())
            std::fprintf(stderr, "config: using built-in defaults for %s\n", missing.c_str());
    }
    for (const std::string& kv : sets) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        model::apply_config_line(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

// The resolved config written next to a checkpoint makes the model file
// self-describing for detect/eval.
std::string sibling_config(const std::string& model_path) {
    return (fs::path(model_path).parent_path() / "config_resolved.cfg").string();
}

model::UkpModel load_model(const std::string& model_path, std::string config_path,
                           const std::vector<std::string>& sets) {
    if (config_path.empty()) {
        config_path = sibling_config(model_path);
        if (!fs::exists(config_path))
            throw ConfigError("no --config given and " + config_path + " not found");
    }
    model::RunConfig cfg = resolve_config(config_path, sets);
    model::UkpModel m(cfg, cfg.seed);
    m.load(model_path);
    return m;
}

void write_report(const std::string& path, const std::vector<std::array<std::string, 3>>& rows) {
    if (path.empty()) return;
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp);
        os << "metric,category,value\n";
        for (const auto& r : rows) os << r[0] << "," << r[1] << "," << r[2] << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_gen_data(const std::string& out, const std::string& families_csv, uint64_t seed,
                 int64_t per_family, int64_t n_points, float jitter) {
    std::vector<data::ShapeFamily> families;
    std::string tok;
    std::istringstream ss(families_csv);
    while (std::getline(ss, tok, ',')) families.push_back(data::family_from_string(tok));
    data::CorpusCounts counts;
    // split per family: 75/10/15 of per_family within rounding
    counts.train = std::llround(0.75 * static_cast<double>(per_family));
    counts.val = std::llround(0.10 * static_cast<double>(per_family));
    counts.test = per_family - counts.train - counts.val;
    data::Corpus corpus = data::build_corpus(families, counts, n_points, jitter, seed);
    data::write_dataset(out, corpus);
    std::printf("wrote %zu clouds (%lld per family: %lld train / %lld val / %lld test) to %s\n",
                corpus.clouds.size(), static_cast<long long>(per_family),
                static_cast<long long>(counts.train), static_cast<long long>(counts.val),
                static_cast<long long>(counts.test), out.c_str());
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path, const std::string& out_dir,
              const std::string& ablate, const std::vector<std::string>& sets) {
    model::RunConfig cfg = resolve_config(config_path, sets, /*log_defaults=*/true);
    if (!ablate.empty()) cfg.set_ablation(ablate);
    cfg.validate();

    data::Corpus corpus = data::read_dataset(data_dir);
    std::vector<geom::PointCloud> train_split;
    for (int64_t i : corpus.split_indices("train")) train_split.push_back(corpus.clouds[static_cast<size_t>(i)]);
    if (train_split.empty()) throw TrainingError("dataset has no train split");

    fs::create_directories(out_dir);
    model::save_config((fs::path(out_dir) / "config_resolved.cfg").string(), cfg);
    model::UkpModel m(cfg, cfg.seed);
    train::TrainResult r = train::train(m, train_split, cfg, out_dir);
    std::printf("model: %s\nlog:   %s\n", r.model_path.c_str(), r.log_path.c_str());
    return 0;
}

int cmd_detect(const std::string& model_path, const std::string& config_path, const std::string& cloud_path,
               const std::string& out_path, const std::string& emb_out, float nms_radius, float threshold,
               int64_t top_k, const std::string& threshold_mode, const std::vector<std::string>& sets) {
    model::UkpModel m = load_model(model_path, config_path, sets);
    geom::PointCloud pc = geom::normalize_cloud(geom::read_ply(cloud_path));
    model::ThresholdMode mode = model::ThresholdMode::kAbsolute;
    if (threshold_mode == "half-max")
        mode = model::ThresholdMode::kHalfMax;
    else if (threshold_mode != "abs")
        throw ConfigError("--threshold-mode must be abs or half-max");
    model::DetectionResult r =
        model::detect(m, pc, nms_radius, threshold, top_k, mode, m.config().threads, !emb_out.empty());
    eval::write_keypoints(out_path, r);
    if (!emb_out.empty()) eval::write_embeddings(emb_out, pc.size(), r.embed_dim, r.embeddings);
    std::printf("%zu keypoints -> %s\n", r.keypoint_indices.size(), out_path.c_str());
    return 0;
}

int cmd_export_heatmap(const std::string& model_path, const std::string& config_path,
                       const std::string& cloud_path, const std::string& out_path,
                       const std::vector<std::string>& sets) {
    model::UkpModel m = load_model(model_path, config_path, sets);
    geom::PointCloud pc = geom::normalize_cloud(geom::read_ply(cloud_path));
    model::InferenceOutput inf = model::infer(m, pc, m.config().threads);
    geom::write_ply_colored(out_path, pc, inf.saliency);
    std::printf("heat map -> %s\n", out_path.c_str());
    return 0;
}

struct EvalArgs {
    std::string task, data_dir, keypoints_dir, split = "test";
    std::string model_path, config_path;
    std::string cloud_a, cloud_b, keypoints_a, keypoints_b;
    std::string report, curve;
    std::string union_mode = "distinct";
    bool oracle = false;
    int k = 8;
    int64_t n_keypoints = 4;
    int rotations = 20;
    double dist_threshold = 0.1, geo_threshold = 0.1;
    float nms_radius = 0.1f, threshold = 0.5f;
    uint64_t seed = 7;
    std::vector<std::string> sets;
};

int cmd_eval(const EvalArgs& a) {
    std::vector<std::array<std::string, 3>> rows;

    auto load_split = [&](bool need_labels) {
        data::Corpus corpus = data::read_dataset(a.data_dir);
        std::vector<int64_t> idx = corpus.split_indices(a.split);
        if (idx.empty()) throw MetricError("split '" + a.split + "' is empty");
        if (need_labels)
            for (int64_t i : idx)
                if (!corpus.clouds[static_cast<size_t>(i)].has_labels())
                    throw MetricError("cloud " + corpus.entries[static_cast<size_t>(i)].id +
                                      " lacks part labels required by this task");
        return std::make_pair(std::move(corpus), std::move(idx));
    };
    auto kp_path = [&](const std::string& id) {
        return (fs::path(a.keypoints_dir) / (id + ".txt")).string();
    };

    if (a.task == "part") {
        auto [corpus, idx] = load_split(true);
        std::map<std::string, std::pair<std::vector<model::DetectionResult>, std::vector<const geom::PointCloud*>>>
            by_family;
        for (int64_t i : idx) {
            auto& slot = by_family[corpus.entries[static_cast<size_t>(i)].family];
            slot.first.push_back(eval::read_keypoints(kp_path(corpus.entries[static_cast<size_t>(i)].id)));
            slot.second.push_back(&corpus.clouds[static_cast<size_t>(i)]);
        }
        for (auto& [family, slot] : by_family) {
            double v = eval::mean_correspondence_ratio(slot.first, slot.second, a.k, a.seed);
            rows.push_back({"mean_correspondence_ratio", family, fmt(v)});
            std::printf("mean_correspondence_ratio %s %.2f\n", family.c_str(), v);
        }
    } else if (a.task == "miou") {
        auto [corpus, idx] = load_split(false);
        std::map<std::string, std::pair<double, int64_t>> acc;
        std::vector<std::array<std::string, 3>> curve_rows;
        for (int64_t i : idx) {
            const geom::PointCloud& pc = corpus.clouds[static_cast<size_t>(i)];
            if (pc.gt_keypoints.empty())
                throw MetricError("cloud " + corpus.entries[static_cast<size_t>(i)].id + " has no keypoint labels");
            model::DetectionResult det = eval::read_keypoints(kp_path(corpus.entries[static_cast<size_t>(i)].id));
            geom::KnnGraph graph = geom::build_knn_graph(pc);
            double v = eval::keypoint_miou(det.keypoint_indices, pc.gt_keypoints, graph, a.geo_threshold);
            auto& slot = acc[corpus.entries[static_cast<size_t>(i)].family];
            slot.first += v;
            slot.second += 1;
            if (!a.curve.empty())
                for (int t = 1; t <= 10; ++t) {
                    double thr = 0.01 * t;
                    curve_rows.push_back({corpus.entries[static_cast<size_t>(i)].id, fmt(thr),
                                          fmt(eval::keypoint_miou(det.keypoint_indices, pc.gt_keypoints, graph, thr))});
                }
        }
        for (auto& [family, slot] : acc) {
            double v = slot.first / static_cast<double>(slot.second);
            rows.push_back({"keypoint_miou", family, fmt(v)});
            std::printf("keypoint_miou %s %.4f\n", family.c_str(), v);
        }
        if (!a.curve.empty()) {
            std::string tmp = a.curve + ".tmp";
            std::ofstream os(tmp, std::ios::trunc);
            os << "cloud,geo_threshold,miou\n";
            for (auto& r : curve_rows) os << r[0] << "," << r[1] << "," << r[2] << "\n";
            os.close();
            if (std::rename(tmp.c_str(), a.curve.c_str()) != 0) throw IoError("cannot rename " + tmp);
        }
    } else if (a.task == "repeat") {
        auto [corpus, idx] = load_split(false);
        model::Detector detector;
        std::optional<model::UkpModel> m;
        if (a.oracle) {
            detector = [](const geom::PointCloud& pc) {
                model::DetectionResult r;
                r.keypoint_indices = pc.gt_keypoints;
                for (size_t i = 0; i < r.keypoint_indices.size(); ++i)
                    r.scores.push_back(1.0f - 0.001f * static_cast<float>(i));
                return r;
            };
        } else {
            m.emplace(load_model(a.model_path, a.config_path, a.sets));
            detector = [&](const geom::PointCloud& pc) {
                // ranking task: no probability cut, top-n after NMS
                return model::detect(*m, pc, a.nms_radius, 0.0f, a.n_keypoints,
                                     model::ThresholdMode::kAbsolute, m->config().threads);
            };
        }
        double acc = 0.0;
        for (int64_t i : idx) {
            double v = eval::rotation_repeatability(detector, corpus.clouds[static_cast<size_t>(i)],
                                                    a.n_keypoints, a.dist_threshold, a.rotations,
                                                    a.seed + static_cast<uint64_t>(i));
            acc += v;
            rows.push_back({"rotation_repeatability", corpus.entries[static_cast<size_t>(i)].id, fmt(v)});
        }
        double mean = acc / static_cast<double>(idx.size());
        rows.push_back({"rotation_repeatability", "mean", fmt(mean)});
        std::printf("rotation_repeatability mean %.2f\n", mean);
    } else if (a.task == "corr") {
        geom::PointCloud pa = geom::read_ply(a.cloud_a);
        geom::PointCloud pb = geom::read_ply(a.cloud_b);
        if (!pa.has_correspondence() || !pb.has_correspondence())
            throw MetricError("corr task requires clouds with correspondence ids");
        model::DetectionResult da = eval::read_keypoints(a.keypoints_a);
        model::DetectionResult db = eval::read_keypoints(a.keypoints_b);
        eval::UnionMode mode =
            a.union_mode == "summed" ? eval::UnionMode::kSummed : eval::UnionMode::kDistinct;
        double v = eval::correspondence_iou(da.keypoint_indices, pa.correspondence_ids, db.keypoint_indices,
                                            pb.correspondence_ids, mode);
        rows.push_back({"correspondence_iou", a.union_mode, fmt(v)});
        std::printf("correspondence_iou %.2f\n", v);
    } else {
        throw ConfigError("unknown eval task: " + a.task);
    }
    write_report(a.report, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unsupervised 3D keypoint pipeline"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic labeled shape corpus");
    std::string gen_out, gen_families = "rectangle,box,table,chair";
    uint64_t gen_seed = 2024;
    int64_t gen_per_family = 84, gen_points = 2048;
    float gen_jitter = 0.005f;
    gen->add_option("--out", gen_out, "output dataset directory")->required();
    gen->add_option("--families", gen_families, "comma list of rectangle,box,table,chair")
        ->capture_default_str();
    gen->add_option("--seed", gen_seed, "master seed")->capture_default_str();
    gen->add_option("--per-family", gen_per_family, "clouds per family")->capture_default_str();
    gen->add_option("--n-points", gen_points, "points per cloud")->capture_default_str();
    gen->add_option("--jitter", gen_jitter, "surface jitter sigma")->capture_default_str();

    // train
    auto* tr = app.add_subcommand("train", "train the detector on a dataset");
    std::string tr_data, tr_config, tr_out, tr_ablate;
    std::vector<std::string> tr_sets;
    tr->add_option("--data", tr_data, "dataset directory (manifest.csv)")->required();
    tr->add_option("--config", tr_config, "config file (key = value lines)");
    tr->add_option("--out", tr_out, "output directory")->required();
    tr->add_option("--ablate", tr_ablate, "one of no_gan|no_distill|no_lrf|no_sym");
    tr->add_option("--set", tr_sets, "override a config key, e.g. --set epochs=50")->take_all();

    // detect
    auto* de = app.add_subcommand("detect", "detect keypoints on one cloud");
    std::string de_model, de_config, de_cloud, de_out, de_emb, de_mode = "abs";
    float de_nms = 0.1f, de_thresh = 0.5f;
    int64_t de_topk = -1;
    std::vector<std::string> de_sets;
    de->add_option("--model", de_model, "checkpoint file")->required();
    de->add_option("--config", de_config, "config file (default: next to the model)");
    de->add_option("--cloud", de_cloud, "input PLY")->required();
    de->add_option("--out", de_out, "keypoint file to write")->required();
    de->add_option("--emb-out", de_emb, "optional embedding sidecar (UKPE)");
    de->add_option("--nms-radius", de_nms, "suppression radius")->capture_default_str();
    de->add_option("--threshold", de_thresh, "probability threshold")->capture_default_str();
    de->add_option("--top-k", de_topk, "keep exactly k keypoints");
    de->add_option("--threshold-mode", de_mode, "abs | half-max")->capture_default_str();
    de->add_option("--set", de_sets, "override a config key")->take_all();

    // eval
    auto* ev = app.add_subcommand("eval", "run an evaluation task");
    EvalArgs ea;
    ev->add_option("--task", ea.task, "part | miou | repeat | corr")->required();
    ev->add_option("--data", ea.data_dir, "dataset directory");
    ev->add_option("--keypoints", ea.keypoints_dir, "directory of <cloud-id>.txt keypoint files");
    ev->add_option("--split", ea.split, "dataset split")->capture_default_str();
    ev->add_option("--model", ea.model_path, "checkpoint (repeat task)");
    ev->add_option("--config", ea.config_path, "config for the model");
    ev->add_flag("--oracle", ea.oracle, "repeat task: use the ground-truth oracle detector");
    ev->add_option("--cloud-a", ea.cloud_a, "corr task: first cloud");
    ev->add_option("--cloud-b", ea.cloud_b, "corr task: second cloud");
    ev->add_option("--keypoints-a", ea.keypoints_a, "corr task: first keypoint file");
    ev->add_option("--keypoints-b", ea.keypoints_b, "corr task: second keypoint file");
    ev->add_option("--union", ea.union_mode, "corr: distinct | summed")->capture_default_str();
    ev->add_option("--k", ea.k, "part: number of clusters")->capture_default_str();
    ev->add_option("--n-keypoints", ea.n_keypoints, "repeat: keypoints per cloud")->capture_default_str();
    ev->add_option("--rotations", ea.rotations, "repeat: random rotations")->capture_default_str();
    ev->add_option("--dist-threshold", ea.dist_threshold, "repeat: distance threshold")->capture_default_str();
    ev->add_option("--geo-threshold", ea.geo_threshold, "miou: geodesic threshold")->capture_default_str();
    ev->add_option("--nms-radius", ea.nms_radius, "repeat: suppression radius")->capture_default_str();
    ev->add_option("--seed", ea.seed, "metric seed")->capture_default_str();
    ev->add_option("--report", ea.report, "CSV report path");
    ev->add_option("--curve", ea.curve, "miou: per-threshold curve CSV");
    ev->add_option("--set", ea.sets, "override a config key")->take_all();

    // export-heatmap
    auto* hm = app.add_subcommand("export-heatmap", "write a saliency-colored PLY");
    std::string hm_model, hm_config, hm_cloud, hm_out;
    std::vector<std::string> hm_sets;
    hm->add_option("--model", hm_model, "checkpoint file")->required();
    hm->add_option("--config", hm_config, "config file (default: next to the model)");
    hm->add_option("--cloud", hm_cloud, "input PLY")->required();
    hm->add_option("--out", hm_out, "output PLY")->required();
    hm->add_option("--set", hm_sets, "override a config key")->take_all();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exit code 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_data(gen_out, gen_families, gen_seed, gen_per_family, gen_points, gen_jitter);
        if (tr->parsed()) return cmd_train(tr_data, tr_config, tr_out, tr_ablate, tr_sets);
        if (de->parsed())
            return cmd_detect(de_model, de_config, de_cloud, de_out, de_emb, de_nms, de_thresh, de_topk,
                              de_mode, de_sets);
        if (ev->parsed()) return cmd_eval(ea);
        if (hm->parsed()) return cmd_export_heatmap(hm_model, hm_config, hm_cloud, hm_out, hm_sets);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const GenerationError& e) {
        std::fprintf(stderr, "%s\nrun with --help for usage\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }
    return 2;
}
