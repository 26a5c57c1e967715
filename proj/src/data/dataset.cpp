#include "ukp/data/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ukp/errors.hpp"
#include "ukp/geom/ply_io.hpp"
#include "ukp/rng.hpp"

namespace ukp::data {

namespace fs = std::filesystem;

std::vector<int64_t> Corpus::split_indices(const std::string& split) const {
    std::vector<int64_t> out;
    for (size_t i = 0; i < entries.size(); ++i)
        if (entries[i].split == split) out.push_back(static_cast<int64_t>(i));
    return out;
}

std::vector<int64_t> Corpus::split_indices(const std::string& split, const std::string& family) const {
    std::vector<int64_t> out;
    for (size_t i = 0; i < entries.size(); ++i)
        if (entries[i].split == split && entries[i].family == family) out.push_back(static_cast<int64_t>(i));
    return out;
}

Corpus build_corpus(const std::vector<ShapeFamily>& families, const CorpusCounts& counts,
                    int64_t n_points, float jitter, uint64_t master_seed) {
    if (families.empty()) throw GenerationError("build_corpus: no families");
    Corpus corpus;
    Rng master(master_seed);
    for (ShapeFamily fam : families) {
        int64_t total = counts.train + counts.val + counts.test;
        for (int64_t i = 0; i < total; ++i) {
            ShapeSpec spec;
            spec.family = fam;
            spec.n_points = n_points;
            spec.jitter = jitter;
            spec.seed = master.derive(static_cast<uint64_t>(i) * 4 + static_cast<uint64_t>(fam)).next_u64();
            CloudEntry e;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%s_%04lld", family_name(fam).c_str(), static_cast<long long>(i));
            e.id = buf;
            e.family = family_name(fam);
            e.split = i < counts.train ? "train" : (i < counts.train + counts.val ? "val" : "test");
            e.path = "clouds/" + e.id + ".ply";
            corpus.entries.push_back(e);
            corpus.clouds.push_back(generate(spec));
        }
    }
    return corpus;
}

void write_dataset(const std::string& dir, const Corpus& corpus) {
    std::error_code ec;
    fs::create_directories(fs::path(dir) / "clouds", ec);
    if (ec) throw IoError("cannot create dataset directory " + dir);
    for (size_t i = 0; i < corpus.entries.size(); ++i)
        geom::write_ply((fs::path(dir) / corpus.entries[i].path).string(), corpus.clouds[i]);

    std::string tmp = (fs::path(dir) / "manifest.csv.tmp").string();
    std::string final_path = (fs::path(dir) / "manifest.csv").string();
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp);
        os << "id,family,split,path\n";
        for (const CloudEntry& e : corpus.entries)
            os << e.id << "," << e.family << "," << e.split << "," << e.path << "\n";
    }
    if (std::rename(tmp.c_str(), final_path.c_str()) != 0) throw IoError("cannot rename manifest");
}

Corpus read_dataset(const std::string& dir) {
    std::string manifest = (fs::path(dir) / "manifest.csv").string();
    std::ifstream is(manifest);
    if (!is) throw IoError("cannot open " + manifest);
    Corpus corpus;
    std::string line;
    int line_no = 0;
    if (!std::getline(is, line)) throw ParseError(manifest + ":1: empty manifest");
    ++line_no;
    if (line.rfind("id,family,split,path", 0) != 0)
        throw ParseError(manifest + ":1: missing manifest header");
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        CloudEntry e;
        if (!std::getline(ss, e.id, ',') || !std::getline(ss, e.family, ',') ||
            !std::getline(ss, e.split, ',') || !std::getline(ss, e.path))
            throw ParseError(manifest + ":" + std::to_string(line_no) + ": malformed row");
        corpus.entries.push_back(e);
        corpus.clouds.push_back(geom::read_ply((fs::path(dir) / e.path).string()));
    }
    return corpus;
}

}  // namespace ukp::data
