#pragma once

#include <string>
#include <vector>

#include "ukp/data/shapes.hpp"

namespace ukp::data {

struct CloudEntry {
    std::string id;
    std::string family;
    std::string split;  // train | val | test
    std::string path;   // relative to the dataset directory
};

struct Corpus {
    std::vector<geom::PointCloud> clouds;
    std::vector<CloudEntry> entries;

    std::vector<int64_t> split_indices(const std::string& split) const;
    std::vector<int64_t> split_indices(const std::string& split, const std::string& family) const;
};

struct CorpusCounts {
    int64_t train = 64, val = 8, test = 12;
};

// Seeded synthetic corpus; one entry per (family, index) with split labels.
Corpus build_corpus(const std::vector<ShapeFamily>& families, const CorpusCounts& counts,
                    int64_t n_points, float jitter, uint64_t master_seed);

// Writes one PLY per cloud plus manifest.csv (id, family, split, path).
void write_dataset(const std::string& dir, const Corpus& corpus);
Corpus read_dataset(const std::string& dir);

}  // namespace ukp::data
