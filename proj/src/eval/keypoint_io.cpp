#include "ukp/eval/keypoint_io.hpp"

#include <cstdio>
#include <cstring>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

namespace ukp::eval {

void write_keypoints(const std::string& path, const model::DetectionResult& result) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp);
        char buf[64];
        for (size_t i = 0; i < result.keypoint_indices.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%lld %.9g\n",
                          static_cast<long long>(result.keypoint_indices[i]),
                          static_cast<double>(result.scores[i]));
            os << buf;
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp);
}

model::DetectionResult read_keypoints(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    model::DetectionResult r;
    std::string line;
    int line_no = 0;
    std::set<int64_t> seen;
    float prev_score = std::numeric_limits<float>::max();
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        int64_t idx;
        float score;
        if (!(ss >> idx >> score))
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'index score'");
        if (idx < 0) throw ParseError(path + ":" + std::to_string(line_no) + ": negative index");
        if (!seen.insert(idx).second)
            throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate index " + std::to_string(idx));
        if (score > prev_score)
            throw ParseError(path + ":" + std::to_string(line_no) + ": scores must be descending");
        prev_score = score;
        r.keypoint_indices.push_back(idx);
        r.scores.push_back(score);
    }
    return r;
}

void write_embeddings(const std::string& path, int64_t n, int64_t f, const std::vector<float>& data) {
    if (static_cast<int64_t>(data.size()) != n * f) throw IoError("write_embeddings: size mismatch");
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp);
        os.write("UKPE", 4);
        uint32_t nn = static_cast<uint32_t>(n), ff = static_cast<uint32_t>(f);
        os.write(reinterpret_cast<const char*>(&nn), 4);
        os.write(reinterpret_cast<const char*>(&ff), 4);
        os.write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(float)));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot rename " + tmp);
}

void read_embeddings(const std::string& path, int64_t& n, int64_t& f, std::vector<float>& data) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, "UKPE", 4) != 0)
        throw IoError(path + ": not an embedding file");
    uint32_t nn = 0, ff = 0;
    is.read(reinterpret_cast<char*>(&nn), 4);
    is.read(reinterpret_cast<char*>(&ff), 4);
    n = nn;
    f = ff;
    data.resize(static_cast<size_t>(n * f));
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (static_cast<size_t>(is.gcount()) != data.size() * sizeof(float))
        throw IoError(path + ": truncated payload");
}

}  // namespace ukp::eval
