#pragma once

#include <string>

#include "ukp/model/model.hpp"

namespace ukp::eval {

// Detector-agnostic keypoint file: one "index score" line per keypoint,
// scores descending.
void write_keypoints(const std::string& path, const model::DetectionResult& result);
model::DetectionResult read_keypoints(const std::string& path);

// Embedding sidecar: "UKPE" magic, u32 N, u32 F, row-major f32 payload.
void write_embeddings(const std::string& path, int64_t n, int64_t f, const std::vector<float>& data);
void read_embeddings(const std::string& path, int64_t& n, int64_t& f, std::vector<float>& data);

}  // namespace ukp::eval
