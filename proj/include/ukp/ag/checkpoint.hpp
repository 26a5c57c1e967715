#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ukp/ag/adam.hpp"
#include "ukp/ag/params.hpp"

namespace ukp::ag {

// Checkpoint container: magic "UKPF", format version u32, then repeated
// records of (name length u16, UTF-8 name, rank u8, dims u32..., row-major
// little-endian f32 payload). Optimizer state lives in a sibling file with
// the same layout under names "<param>.m", "<param>.v" and "adam.t".

constexpr uint32_t kCheckpointVersion = 1;

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

void save_records(const std::string& path, const NamedTensors& records);
NamedTensors load_records(const std::string& path);

void save_params(const std::string& path, const ParamSet& params);
// Loads by name into an already-constructed set; shapes must match.
void load_params(const std::string& path, ParamSet& params);

void save_adam_state(const std::string& path, const Adam& opt, const ParamSet& params);
void load_adam_state(const std::string& path, Adam& opt, const ParamSet& params);

}  // namespace ukp::ag
