#pragma once

#include "ukp/geom/vec3.hpp"
#include "ukp/rng.hpp"

namespace ukp::geom {

// Uniformly distributed proper rotation (Shoemake's uniform quaternion).
Mat3 random_rotation(Rng& rng);
Mat3 random_rotation(uint64_t seed);

Mat3 quat_to_mat(double w, double x, double y, double z);

}  // namespace ukp::geom
