#include "ukp/geom/rotation.hpp"

#include <cmath>

namespace ukp::geom {

Mat3 quat_to_mat(double w, double x, double y, double z) {
    double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n;
    x /= n;
    y /= n;
    z /= n;
    Mat3 r;
    r.m[0] = static_cast<float>(1 - 2 * (y * y + z * z));
    r.m[1] = static_cast<float>(2 * (x * y + w * z));
    r.m[2] = static_cast<float>(2 * (x * z - w * y));
    r.m[3] = static_cast<float>(2 * (x * y - w * z));
    r.m[4] = static_cast<float>(1 - 2 * (x * x + z * z));
    r.m[5] = static_cast<float>(2 * (y * z + w * x));
    r.m[6] = static_cast<float>(2 * (x * z + w * y));
    r.m[7] = static_cast<float>(2 * (y * z - w * x));
    r.m[8] = static_cast<float>(1 - 2 * (x * x + y * y));
    return r;
}

Mat3 random_rotation(Rng& rng) {
    // Shoemake: uniform unit quaternion from three uniforms.
    double u1 = rng.uniform01(), u2 = rng.uniform01(), u3 = rng.uniform01();
    double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    double a = 2.0 * M_PI * u2, b = 2.0 * M_PI * u3;
    return quat_to_mat(s2 * std::cos(b), s1 * std::sin(a), s1 * std::cos(a), s2 * std::sin(b));
}

Mat3 random_rotation(uint64_t seed) {
    Rng rng(seed);
    return random_rotation(rng);
}

}  // namespace ukp::geom
