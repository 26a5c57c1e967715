#pragma once

#include <cmath>

namespace ukp::geom {

struct Vec3 {
    float x = 0.0f, y = 0.0f, z = 0.0f;

    Vec3() = default;
    Vec3(float x_, float y_, float z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(float s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    float dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    float norm2() const { return dot(*this); }
    float norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const {
        float n = norm();
        return n > 0.0f ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

inline float dist2(const Vec3& a, const Vec3& b) { return (a - b).norm2(); }
inline float dist(const Vec3& a, const Vec3& b) { return std::sqrt(dist2(a, b)); }

// Column-major 3x3 rotation/basis matrix: columns are the x, y, z axes.
struct Mat3 {
    float m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};  // m[3*col + row]

    static Mat3 identity() { return Mat3(); }
    static Mat3 from_cols(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 r;
        r.m[0] = c0.x; r.m[1] = c0.y; r.m[2] = c0.z;
        r.m[3] = c1.x; r.m[4] = c1.y; r.m[5] = c1.z;
        r.m[6] = c2.x; r.m[7] = c2.y; r.m[8] = c2.z;
        return r;
    }
    Vec3 col(int c) const { return {m[3 * c], m[3 * c + 1], m[3 * c + 2]}; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[3] * v.y + m[6] * v.z,
                m[1] * v.x + m[4] * v.y + m[7] * v.z,
                m[2] * v.x + m[5] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int c = 0; c < 3; ++c) {
            Vec3 v = *this * o.col(c);
            r.m[3 * c] = v.x;
            r.m[3 * c + 1] = v.y;
            r.m[3 * c + 2] = v.z;
        }
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int c = 0; c < 3; ++c)
            for (int rr = 0; rr < 3; ++rr) r.m[3 * c + rr] = m[3 * rr + c];
        return r;
    }
    // R^T v without materializing the transpose.
    Vec3 apply_transposed(const Vec3& v) const {
        return {col(0).dot(v), col(1).dot(v), col(2).dot(v)};
    }
    float det() const {
        return col(0).dot(col(1).cross(col(2)));
    }
};

}  // namespace ukp::geom
