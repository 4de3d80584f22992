// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfseeker {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3 &o) const { return x == o.x && y == o.y && z == o.z; }

    double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }

    Vec3 normalized() const {
        double n = norm();
        if (n <= 0.0)
            throw std::domain_error("Vec3::normalized: zero-length vector");
        return {x / n, y / n, z / n};
    }
};

inline double sqr(double v) { return v * v; }

// wrap an angle into (-pi, pi]
inline double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0)
        a += 2.0 * kPi;
    return a - kPi;
}

template <typename T> bool all_finite(const std::vector<T> &v) {
    for (T x : v)
        if (!std::isfinite(static_cast<double>(x)))
            return false;
    return true;
}

} // namespace rfseeker
