#pragma once

#include <array>
#include <cmath>

namespace satground {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle to [0, 360).
inline double wrap_deg(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0) w += 360.0;
    // fmod can return 360.0 - epsilon rounding back up
    if (w >= 360.0) w -= 360.0;
    return w;
}

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return {}; }

    static Mat3 rotation_x(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return {{1, 0, 0, 0, c, -s, 0, s, c}};
    }
    static Mat3 rotation_y(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return {{c, 0, s, 0, 1, 0, -s, 0, c}};
    }
    static Mat3 rotation_z(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return {{c, -s, 0, s, c, 0, 0, 0, 1}};
    }

    double operator()(int r, int c) const { return m[r * 3 + c]; }
    double& operator()(int r, int c) { return m[r * 3 + c]; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Mat3 transposed() const { return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}}; }

    // max-abs entry of R^T R - I
    double orthonormality_error() const {
        Mat3 rtr = transposed() * (*this);
        double e = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) e = std::max(e, std::abs(rtr(i, j) - (i == j ? 1.0 : 0.0)));
        return e;
    }
};

// Rigid world -> camera transform: p_cam = R * p_world + t.
struct RigidTransform {
    Mat3 rotation;
    Vec3 translation;

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_inverse(const Vec3& p) const { return rotation.transposed() * (p - translation); }

    // Camera center in world coordinates.
    Vec3 center() const { return rotation.transposed() * (-translation); }

    static RigidTransform identity() { return {}; }
};

// World frame: +y up. Azimuth theta is measured from +z toward +x, altitude
// phi from the horizon toward +y:
//   direction(theta, phi) = (cos phi sin theta, sin phi, cos phi cos theta)
inline Vec3 direction_from_angles(double theta_deg, double phi_deg) {
    double t = deg2rad(theta_deg), p = deg2rad(phi_deg);
    double cp = std::cos(p);
    return {cp * std::sin(t), std::sin(p), cp * std::cos(t)};
}

// Inverse of direction_from_angles for unit-ish vectors; theta in [0, 360),
// phi in [-90, 90]. At the poles theta is 0 by convention.
inline void angles_from_direction(const Vec3& d, double& theta_deg, double& phi_deg) {
    double n = d.norm();
    double sy = d.y / n;
    sy = std::max(-1.0, std::min(1.0, sy));
    phi_deg = rad2deg(std::asin(sy));
    if (std::abs(d.x) == 0.0 && std::abs(d.z) == 0.0) {
        theta_deg = 0.0;
        return;
    }
    theta_deg = wrap_deg(rad2deg(std::atan2(d.x, d.z)));
}

// Yaw-then-pitch view rotation (no roll): maps the local +z forward axis onto
// direction_from_angles(theta, phi).
inline Mat3 view_rotation(double theta_deg, double phi_deg) {
    return Mat3::rotation_y(deg2rad(theta_deg)) * Mat3::rotation_x(-deg2rad(phi_deg));
}

}  // namespace satground
