#pragma once

#include <cmath>

namespace vwflow {

/// A point or a velocity in the plane.
struct PlaneVec {
    double x1 = 0.0;
    double x2 = 0.0;

    constexpr PlaneVec& operator+=(PlaneVec o) {
        x1 += o.x1;
        x2 += o.x2;
        return *this;
    }
    constexpr PlaneVec& operator-=(PlaneVec o) {
        x1 -= o.x1;
        x2 -= o.x2;
        return *this;
    }
    constexpr PlaneVec& operator*=(double s) {
        x1 *= s;
        x2 *= s;
        return *this;
    }

    friend constexpr bool operator==(PlaneVec, PlaneVec) = default;
};

constexpr PlaneVec operator+(PlaneVec a, PlaneVec b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
constexpr PlaneVec operator-(PlaneVec a, PlaneVec b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
constexpr PlaneVec operator-(PlaneVec a) { return {-a.x1, -a.x2}; }
constexpr PlaneVec operator*(double s, PlaneVec a) { return {s * a.x1, s * a.x2}; }
constexpr PlaneVec operator*(PlaneVec a, double s) { return {s * a.x1, s * a.x2}; }

constexpr double dot(PlaneVec a, PlaneVec b) { return a.x1 * b.x1 + a.x2 * b.x2; }
constexpr double norm_sq(PlaneVec a) { return a.x1 * a.x1 + a.x2 * a.x2; }
inline double norm(PlaneVec a) { return std::hypot(a.x1, a.x2); }

/// Counter-clockwise rotation by a right angle: (x1, x2) -> (-x2, x1).
constexpr PlaneVec perp(PlaneVec a) { return {-a.x2, a.x1}; }

inline bool is_finite(PlaneVec a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

}  // namespace vwflow
