#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <complex>
#include <limits>
#include <numbers>

namespace echosite {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;          // m/s
inline constexpr double kFreeSpaceImpedance = 376.730313668;    // ohm

struct BoundingBox {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void extend(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    bool finite() const { return min.allFinite() && max.allFinite(); }
    Vec3 extent() const { return max - min; }
};

} // namespace echosite
