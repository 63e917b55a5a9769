#pragma once

// Test-side generators and independent oracles.

#include <cmath>
#include <random>

#include "gyro/minkowski.hpp"

namespace gyro::test {

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline FourVector random_vector(double scale = 1.0)
{
    return FourVector(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
}

/// Normalizes a random future timelike vector with relative speed below vmax.
inline AbsoluteVelocity random_velocity(double vmax = 0.9)
{
    Eigen::Vector3d v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    v *= uniform(0.0, vmax) / std::max(v.norm(), 1e-12);
    return AbsoluteVelocity::from_relative(v[0], v[1], v[2]);
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& a)
{
    Eigen::Matrix3d k;
    k << 0, -a[2], a[1], a[2], 0, -a[0], -a[1], a[0], 0;
    return k;
}

/// Spatial rotation generator in the rest frame: W x = a × x on the space part.
inline LinMap rest_generator(const Eigen::Vector3d& a)
{
    LinMap w = LinMap::Zero();
    w.block<3, 3>(1, 1) = skew(a);
    return w;
}

/// Generator of a boost along n with rapidity rate |n|.
inline LinMap boost_generator(const Eigen::Vector3d& n)
{
    LinMap w = LinMap::Zero();
    w.block<1, 3>(0, 1) = n.transpose();
    w.block<3, 1>(1, 0) = n;
    return w;
}

inline AntisymMap random_antisym(double scale = 1.0)
{
    const Eigen::Vector3d a(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
    const Eigen::Vector3d b(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
    return AntisymMap::from(rest_generator(a) + boost_generator(b));
}

/// Rodrigues formula exp(sW) for a rest-frame spatial generator.
inline LinMap rodrigues(const Eigen::Vector3d& a, double s)
{
    LinMap out = LinMap::Identity();
    const double n = a.norm();
    if (n == 0.0) {
        return out;
    }
    const Eigen::Matrix3d k = skew(a / n);
    const double th = n * s;
    out.block<3, 3>(1, 1) = Eigen::Matrix3d::Identity() + std::sin(th) * k + (1.0 - std::cos(th)) * k * k;
    return out;
}

/// Orthochronous proper Lorentz map: rotation then boost.
inline LinMap random_lorentz()
{
    const Eigen::Vector3d a(uniform(-3, 3), uniform(-3, 3), uniform(-3, 3));
    const AbsoluteVelocity v = random_velocity(0.8);
    return boost(AbsoluteVelocity(), v) * rodrigues(a, 1.0);
}

inline FourVector ex() { return FourVector(0, 1, 0, 0); }
inline FourVector ey() { return FourVector(0, 0, 1, 0); }
inline FourVector ez() { return FourVector(0, 0, 0, 1); }

}  // namespace gyro::test
