#pragma once

#include <string>
#include <vector>

#include "gyro/minkowski.hpp"

namespace gyro {

/// A twice-differentiable world line parametrized by proper time.
class WorldLine {
public:
    virtual ~WorldLine() = default;

    virtual Event eval(double s) const = 0;
    virtual AbsoluteVelocity velocity(double s) const = 0;
    virtual FourVector acceleration(double s) const = 0;

    /// Third derivative; the default is a 4th-order central difference of
    /// acceleration().
    virtual FourVector jerk(double s) const;

    /// Starting point for the synchronization solve: -(x - r(0)).ṙ(0).
    virtual double sync_guess(const Event& x) const;
};

/// r(s) = o + s u.
class InertialWorldLine final : public WorldLine {
public:
    InertialWorldLine(Event origin, AbsoluteVelocity u) : origin_(origin), u_(u) {}

    Event eval(double s) const override { return origin_ + s * u_.vector(); }
    AbsoluteVelocity velocity(double) const override { return u_; }
    FourVector acceleration(double) const override { return FourVector::Zero(); }
    FourVector jerk(double) const override { return FourVector::Zero(); }

private:
    Event origin_;
    AbsoluteVelocity u_;
};

struct CircularState {
    Event position;
    AbsoluteVelocity velocity;
    FourVector acceleration;
};

/// r(s) = o + s α₀ u + exp(s β₀ Ω) d, the orbit of a uniformly rotating
/// observer through o + d.
class CircularWorldLine final : public WorldLine {
public:
    /// Validates Ω u = 0, antisymmetry, u.d = 0 and α₀² - β₀²|Ωd|² = 1.
    CircularWorldLine(Event center, AbsoluteVelocity axis_velocity, AntisymMap omega, FourVector offset,
                      double alpha0, double beta0);

    /// The standard orbit: center at the origin, u at rest, Ω rotating x
    /// towards y with angular speed omega, d = radius e_x, and β₀ = α₀ =
    /// 1/sqrt(1 - (omega radius)^2) unless given.
    static CircularWorldLine standard(double omega, double radius);
    static CircularWorldLine standard(double omega, double radius, double alpha0, double beta0);

    /// Skips the invariant checks; for exercising validation code only.
    static CircularWorldLine unchecked(Event center, AbsoluteVelocity axis_velocity, AntisymMap omega,
                                       FourVector offset, double alpha0, double beta0);

    CircularState state(double s) const;

    Event eval(double s) const override;
    AbsoluteVelocity velocity(double s) const override;
    FourVector acceleration(double s) const override;
    FourVector jerk(double s) const override;
    double sync_guess(const Event& x) const override;

    const Event& center() const noexcept { return center_; }
    const AbsoluteVelocity& axis_velocity() const noexcept { return u_; }
    const AntisymMap& omega() const noexcept { return omega_; }
    const FourVector& offset() const noexcept { return d_; }
    double alpha0() const noexcept { return alpha0_; }
    double beta0() const noexcept { return beta0_; }
    /// |Ω|
    double angular_speed() const { return omega_.rate(); }
    /// k₀ = |Ωd|², the squared rim speed.
    double k0() const;
    /// Proper-time period 2π/(β₀ ω).
    double period() const;

private:
    struct NoCheck {};
    CircularWorldLine(NoCheck, Event center, AbsoluteVelocity axis_velocity, AntisymMap omega, FourVector offset,
                      double alpha0, double beta0)
        : center_(center), u_(axis_velocity), omega_(omega), d_(offset), alpha0_(alpha0), beta0_(beta0)
    {
    }

    LinMap rotation(double s) const { return exp_map(omega_, s * beta0_); }

    Event center_;
    AbsoluteVelocity u_;
    AntisymMap omega_;
    FourVector d_;
    double alpha0_;
    double beta0_;
};

struct SyncSolveResult {
    double s = 0.0;
    /// ds/dx as a vector: ds = gradient . dx.
    FourVector gradient = FourVector::Zero();
    int iterations = 0;
};

/// Solves (x - r(s)).ṙ(s) = 0 for s near s_guess by Newton iteration.
/// Throws NonConvergence after 50 iterations and DegenerateDenominator when
/// |1 + (x - r(s)).r̈(s)| < 1e-10.
SyncSolveResult sync_time(const WorldLine& w, const Event& x, double s_guess);
SyncSolveResult sync_time(const WorldLine& w, const Event& x);

struct WorldLineReport {
    bool ok = true;
    double max_normalization_error = 0.0;
    double max_orthogonality_error = 0.0;
    double max_fd_velocity_error = 0.0;
    std::vector<double> offending_samples;
    std::vector<std::string> messages;
};

/// Checks ṙ.ṙ = -1, ṙ.r̈ = 0 and central-difference consistency of r and ṙ
/// at the samples. `fd_step` is the difference step; failures are reported.
WorldLineReport check_worldline(const WorldLine& w, const std::vector<double>& samples, double fd_step = 1e-4,
                                double tol = kLorentzTol, double fd_tol = 1e-6);

/// As check_worldline but throws ValidationFailure listing offending samples.
WorldLineReport validate_worldline(const WorldLine& w, const std::vector<double>& samples, double fd_step = 1e-4,
                                   double tol = kLorentzTol, double fd_tol = 1e-6);

/// Max |(r(s+h) - r(s-h))/2h - ṙ(s)| over the samples.
double fd_velocity_error(const WorldLine& w, const std::vector<double>& samples, double h);

}  // namespace gyro
