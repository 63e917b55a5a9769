#pragma once

#include <array>
#include <functional>

#include "gyro/minkowski.hpp"
#include "gyro/worldlines.hpp"

namespace gyro {

struct TransportOptions {
    double step = 1e-3;
    /// Apply the spatial projector of ṙ(s) after every step.
    bool reproject = false;
    /// StepTooLarge is raised when orthogonality or length drift exceeds this.
    double drift_tol = 1e-6;
};

/// A spacelike vector z(s) orthogonal to ṙ(s).
struct GyroscopicVector {
    double s = 0.0;
    FourVector z = FourVector::Zero();
};

/// Integrates the Fermi-Walker equation ż = (ṙ ∧ r̈) z from s0 to s1 with
/// fixed-step RK4. Requires ṙ(s0).z0 = 0 within 1e-9.
GyroscopicVector fermi_walker_transport(const WorldLine& w, const FourVector& z0, double s0, double s1,
                                        const TransportOptions& options = {});
GyroscopicVector fermi_walker_transport(const WorldLine& w, const FourVector& z0, double s0, double s1, double step);

/// The Fermi-Walker propagator Φ(s1, s0) on all of M (Φ' = (ṙ ∧ r̈) Φ).
/// It is a Lorentz map with Φ ṙ(s0) = ṙ(s1).
LinMap fermi_walker_propagator(const WorldLine& w, double s0, double s1, double step);

/// A rotation of E_v together with its angle in [0, π] and unit axis (zero
/// for the identity). The axis orientation follows rest_triad(v).
struct RotationSummary {
    LinMap map = LinMap::Identity();
    double angle = 0.0;
    FourVector axis = FourVector::Zero();
    double determinant = 1.0;
};

/// Summarizes the restriction of L to E_v using the given orthonormal triad.
RotationSummary summarize_rotation(const LinMap& L, const AbsoluteVelocity& v, const std::array<FourVector, 3>& triad);
RotationSummary summarize_rotation(const LinMap& L, const AbsoluteVelocity& v);

/// Rotation of a Fermi-Walker transported triad between two instants with
/// equal velocity (componentwise within 1e-9, else VelocitiesDiffer).
RotationSummary thomas_rotation(const WorldLine& w, double s1, double s2, double step);
RotationSummary thomas_rotation(const WorldLine& w, double s1, double s2, double step,
                                const std::array<FourVector, 3>& triad);

/// Kinematics of the world line relative to a standard inertial frame u.
struct PrecessionState {
    double t = 0.0;  ///< u-time, -u.(r(s) - r(0))
    double s = 0.0;
    FourVector z_u = FourVector::Zero();
    AntisymMap omega_u;
    FourVector v_u = FourVector::Zero();
    FourVector a_u = FourVector::Zero();
    double gamma_u = 1.0;
};

/// Relative velocity, relative acceleration, γ_u and the Thomas precession
/// angular velocity Ω_u = γ²/(1 + γ) v ∧ a at proper time s.
PrecessionState thomas_precession_omega(const AbsoluteVelocity& u, const WorldLine& w, double s);

/// u-time of r(s) measured from r(0).
double u_time(const AbsoluteVelocity& u, const WorldLine& w, double s);

/// Proper time at which r reaches u-time t (Newton on the monotone u_time).
double proper_time_at(const AbsoluteVelocity& u, const WorldLine& w, double t);

using PrecessionObserver = std::function<void(const PrecessionState&)>;

/// Integrates z_u' = Ω_u z_u together with ds/dt = 1/γ_u in u-time from t0
/// to t1 (z0 ∈ E_u). `on_step` sees the initial state and every step.
PrecessionState precession_evolve(const AbsoluteVelocity& u, const WorldLine& w, const FourVector& z0, double t0,
                                  double t1, double step, const PrecessionObserver& on_step = {});

/// ∫ |Ω_u| dt over [t0, t1], integrated alongside s(t) with RK4.
double precession_angle_integral(const AbsoluteVelocity& u, const WorldLine& w, double t0, double t1, double step);

}  // namespace gyro
