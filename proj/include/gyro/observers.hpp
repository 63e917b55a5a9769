#pragma once

#include <memory>
#include <optional>

#include "gyro/minkowski.hpp"
#include "gyro/profiles.hpp"
#include "gyro/worldlines.hpp"

namespace gyro {

/// A smooth absolute-velocity field U(x) with its Jacobian DU(x).
class ObserverField {
public:
    virtual ~ObserverField() = default;

    virtual AbsoluteVelocity velocity(const Event& x) const = 0;
    virtual LinMap jacobian(const Event& x) const = 0;
};

/// The constant field u.
class InertialObserver final : public ObserverField {
public:
    explicit InertialObserver(AbsoluteVelocity u) : u_(u) {}

    AbsoluteVelocity velocity(const Event&) const override { return u_; }
    LinMap jacobian(const Event&) const override { return LinMap::Zero(); }

private:
    AbsoluteVelocity u_;
};

/// U(x) = α(k) u + β(k) Ω(x - o) with k = |Ω(x - o)|².
class RotatingObserver final : public ObserverField {
public:
    RotatingObserver(Event center, AbsoluteVelocity u, AntisymMap omega, std::shared_ptr<const Profile> profile);

    /// Center at the origin, u at rest, Ω rotating e_x towards e_y.
    static RotatingObserver standard(double omega, std::shared_ptr<const Profile> profile);

    double k(const Event& x) const;

    AbsoluteVelocity velocity(const Event& x) const override;
    LinMap jacobian(const Event& x) const override;

    /// R(t, x) = o + t α(k) u + exp(t β(k) Ω)(x - o).
    Event flow(double t, const Event& x) const;
    /// ∂R(t, x)/∂x
    LinMap flow_jacobian(double t, const Event& x) const;

    /// The space point through o + d (d ∈ E_u) as a proper-time world line.
    CircularWorldLine integral_curve(const FourVector& d) const;

    const Event& center() const noexcept { return center_; }
    const AbsoluteVelocity& axis_velocity() const noexcept { return u_; }
    const AntisymMap& omega() const noexcept { return omega_; }
    const Profile& profile() const noexcept { return *profile_; }
    std::shared_ptr<const Profile> profile_ptr() const noexcept { return profile_; }

private:
    Event center_;
    AbsoluteVelocity u_;
    AntisymMap omega_;
    std::shared_ptr<const Profile> profile_;
};

AbsoluteVelocity rotating_field(const RotatingObserver& obs, const Event& x);
LinMap rotating_field_jacobian(const RotatingObserver& obs, const Event& x);
Event rotating_flow(const RotatingObserver& obs, double t, const Event& x);

/// Ω_U = -½ (1 + U⊗U)(DU* - DU)(1 + U⊗U) from a velocity and its Jacobian.
AntisymMap observer_angular_velocity(const AbsoluteVelocity& U, const LinMap& DU);
AntisymMap observer_angular_velocity(const ObserverField& field, const Event& x);

/// Closed form βΩ - ((αβ²/2 + α') u + (β³/2 + β') Ω(x - o)) ∧ Ω²(x - o).
AntisymMap rotating_observer_omega_closed(const RotatingObserver& obs, const Event& x);

/// Fourth-order central-difference Jacobian of a field.
LinMap fd_jacobian(const ObserverField& field, const Event& x, double h = 1e-3);

/// R(s) and its proper-time derivative.
struct FlowDerivative {
    LinMap R = LinMap::Identity();
    LinMap R_dot = LinMap::Zero();
};

/// Throws MismatchedObserver unless obs.velocity(w(s')) = ẇ(s') (1e-9) at s' ∈ {0, s/2, s}.
void check_integral_curve(const RotatingObserver& obs, const CircularWorldLine& w, double s);

/// R(s) = ∂R(-s, x)/∂x at x = r(s) in closed form.
LinMap flow_jacobian_closed(const RotatingObserver& obs, const CircularWorldLine& w, double s);
/// R(s) and the analytic Ṙ(s).
FlowDerivative flow_derivative_closed(const RotatingObserver& obs, const CircularWorldLine& w, double s);
/// As flow_derivative_closed without the integral-curve check.
FlowDerivative orbit_flow_derivative(const RotatingObserver& obs, const CircularWorldLine& w, double s);

/// R(s) from the variational equation F' = DU(r(s + t)) F, F(0) = 1,
/// integrated from t = 0 to t = -s (`steps` equal steps, or sized by `step`).
LinMap flow_jacobian_ode(const ObserverField& field, const WorldLine& w, double s, double step);
LinMap flow_jacobian_ode_steps(const ObserverField& field, const WorldLine& w, double s, std::size_t steps);

/// R(s) by the ODE and Ṙ(s) by a 4th-order central difference in s
/// (h = 1e-4 max(1, |s|), same step count at every stencil point).
FlowDerivative flow_derivative_fd(const ObserverField& field, const WorldLine& w, double s, double step);

/// A(s) = P(0) R(s): E_{ṙ(s)} → E_{ṙ(0)}, with A(s)⁻¹ = P(s) R(s)⁻¹ and, when
/// Ṙ is known, Ȧ(s) = P(0) Ṙ(s).
struct TransportMap {
    double s = 0.0;
    LinMap A = LinMap::Identity();
    LinMap A_inv = LinMap::Identity();
    std::optional<LinMap> A_dot;
};

TransportMap transport_map(const LinMap& R, const WorldLine& w, double s);
TransportMap transport_map(const FlowDerivative& flow, const WorldLine& w, double s);

/// γ_s(q, q) = |A(s)⁻¹ q|² for q ∈ E_{ṙ(0)}.
double spatial_metric(const TransportMap& A, const FourVector& q);

/// Transport families s ↦ H(s) with H(s) ṙ(s) = ṙ(0).
enum class TransportFamily {
    FermiWalker,  ///< Fermi-Walker transport from s to 0
    Boost,        ///< pure boost from ṙ(s) to ṙ(0)
    Corotating,   ///< exp(-s β₀ Ω), circular world lines only
};

/// U = V/|V| with V(x) = ṙ(s(x)) - H⁻¹Ḣ (x - r(s(x))), H_Γ(s) = exp(sΓ) H(s).
class TwistedComovingObserver final : public ObserverField {
public:
    /// Requires Γ ṙ(0) = 0. `fw_step` is the RK4 step for the Fermi-Walker family.
    TwistedComovingObserver(std::shared_ptr<const WorldLine> w, TransportFamily family, AntisymMap gamma = {},
                            double fw_step = 1e-3);

    AbsoluteVelocity velocity(const Event& x) const override;
    LinMap jacobian(const Event& x) const override;

    /// H_Γ(s)
    LinMap transport(double s) const;
    /// H_Γ(s)⁻¹ Ḣ_Γ(s), Lorentz-antisymmetric.
    LinMap generator(double s) const;
    /// d/ds of generator(s), by central differences.
    LinMap generator_rate(double s) const;

    const WorldLine& world_line() const noexcept { return *w_; }
    std::shared_ptr<const WorldLine> world_line_ptr() const noexcept { return w_; }
    TransportFamily family() const noexcept { return family_; }
    const AntisymMap& twist() const noexcept { return gamma_; }

private:
    LinMap base_transport(double s) const;
    LinMap base_generator(double s) const;

    std::shared_ptr<const WorldLine> w_;
    const CircularWorldLine* circle_ = nullptr;
    TransportFamily family_;
    AntisymMap gamma_;
    bool twisted_ = false;
    double fw_step_;
};

AbsoluteVelocity comoving_field(const TwistedComovingObserver& obs, const Event& x);

}  // namespace gyro
