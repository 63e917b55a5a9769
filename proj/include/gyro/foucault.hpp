#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gyro/gyroscope.hpp"
#include "gyro/observers.hpp"

namespace gyro {

/// R(s), Ṙ(s) and optionally the z₀ propagator Z(s) at one sample.
struct FlowSample {
    double s = 0.0;
    LinMap R = LinMap::Identity();
    LinMap R_dot = LinMap::Zero();
    std::optional<LinMap> Z;
};

/// Supplies the flow Jacobian of an observer along one of its integral curves.
class FlowSource {
public:
    virtual ~FlowSource() = default;

    virtual const ObserverField& field() const = 0;
    virtual const WorldLine& world_line() const = 0;

    /// Samples must be ascending. With `propagate`, also integrates
    /// ż₀ = Ȧ A⁻¹ z₀ from s = 0 as a 4x4 propagator.
    virtual std::vector<FlowSample> sweep(const std::vector<double>& samples, bool propagate) const = 0;

    /// Ȧ A⁻¹ when it is known to be independent of s.
    virtual std::optional<LinMap> constant_generator() const { return std::nullopt; }
};

/// Closed forms for a rotating observer on one of its circular orbits.
class ClosedRotatingSource final : public FlowSource {
public:
    /// Throws MismatchedObserver when w is not an integral curve of obs.
    ClosedRotatingSource(std::shared_ptr<const RotatingObserver> obs, CircularWorldLine w, double step = 1e-3);

    const ObserverField& field() const override { return *obs_; }
    const WorldLine& world_line() const override { return w_; }
    std::vector<FlowSample> sweep(const std::vector<double>& samples, bool propagate) const override;
    /// -β₀ P(0) Ω P(0) when the profile satisfies 2α' = αβ², 2β' = β³ at k₀.
    std::optional<LinMap> constant_generator() const override { return constant_; }

    FlowDerivative at(double s) const;

private:
    std::shared_ptr<const RotatingObserver> obs_;
    CircularWorldLine w_;
    double step_;
    std::optional<LinMap> constant_;
};

/// Generic route: a forward variational pass J' = DU(r(s)) J, J(0) = 1, gives
/// R(s) = J(s)⁻¹ and Ṙ(s) = -R(s) DU(r(s)); `FiniteDifference` instead uses
/// backward ODE solves and a central difference in s.
class VariationalSource final : public FlowSource {
public:
    enum class Rate { FlowIdentity, FiniteDifference };

    VariationalSource(std::shared_ptr<const ObserverField> field, std::shared_ptr<const WorldLine> w,
                      double step = 1e-3, Rate rate = Rate::FlowIdentity);

    const ObserverField& field() const override { return *field_; }
    const WorldLine& world_line() const override { return *w_; }
    std::vector<FlowSample> sweep(const std::vector<double>& samples, bool propagate) const override;

private:
    std::shared_ptr<const ObserverField> field_;
    std::shared_ptr<const WorldLine> w_;
    double step_;
    Rate rate_;
};

struct FoucaultSample {
    double s = 0.0;
    /// antisymmetry residual of P(s) R⁻¹ Ṙ P(s) on E_{ṙ(s)}
    double residual = 0.0;
    /// tol (1 + |Ṙ|)
    double threshold = 0.0;
    FlowSample flow;
    TransportMap transport;
    /// Ω_U(r(s)), acting on E_{ṙ(s)}
    AntisymMap omega_observer;
    /// Ȧ A⁻¹ on E_{ṙ(0)}, only when meaningful
    std::optional<LinMap> omega_foucault;
};

struct FoucaultReport {
    bool meaningful = false;
    double max_residual = 0.0;
    double tolerance = 1e-8;
    AbsoluteVelocity initial_velocity;
    std::vector<FoucaultSample> samples;
    std::optional<LinMap> constant_generator;

    /// z₀(s_i) for z₀(0) = z0; throws NotMeaningful.
    FourVector evolve(std::size_t i, const FourVector& z0) const;
    /// arccos(z₀(0).z₀(s_i)/|z₀(0)|²) in [0, π]; throws NotMeaningful.
    double angle_after(std::size_t i, const FourVector& z0) const;
    /// Rotation z₀(0) ↦ z₀(s_i) of E_{ṙ(0)}, angle in [0, π]; throws NotMeaningful.
    RotationSummary rotation(std::size_t i) const;
};

/// `n` uniform samples over [0, period], endpoints included.
std::vector<double> revolution_samples(const CircularWorldLine& w, std::size_t n = 64);

/// Meaningful iff every residual ≤ tol (1 + |Ṙ(s)|).
FoucaultReport foucault_analyze(const FlowSource& source, const std::vector<double>& samples, double tol = 1e-8);
FoucaultReport foucault_analyze(std::shared_ptr<const ObserverField> field, std::shared_ptr<const WorldLine> w,
                                const std::vector<double>& samples, double tol = 1e-8, double step = 1e-3);

/// max over samples of |ω_F(s) + A(s) Ω_U(r(s)) A(s)⁻¹| (Frobenius); throws
/// NotMeaningful unless the report is meaningful.
double foucault_vs_spin(const FoucaultReport& report);

struct TwistAngle {
    double closed = 0.0;   ///< rotation angle of exp(s₁Γ) exp(s₁Ω_r) on E_{ṙ(0)}
    double numeric = 0.0;  ///< same angle from the analysis of the comoving field
};

/// Ω_r = -β₀Ω + ṙ(0) ∧ r̈(0), the Foucault generator of the corotating frame.
AntisymMap corotating_generator(const CircularWorldLine& w);

/// Foucault angle after s1 for H(s) = exp(sΓ) exp(-sβ₀Ω), computed twice.
/// Throws NumericalError when the two disagree by more than 1e-6.
TwistAngle gamma_twist_angle(const CircularWorldLine& w, const AntisymMap& gamma, double s1, double step = 1e-3);

}  // namespace gyro
