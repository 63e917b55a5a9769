#include "gyro/foucault.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"
#include "gyro/rk4.hpp"

namespace gyro {

namespace {

void require_ascending(const std::vector<double>& samples)
{
    if (!std::is_sorted(samples.begin(), samples.end())) {
        throw PreconditionViolation("flow samples must be ascending");
    }
}

/// Ȧ A⁻¹ = P(0) Ṙ P(s) R⁻¹
LinMap foucault_generator(const LinMap& P0, const LinMap& Ps, const FlowDerivative& f)
{
    return P0 * f.R_dot * Ps * inverse(f.R);
}

}  // namespace

ClosedRotatingSource::ClosedRotatingSource(std::shared_ptr<const RotatingObserver> obs, CircularWorldLine w,
                                           double step)
    : obs_(std::move(obs)), w_(std::move(w)), step_(step)
{
    if (!obs_) {
        throw PreconditionViolation("closed flow source needs an observer");
    }
    check_integral_curve(*obs_, w_, w_.period());

    const CriterionDefect defect = profile_criterion(obs_->profile(), w_.k0());
    const double scale = 1.0 + std::pow(w_.beta0(), 3) + w_.alpha0() * w_.beta0() * w_.beta0();
    if (std::abs(defect.alpha) <= 1e-12 * scale && std::abs(defect.beta) <= 1e-12 * scale) {
        const LinMap P0 = spatial_projector(w_.velocity(0.0));
        constant_ = LinMap(-w_.beta0() * P0 * obs_->omega().matrix() * P0);
    }
}

FlowDerivative ClosedRotatingSource::at(double s) const { return orbit_flow_derivative(*obs_, w_, s); }

std::vector<FlowSample> ClosedRotatingSource::sweep(const std::vector<double>& samples, bool propagate) const
{
    require_ascending(samples);
    const LinMap P0 = spatial_projector(w_.velocity(0.0));
    const auto generator = [&](double s) {
        return foucault_generator(P0, spatial_projector(w_.velocity(s)), at(s));
    };

    std::vector<FlowSample> out;
    out.reserve(samples.size());
    LinMap Z = LinMap::Identity();
    double s_prev = 0.0;
    for (const double s : samples) {
        FlowSample fs;
        fs.s = s;
        const FlowDerivative f = at(s);
        fs.R = f.R;
        fs.R_dot = f.R_dot;
        if (propagate) {
            if (constant_) {
                fs.Z = exp_map(*constant_, s);
            } else {
                const auto rhs = [&](double t, const LinMap& y) -> LinMap { return generator(t) * y; };
                Z = ode::rk4_integrate(rhs, s_prev, s, Z, ode::steps_for(s - s_prev, step_));
                fs.Z = Z;
            }
        }
        s_prev = s;
        out.push_back(std::move(fs));
    }
    return out;
}

VariationalSource::VariationalSource(std::shared_ptr<const ObserverField> field, std::shared_ptr<const WorldLine> w,
                                     double step, Rate rate)
    : field_(std::move(field)), w_(std::move(w)), step_(step), rate_(rate)
{
    if (!field_ || !w_) {
        throw PreconditionViolation("variational flow source needs a field and a world line");
    }
    if (!(step_ > 0.0)) {
        throw PreconditionViolation("variational flow source needs a positive step");
    }
}

std::vector<FlowSample> VariationalSource::sweep(const std::vector<double>& samples, bool propagate) const
{
    require_ascending(samples);
    using State = Eigen::Matrix<double, 4, 8>;  // [J | Z]

    const LinMap P0 = spatial_projector(w_->velocity(0.0));
    const auto rhs = [&](double s, const State& y) -> State {
        const LinMap DU = field_->jacobian(w_->eval(s));
        const LinMap J = y.leftCols<4>();
        State dy;
        dy.leftCols<4>() = DU * J;
        if (propagate) {
            // Ȧ A⁻¹ = P(0) Ṙ P(s) R⁻¹ with R = J⁻¹, Ṙ = -R DU
            const LinMap wF = -P0 * inverse(J) * DU * spatial_projector(w_->velocity(s)) * J;
            dy.rightCols<4>() = wF * y.rightCols<4>();
        } else {
            dy.rightCols<4>().setZero();
        }
        return dy;
    };

    State y;
    y.leftCols<4>().setIdentity();
    y.rightCols<4>().setIdentity();
    double s_prev = 0.0;

    std::vector<FlowSample> out;
    out.reserve(samples.size());
    for (const double s : samples) {
        y = ode::rk4_integrate(rhs, s_prev, s, y, ode::steps_for(s - s_prev, step_));
        s_prev = s;

        FlowSample fs;
        fs.s = s;
        if (rate_ == Rate::FlowIdentity) {
            fs.R = inverse(y.leftCols<4>());
            fs.R_dot = -fs.R * field_->jacobian(w_->eval(s));
        } else {
            const FlowDerivative f = flow_derivative_fd(*field_, *w_, s, step_);
            fs.R = f.R;
            fs.R_dot = f.R_dot;
        }
        if (propagate) {
            fs.Z = LinMap(y.rightCols<4>());
        }
        out.push_back(std::move(fs));
    }
    return out;
}

FourVector FoucaultReport::evolve(std::size_t i, const FourVector& z0) const
{
    if (!meaningful) {
        throw NotMeaningful("Foucault precession is not meaningful for this observer");
    }
    const FoucaultSample& smp = samples.at(i);
    if (constant_generator) {
        return exp_map(*constant_generator, smp.s) * z0;
    }
    return *smp.flow.Z * z0;
}

double FoucaultReport::angle_after(std::size_t i, const FourVector& z0) const
{
    const FourVector z = evolve(i, z0);
    const double c = lorentz_dot(z0, z) / lorentz_dot(z0, z0);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

RotationSummary FoucaultReport::rotation(std::size_t i) const
{
    if (!meaningful) {
        throw NotMeaningful("Foucault precession is not meaningful for this observer");
    }
    const FoucaultSample& smp = samples.at(i);
    const LinMap Z = constant_generator ? exp_map(*constant_generator, smp.s) : *smp.flow.Z;
    return summarize_rotation(Z, initial_velocity);
}

std::vector<double> revolution_samples(const CircularWorldLine& w, std::size_t n)
{
    if (n < 2) {
        throw PreconditionViolation("need at least two samples per revolution");
    }
    const double T = w.period();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    out.back() = T;
    return out;
}

FoucaultReport foucault_analyze(const FlowSource& source, const std::vector<double>& samples, double tol)
{
    const WorldLine& w = source.world_line();
    FoucaultReport report;
    report.tolerance = tol;
    report.initial_velocity = w.velocity(0.0);
    report.constant_generator = source.constant_generator();
    report.meaningful = true;

    const std::vector<FlowSample> flows = source.sweep(samples, true);
    const LinMap P0 = spatial_projector(report.initial_velocity);
    for (const FlowSample& f : flows) {
        FoucaultSample smp;
        smp.s = f.s;
        smp.flow = f;
        const AbsoluteVelocity v = w.velocity(f.s);
        const LinMap Ps = spatial_projector(v);
        const LinMap Rinv = inverse(f.R);
        smp.residual = antisymmetry_residual(Ps * Rinv * f.R_dot * Ps, Ps);
        smp.threshold = tol * (1.0 + f.R_dot.norm());
        smp.transport = transport_map(FlowDerivative{f.R, f.R_dot}, w, f.s);
        smp.omega_observer = observer_angular_velocity(source.field(), w.eval(f.s));
        smp.omega_foucault = LinMap(P0 * f.R_dot * Ps * Rinv);

        report.max_residual = std::max(report.max_residual, smp.residual);
        if (!(smp.residual <= smp.threshold)) {
            report.meaningful = false;
        }
        report.samples.push_back(std::move(smp));
    }
    if (!report.meaningful) {
        for (FoucaultSample& smp : report.samples) {
            smp.omega_foucault.reset();
            smp.flow.Z.reset();
        }
        report.constant_generator.reset();
    }
    return report;
}

FoucaultReport foucault_analyze(std::shared_ptr<const ObserverField> field, std::shared_ptr<const WorldLine> w,
                                const std::vector<double>& samples, double tol, double step)
{
    return foucault_analyze(VariationalSource(std::move(field), std::move(w), step), samples, tol);
}

double foucault_vs_spin(const FoucaultReport& report)
{
    if (!report.meaningful) {
        throw NotMeaningful("Foucault precession is not meaningful; no angular velocity to compare");
    }
    double worst = 0.0;
    for (const FoucaultSample& smp : report.samples) {
        const LinMap spin = smp.transport.A * smp.omega_observer.matrix() * smp.transport.A_inv;
        worst = std::max(worst, (*smp.omega_foucault + spin).norm());
    }
    return worst;
}

AntisymMap corotating_generator(const CircularWorldLine& w)
{
    return -w.beta0() * w.omega() + wedge(w.velocity(0.0).vector(), w.acceleration(0.0));
}

TwistAngle gamma_twist_angle(const CircularWorldLine& w, const AntisymMap& gamma, double s1, double step)
{
    if (!(s1 > 0.0)) {
        throw PreconditionViolation("twist angle needs s1 > 0");
    }
    const AbsoluteVelocity v0 = w.velocity(0.0);
    TwistAngle out;
    out.closed = summarize_rotation(exp_map(gamma, s1) * exp_map(corotating_generator(w), s1), v0).angle;

    auto line = std::make_shared<CircularWorldLine>(w);
    auto field = std::make_shared<TwistedComovingObserver>(line, TransportFamily::Corotating, gamma);
    const FoucaultReport report = foucault_analyze(VariationalSource(field, line, step), {s1});
    if (!report.meaningful) {
        throw NotMeaningful("twisted comoving observer reported non-meaningful Foucault precession");
    }
    out.numeric = report.rotation(0).angle;

    if (!(std::abs(out.closed - out.numeric) <= 1e-6)) {
        std::ostringstream msg;
        msg << "twist angle mismatch: closed form " << out.closed << " vs analysis " << out.numeric;
        throw NumericalError(msg.str());
    }
    return out;
}

}  // namespace gyro
