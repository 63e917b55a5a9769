#include "gyro/observers.hpp"

#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"
#include "gyro/gyroscope.hpp"
#include "gyro/rk4.hpp"

namespace gyro {

RotatingObserver::RotatingObserver(Event center, AbsoluteVelocity u, AntisymMap omega,
                                   std::shared_ptr<const Profile> profile)
    : center_(center), u_(u), omega_(omega), profile_(std::move(profile))
{
    if (!profile_) {
        throw PreconditionViolation("rotating observer needs a profile");
    }
    if ((omega_ * u_.vector()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + omega_.matrix().norm())) {
        throw PreconditionViolation("rotating observer: Omega u != 0");
    }
    if (!(omega_.rate() > 0.0)) {
        throw PreconditionViolation("rotating observer: |Omega| must be positive");
    }
}

RotatingObserver RotatingObserver::standard(double omega, std::shared_ptr<const Profile> profile)
{
    LinMap w = LinMap::Zero();
    w(2, 1) = omega;
    w(1, 2) = -omega;
    return RotatingObserver(Event(), AbsoluteVelocity(), AntisymMap::from(w), std::move(profile));
}

double RotatingObserver::k(const Event& x) const
{
    const FourVector oy = omega_ * (x - center_);
    return std::max(0.0, lorentz_dot(oy, oy));
}

AbsoluteVelocity RotatingObserver::velocity(const Event& x) const
{
    const FourVector y = x - center_;
    const ProfileValues p = profile_->at(k(x));
    return AbsoluteVelocity::from(p.alpha * u_.vector() + p.beta * (omega_ * y), 1e-9);
}

LinMap RotatingObserver::jacobian(const Event& x) const
{
    const FourVector y = x - center_;
    const ProfileValues p = profile_->at(k(x));
    const FourVector oy = omega_ * y;
    const FourVector o2y = omega_ * oy;
    return -2.0 * tensor(p.dalpha * u_.vector() + p.dbeta * oy, o2y) + p.beta * omega_.matrix();
}

Event RotatingObserver::flow(double t, const Event& x) const
{
    const FourVector y = x - center_;
    const ProfileValues p = profile_->at(k(x));
    return center_ + (t * p.alpha * u_.vector() + exp_map(omega_, t * p.beta) * y);
}

LinMap RotatingObserver::flow_jacobian(double t, const Event& x) const
{
    const FourVector y = x - center_;
    const ProfileValues p = profile_->at(k(x));
    const LinMap e = exp_map(omega_, t * p.beta);
    const FourVector o2y = omega_ * (omega_ * y);
    return -2.0 * t * tensor(p.dalpha * u_.vector() + p.dbeta * (omega_ * FourVector(e * y)), o2y) + e;
}

CircularWorldLine RotatingObserver::integral_curve(const FourVector& d) const
{
    const ProfileValues p = profile_->at(k(center_ + d));
    return CircularWorldLine(center_, u_, omega_, d, p.alpha, p.beta);
}

AbsoluteVelocity rotating_field(const RotatingObserver& obs, const Event& x) { return obs.velocity(x); }

LinMap rotating_field_jacobian(const RotatingObserver& obs, const Event& x) { return obs.jacobian(x); }

Event rotating_flow(const RotatingObserver& obs, double t, const Event& x) { return obs.flow(t, x); }

AntisymMap observer_angular_velocity(const AbsoluteVelocity& U, const LinMap& DU)
{
    const LinMap P = spatial_projector(U);
    return AntisymMap::antisymmetric_part(-0.5 * P * (adjoint(DU) - DU) * P);
}

AntisymMap observer_angular_velocity(const ObserverField& field, const Event& x)
{
    return observer_angular_velocity(field.velocity(x), field.jacobian(x));
}

AntisymMap rotating_observer_omega_closed(const RotatingObserver& obs, const Event& x)
{
    const FourVector y = x - obs.center();
    const ProfileValues p = obs.profile().at(obs.k(x));
    const FourVector oy = obs.omega() * y;
    const FourVector o2y = obs.omega() * oy;
    const FourVector lead = (0.5 * p.alpha * p.beta * p.beta + p.dalpha) * obs.axis_velocity().vector() +
                            (0.5 * p.beta * p.beta * p.beta + p.dbeta) * oy;
    return p.beta * obs.omega() - wedge(lead, o2y);
}

LinMap fd_jacobian(const ObserverField& field, const Event& x, double h)
{
    LinMap J;
    for (int mu = 0; mu < 4; ++mu) {
        FourVector e = FourVector::Zero();
        e[mu] = h;
        const FourVector p2 = field.velocity(x + 2.0 * e).vector();
        const FourVector p1 = field.velocity(x + e).vector();
        const FourVector m1 = field.velocity(x - e).vector();
        const FourVector m2 = field.velocity(x - 2.0 * e).vector();
        J.col(mu) = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
    }
    return J;
}

void check_integral_curve(const RotatingObserver& obs, const CircularWorldLine& w, double s)
{
    for (const double sp : {0.0, 0.5 * s, s}) {
        const double err = max_abs_diff(obs.velocity(w.eval(sp)).vector(), w.velocity(sp).vector());
        if (!(err <= 1e-9)) {
            std::ostringstream msg;
            msg << "world line is not an integral curve of the observer (|U(r(s)) - r'(s)| = " << err
                << " at s = " << sp << ")";
            throw MismatchedObserver(msg.str());
        }
    }
}

LinMap flow_jacobian_closed(const RotatingObserver& obs, const CircularWorldLine& w, double s)
{
    check_integral_curve(obs, w, s);
    return obs.flow_jacobian(-s, w.eval(s));
}

FlowDerivative flow_derivative_closed(const RotatingObserver& obs, const CircularWorldLine& w, double s)
{
    check_integral_curve(obs, w, s);
    return orbit_flow_derivative(obs, w, s);
}

FlowDerivative orbit_flow_derivative(const RotatingObserver& obs, const CircularWorldLine& w, double s)
{
    FlowDerivative out;
    out.R = obs.flow_jacobian(-s, w.eval(s));

    const ProfileValues p = obs.profile().at(w.k0());
    const LinMap& om = obs.omega().matrix();
    const FourVector& d = w.offset();
    const double b0 = w.beta0();
    const LinMap e = exp_map(om, s * b0);
    const FourVector a = p.dalpha * obs.axis_velocity().vector() + p.dbeta * (om * d);
    const FourVector o2d = om * (om * d);
    out.R_dot = 2.0 * tensor(a, e * o2d) + 2.0 * s * b0 * tensor(a, e * (om * o2d)) - b0 * om * exp_map(om, -s * b0);
    return out;
}

LinMap flow_jacobian_ode_steps(const ObserverField& field, const WorldLine& w, double s, std::size_t steps)
{
    const auto rhs = [&](double t, const LinMap& F) -> LinMap { return field.jacobian(w.eval(s + t)) * F; };
    const LinMap F = ode::rk4_integrate(rhs, 0.0, -s, LinMap(LinMap::Identity()), steps);

    const double drift = max_abs_diff(FourVector(F * w.velocity(s).vector()), w.velocity(0.0).vector());
    if (!(drift <= 1e-6)) {
        std::ostringstream msg;
        msg << "flow Jacobian drift |R(s) r'(s) - r'(0)| = " << drift << " at s = " << s;
        throw StepTooLarge(msg.str());
    }
    return F;
}

LinMap flow_jacobian_ode(const ObserverField& field, const WorldLine& w, double s, double step)
{
    return flow_jacobian_ode_steps(field, w, s, ode::steps_for(s, step));
}

FlowDerivative flow_derivative_fd(const ObserverField& field, const WorldLine& w, double s, double step)
{
    const double h = 1e-4 * std::max(1.0, std::abs(s));
    const std::size_t n = ode::steps_for(std::abs(s) + 2.0 * h, step);
    const auto R = [&](double sp) { return flow_jacobian_ode_steps(field, w, sp, n); };

    FlowDerivative out;
    out.R = R(s);
    out.R_dot = (-R(s + 2.0 * h) + 8.0 * R(s + h) - 8.0 * R(s - h) + R(s - 2.0 * h)) / (12.0 * h);
    return out;
}

TransportMap transport_map(const LinMap& R, const WorldLine& w, double s)
{
    TransportMap out;
    out.s = s;
    out.A = spatial_projector(w.velocity(0.0)) * R;
    out.A_inv = spatial_projector(w.velocity(s)) * inverse(R);
    return out;
}

TransportMap transport_map(const FlowDerivative& flow, const WorldLine& w, double s)
{
    TransportMap out = transport_map(flow.R, w, s);
    out.A_dot = spatial_projector(w.velocity(0.0)) * flow.R_dot;
    return out;
}

double spatial_metric(const TransportMap& A, const FourVector& q)
{
    const FourVector v = A.A_inv * q;
    return lorentz_dot(v, v);
}

TwistedComovingObserver::TwistedComovingObserver(std::shared_ptr<const WorldLine> w, TransportFamily family,
                                                 AntisymMap gamma, double fw_step)
    : w_(std::move(w)), family_(family), gamma_(gamma), fw_step_(fw_step)
{
    if (!w_) {
        throw PreconditionViolation("comoving observer needs a world line");
    }
    circle_ = dynamic_cast<const CircularWorldLine*>(w_.get());
    if (family_ == TransportFamily::Corotating && circle_ == nullptr) {
        throw PreconditionViolation("corotating transport needs a circular world line");
    }
    const double norm = gamma_.matrix().norm();
    twisted_ = norm > 0.0;
    const FourVector leak = gamma_ * w_->velocity(0.0).vector();
    if (leak.cwiseAbs().maxCoeff() > 1e-9 * (1.0 + norm)) {
        throw PreconditionViolation("twist generator must annihilate r'(0)");
    }
}

LinMap TwistedComovingObserver::base_transport(double s) const
{
    switch (family_) {
    case TransportFamily::FermiWalker:
        return lorentz_inverse(fermi_walker_propagator(*w_, 0.0, s, fw_step_));
    case TransportFamily::Boost:
        return boost(w_->velocity(s), w_->velocity(0.0));
    case TransportFamily::Corotating:
        return exp_map(circle_->omega(), -s * circle_->beta0());
    }
    return LinMap::Identity();
}

LinMap TwistedComovingObserver::base_generator(double s) const
{
    switch (family_) {
    case TransportFamily::FermiWalker:
        return -wedge(w_->velocity(s).vector(), w_->acceleration(s)).matrix();
    case TransportFamily::Boost: {
        // H = 1 + w⊗w/(1+γ) - 2 u0⊗u, w = u + u0, γ = -u.u0, u = r'(s)
        const AbsoluteVelocity u = w_->velocity(s);
        const AbsoluteVelocity u0 = w_->velocity(0.0);
        const FourVector a = w_->acceleration(s);
        const FourVector sum = u.vector() + u0.vector();
        const double g1 = 1.0 - lorentz_dot(u, u0);
        const LinMap dH = (tensor(a, sum) + tensor(sum, a)) / g1 +
                          tensor(sum, sum) * (lorentz_dot(a, u0) / (g1 * g1)) - 2.0 * tensor(u0, a);
        return lorentz_inverse(boost(u, u0)) * dH;
    }
    case TransportFamily::Corotating:
        return -circle_->beta0() * circle_->omega().matrix();
    }
    return LinMap::Zero();
}

LinMap TwistedComovingObserver::transport(double s) const
{
    const LinMap H = base_transport(s);
    return twisted_ ? LinMap(exp_map(gamma_, s) * H) : H;
}

LinMap TwistedComovingObserver::generator(double s) const
{
    if (!twisted_) {
        return base_generator(s);
    }
    const LinMap H = base_transport(s);
    return lorentz_inverse(H) * gamma_.matrix() * H + base_generator(s);
}

LinMap TwistedComovingObserver::generator_rate(double s) const
{
    if (!twisted_) {
        if (family_ == TransportFamily::Corotating) {
            return LinMap::Zero();
        }
        if (family_ == TransportFamily::FermiWalker) {
            return -wedge(w_->velocity(s).vector(), w_->jerk(s)).matrix();
        }
    }
    const double h = 1e-3 * std::max(1.0, std::abs(s));
    return (-generator(s + 2.0 * h) + 8.0 * generator(s + h) - 8.0 * generator(s - h) + generator(s - 2.0 * h)) /
           (12.0 * h);
}

namespace {

struct ComovingLocal {
    SyncSolveResult sync;
    FourVector offset;
    FourVector rdot;
    LinMap K;
    FourVector V;
};

ComovingLocal comoving_local(const TwistedComovingObserver& obs, const Event& x)
{
    const WorldLine& w = obs.world_line();
    ComovingLocal l;
    l.sync = sync_time(w, x);
    l.offset = x - w.eval(l.sync.s);
    l.rdot = w.velocity(l.sync.s).vector();
    l.K = obs.generator(l.sync.s);
    l.V = l.rdot - l.K * l.offset;
    if (!(lorentz_dot(l.V, l.V) < 0.0)) {
        std::ostringstream msg;
        msg << "comoving field: V is not timelike at s = " << l.sync.s;
        throw NonTimelike(msg.str());
    }
    return l;
}

}  // namespace

AbsoluteVelocity TwistedComovingObserver::velocity(const Event& x) const
{
    return AbsoluteVelocity::normalize(comoving_local(*this, x).V);
}

LinMap TwistedComovingObserver::jacobian(const Event& x) const
{
    const ComovingLocal l = comoving_local(*this, x);
    const double n = std::sqrt(-lorentz_dot(l.V, l.V));
    const AbsoluteVelocity U = AbsoluteVelocity::normalize(l.V);

    FourVector c = w_->acceleration(l.sync.s) + l.K * l.rdot;
    if (l.offset.cwiseAbs().maxCoeff() > 1e-15 * (1.0 + x.coords.cwiseAbs().maxCoeff())) {
        c -= generator_rate(l.sync.s) * l.offset;
    }
    const LinMap DV = tensor(c, l.sync.gradient) - l.K;
    return spatial_projector(U) * DV / n;
}

AbsoluteVelocity comoving_field(const TwistedComovingObserver& obs, const Event& x) { return obs.velocity(x); }

}  // namespace gyro
