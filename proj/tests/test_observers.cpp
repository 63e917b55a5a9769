#include <cmath>
#include <memory>

#include "doctest.h"
#include "gyro/foucault.hpp"
#include "gyro/observers.hpp"
#include "support.hpp"

using namespace gyro;
using namespace gyro::test;

namespace {

RotatingObserver rotating(const std::string& preset, double omega = 0.6, double h = 1.0)
{
    return RotatingObserver::standard(omega, make_profile(preset, h));
}

// Random event inside the cylinder of the given radius about the axis.
Event random_event(double radius)
{
    const double r = uniform(0.05, radius), phi = uniform(0, 6.283), z = uniform(-2, 2), t = uniform(-3, 3);
    return Event(t, r * std::cos(phi), r * std::sin(phi), z);
}

// Second-order central differences of a field, built here rather than taken from the library.
LinMap central_jacobian(const ObserverField& f, const Event& x, double h)
{
    LinMap J;
    for (int j = 0; j < 4; ++j) {
        FourVector e = FourVector::Zero();
        e[j] = h;
        J.col(j) = (f.velocity(x + e).vector() - f.velocity(x - e).vector()) / (2.0 * h);
    }
    return J;
}

LinMap central_flow_jacobian(const RotatingObserver& obs, double t, const Event& x, double h)
{
    LinMap J;
    for (int j = 0; j < 4; ++j) {
        FourVector e = FourVector::Zero();
        e[j] = h;
        J.col(j) = (obs.flow(t, x + e) - obs.flow(t, x - e)) / (2.0 * h);
    }
    return J;
}

}  // namespace

TEST_CASE("rotating field values")
{
    const RotatingObserver obs = rotating("conventional");
    CHECK(max_abs_diff(obs.velocity(Event(3, 0, 0, 1)).vector(), FourVector(1, 0, 0, 0)) < 1e-15);
    const double g = 1.25;
    CHECK(max_abs_diff(obs.velocity(Event(0, 1, 0, 0)).vector(), FourVector(g, 0, g * 0.6, 0)) < 1e-14);
    CHECK(obs.k(Event(0, 0, 1, 5)) == doctest::Approx(0.36));
    CHECK_THROWS_AS(obs.velocity(Event(0, 2, 0, 0)), OutsideDomain);
}

TEST_CASE("rotating field is normalized for every preset")
{
    for (const std::string p : {"conventional", "tt", "sqrt", "h-family"}) {
        CAPTURE(p);
        const RotatingObserver obs = rotating(p, 0.6, 0.7);
        for (int i = 0; i < 100; ++i) {
            const FourVector U = obs.velocity(random_event(1.5));
            CHECK(std::abs(lorentz_dot(U, U) + 1.0) < 1e-12);
            CHECK(U[0] > 0.0);
        }
    }
}

TEST_CASE("rotating field Jacobian matches finite differences")
{
    for (const std::string p : {"conventional", "tt", "sqrt"}) {
        CAPTURE(p);
        const RotatingObserver obs = rotating(p);
        for (int i = 0; i < 20; ++i) {
            const Event x = random_event(1.4);
            CHECK(max_abs_diff(obs.jacobian(x), central_jacobian(obs, x, 1e-5)) < 1e-7);
            CHECK(max_abs_diff(fd_jacobian(obs, x, 1e-4), obs.jacobian(x)) < 1e-7);
        }
    }
    const RotatingObserver obs = rotating("conventional");
    CHECK(max_abs_diff(rotating_field_jacobian(obs, Event(0, 0.3, 0.2, 0)), obs.jacobian(Event(0, 0.3, 0.2, 0))) == 0);
    CHECK(max_abs_diff(rotating_field(obs, Event(0, 0.3, 0.2, 0)).vector(),
                       obs.velocity(Event(0, 0.3, 0.2, 0)).vector()) == 0);
}

TEST_CASE("observer angular velocity")
{
    const InertialObserver inertial(AbsoluteVelocity::from_relative(0.2, 0.3, 0));
    CHECK(observer_angular_velocity(inertial, Event(1, 2, 3, 4)).matrix().cwiseAbs().maxCoeff() == 0.0);

    for (const std::string p : {"conventional", "tt", "sqrt"}) {
        CAPTURE(p);
        const RotatingObserver obs = rotating(p);
        for (int i = 0; i < 20; ++i) {
            const Event x = random_event(1.4);
            const AntisymMap generic = observer_angular_velocity(obs, x);
            CHECK(max_abs_diff(generic.matrix(), rotating_observer_omega_closed(obs, x).matrix()) < 1e-8);
            CHECK((generic * obs.velocity(x).vector()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
    // on the axis the observer spins with Ω itself
    const RotatingObserver conv = rotating("conventional");
    CHECK(max_abs_diff(observer_angular_velocity(conv, Event()).matrix(), conv.omega().matrix()) < 1e-14);
}

TEST_CASE("rotating flow is a one-parameter group along U")
{
    for (const std::string p : {"conventional", "tt"}) {
        CAPTURE(p);
        const RotatingObserver obs = rotating(p);
        const Event x = random_event(1.2);
        const double t1 = 0.7, t2 = -1.9;
        CHECK(max_abs_diff(obs.flow(t1, obs.flow(t2, x)).coords, obs.flow(t1 + t2, x).coords) < 1e-10);
        CHECK(max_abs_diff(obs.flow(0.0, x).coords, x.coords) == 0.0);
        const double h = 1e-5, t = 2.3;
        const FourVector dR = (obs.flow(t + h, x) - obs.flow(t - h, x)) / (2 * h);
        CHECK(max_abs_diff(dR, obs.velocity(obs.flow(t, x)).vector()) < 1e-8);
        CHECK(max_abs_diff(obs.flow_jacobian(t, x), central_flow_jacobian(obs, t, x, 1e-5)) < 1e-7);
        CHECK(max_abs_diff(rotating_flow(obs, t, x).coords, obs.flow(t, x).coords) == 0.0);
    }
}

TEST_CASE("closed flow Jacobian along an integral curve")
{
    for (const std::string p : {"conventional", "tt", "sqrt"}) {
        CAPTURE(p);
        const RotatingObserver obs = rotating(p);
        const CircularWorldLine w = obs.integral_curve(FourVector(0, 1, 0, 0));
        check_integral_curve(obs, w, w.period());
        CHECK(max_abs_diff(flow_jacobian_closed(obs, w, 0.0), LinMap::Identity()) < 1e-14);
        for (double s : {0.5, 2.0, 0.8 * w.period()}) {
            const LinMap R = flow_jacobian_closed(obs, w, s);
            CHECK(max_abs_diff(FourVector(R * w.velocity(s).vector()), w.velocity(0).vector()) < 1e-10);
            CHECK(max_abs_diff(R, flow_jacobian_ode(obs, w, s, 1e-3)) < 1e-7);

            const FlowDerivative fd = flow_derivative_fd(obs, w, s, 1e-3);
            const FlowDerivative cl = flow_derivative_closed(obs, w, s);
            CHECK(max_abs_diff(cl.R_dot, fd.R_dot) < 1e-6);
        }
    }
}

TEST_CASE("integral curve mismatch is detected")
{
    const RotatingObserver tt = rotating("tt");
    const CircularWorldLine conventional_orbit = CircularWorldLine::standard(0.6, 1.0);
    CHECK_THROWS_AS(check_integral_curve(tt, conventional_orbit, 1.0), MismatchedObserver);
    CHECK_THROWS_AS(flow_derivative_closed(tt, conventional_orbit, 1.0), MismatchedObserver);
    CHECK_THROWS_AS(ClosedRotatingSource(std::make_shared<RotatingObserver>(tt), conventional_orbit),
                    MismatchedObserver);
}

TEST_CASE("variational flow for an inertial field is the identity")
{
    const AbsoluteVelocity u = AbsoluteVelocity::from_relative(0.3, 0, 0.1);
    const InertialObserver field(u);
    const InertialWorldLine w(Event(), u);
    CHECK(max_abs_diff(flow_jacobian_ode(field, w, 3.0, 1e-2), LinMap::Identity()) == 0.0);
    CHECK(max_abs_diff(flow_jacobian_ode_steps(field, w, -2.0, 7), LinMap::Identity()) == 0.0);
}

TEST_CASE("transport map identities")
{
    const RotatingObserver obs = rotating("tt");
    const CircularWorldLine w = obs.integral_curve(FourVector(0, 1.1, 0, 0));
    const LinMap P0 = spatial_projector(w.velocity(0));
    for (double s : {0.5, 1.0, 2.0}) {
        const TransportMap A = transport_map(flow_derivative_closed(obs, w, s), w, s);
        const LinMap Ps = spatial_projector(w.velocity(s));
        CHECK(max_abs_diff(LinMap(A.A * A.A_inv), P0) < 1e-10);
        CHECK(max_abs_diff(LinMap(A.A_inv * A.A), Ps) < 1e-10);
        CHECK((A.A * w.velocity(s).vector()).cwiseAbs().maxCoeff() < 1e-10);
        REQUIRE(A.A_dot.has_value());

        const double h = 1e-4;
        const LinMap fd = (transport_map(flow_jacobian_closed(obs, w, s + h), w, s + h).A -
                           transport_map(flow_jacobian_closed(obs, w, s - h), w, s - h).A) /
                          (2 * h);
        CHECK(max_abs_diff(*A.A_dot, fd) < 1e-7);
    }
}

TEST_CASE("spatial metric along the orbit")
{
    const FourVector q = spatial_projector(CircularWorldLine::standard(0.6, 1.0).velocity(0)) * ex();
    auto metric_span = [&](const std::string& preset) {
        const RotatingObserver obs = rotating(preset);
        const CircularWorldLine w = obs.integral_curve(FourVector(0, 1, 0, 0));
        const FourVector qq = spatial_projector(w.velocity(0)) * q;
        double lo = INFINITY, hi = -INFINITY;
        for (double s : revolution_samples(w, 12)) {
            const double g = spatial_metric(transport_map(flow_jacobian_closed(obs, w, s), w, s), qq);
            lo = std::min(lo, g);
            hi = std::max(hi, g);
        }
        return hi - lo;
    };
    CHECK(metric_span("conventional") < 1e-10);
    CHECK(metric_span("tt") > 1e-3);
}

TEST_CASE("comoving observers reproduce the world line")
{
    const auto line = std::make_shared<CircularWorldLine>(CircularWorldLine::standard(0.6, 1.0));
    for (const auto fam : {TransportFamily::FermiWalker, TransportFamily::Boost, TransportFamily::Corotating}) {
        CAPTURE(static_cast<int>(fam));
        const TwistedComovingObserver obs(line, fam);
        for (double s : {0.0, 1.1, 3.7}) {
            CHECK(max_abs_diff(obs.velocity(line->eval(s)).vector(), line->velocity(s).vector()) < 1e-10);
            CHECK(max_abs_diff(comoving_field(obs, line->eval(s)).vector(), line->velocity(s).vector()) < 1e-10);
            const LinMap H = obs.transport(s);
            CHECK(max_abs_diff(FourVector(H * line->velocity(s).vector()), line->velocity(0).vector()) < 1e-9);
            CHECK(lorentz_residual(H) < 1e-9);

            const double h = 1e-4;
            const LinMap dH = (obs.transport(s + h) - obs.transport(s - h)) / (2 * h);
            CHECK(max_abs_diff(obs.generator(s), LinMap(inverse(H) * dH)) < 1e-7);

            const Event x = line->eval(s) + FourVector(0.0, 0.05, -0.04, 0.1);
            CHECK(max_abs_diff(obs.jacobian(x), central_jacobian(obs, x, 1e-5)) < 1e-6);
        }
    }
}

TEST_CASE("comoving spin on the world line")
{
    const auto line = std::make_shared<CircularWorldLine>(CircularWorldLine::standard(0.6, 1.0));
    const TwistedComovingObserver fw(line, TransportFamily::FermiWalker);
    const TwistedComovingObserver bst(line, TransportFamily::Boost);
    const TwistedComovingObserver rot(line, TransportFamily::Corotating);
    for (double s : {0.4, 2.2}) {
        const Event x = line->eval(s);
        const LinMap P = spatial_projector(line->velocity(s));
        CHECK(observer_angular_velocity(fw, x).matrix().cwiseAbs().maxCoeff() < 1e-8);
        const AntisymMap wb = observer_angular_velocity(bst, x);
        CHECK(wb.rate() > 1e-2);
        CHECK(max_abs_diff(wb.matrix(), LinMap(-P * bst.generator(s) * P)) < 1e-8);
        CHECK(max_abs_diff(observer_angular_velocity(rot, x).matrix(), LinMap(-P * rot.generator(s) * P)) < 1e-8);
    }
    CHECK_THROWS_AS(TwistedComovingObserver(line, TransportFamily::Boost, AntisymMap::from(rest_generator({1, 0, 0}))),
                    PreconditionViolation);
    const auto straight = std::make_shared<InertialWorldLine>(Event(), AbsoluteVelocity());
    CHECK_THROWS_AS(TwistedComovingObserver(straight, TransportFamily::Corotating), PreconditionViolation);
}

TEST_CASE("Fermi-Walker comoving flow transports like the family")
{
    const auto line = std::make_shared<CircularWorldLine>(CircularWorldLine::standard(0.6, 1.0));
    const TwistedComovingObserver fw(line, TransportFamily::FermiWalker);
    for (double s : {0.8, 2.5}) {
        const TransportMap A = transport_map(flow_jacobian_ode(fw, *line, s, 1e-3), *line, s);
        const LinMap P = spatial_projector(line->velocity(s));
        CHECK(max_abs_diff(A.A, LinMap(fw.transport(s) * P)) < 1e-6);
    }
}
