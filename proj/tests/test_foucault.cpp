#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "gyro/foucault.hpp"
#include "support.hpp"

using namespace gyro;
using namespace gyro::test;

namespace {

std::shared_ptr<const RotatingObserver> rotating(const std::string& preset, double omega = 0.6, double h = 1.0)
{
    return std::make_shared<RotatingObserver>(RotatingObserver::standard(omega, make_profile(preset, h)));
}

FoucaultReport closed_report(const std::shared_ptr<const RotatingObserver>& obs, double radius, std::size_t n = 16)
{
    const CircularWorldLine w = obs->integral_curve(FourVector(0, radius, 0, 0));
    return foucault_analyze(ClosedRotatingSource(obs, w), revolution_samples(w, n));
}

// Rotation angle θ folded into [0, π].
double folded_angle(double theta)
{
    const double m = std::fmod(std::abs(theta), 2 * std::numbers::pi);
    return std::min(m, 2 * std::numbers::pi - m);
}

}  // namespace

TEST_CASE("revolution samples")
{
    const CircularWorldLine w = CircularWorldLine::standard(0.6, 1.0);
    const auto s = revolution_samples(w, 5);
    REQUIRE(s.size() == 5);
    CHECK(s.front() == 0.0);
    CHECK(s.back() == w.period());
    CHECK_THROWS_AS(revolution_samples(w, 1), PreconditionViolation);
}

TEST_CASE("corotating generator rate")
{
    // a gyroscope seen from the corotating frame turns at γ²ω per unit proper time
    for (double v : {0.1, 0.6, 0.9}) {
        const CircularWorldLine w = CircularWorldLine::standard(0.5, v / 0.5);
        const double g2 = 1.0 / (1.0 - v * v);
        CHECK(corotating_generator(w).rate() == doctest::Approx(g2 * 0.5).epsilon(1e-12));
        CHECK((corotating_generator(w) * w.velocity(0).vector()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("conventional observer has the corotating Foucault generator")
{
    const auto obs = rotating("conventional");
    const FoucaultReport rep = closed_report(obs, 1.0);
    REQUIRE(rep.meaningful);
    REQUIRE(rep.constant_generator.has_value());
    const CircularWorldLine w = obs->integral_curve(FourVector(0, 1, 0, 0));
    const LinMap P0 = spatial_projector(w.velocity(0));
    const LinMap expected = P0 * corotating_generator(w).matrix() * P0;
    for (const auto& smp : rep.samples) {
        REQUIRE(smp.omega_foucault.has_value());
        CHECK(max_abs_diff(*smp.omega_foucault, expected) < 1e-10);
        CHECK(smp.residual <= smp.threshold);
    }
    CHECK(max_abs_diff(*rep.constant_generator, expected) < 1e-12);
    CHECK(foucault_vs_spin(rep) < 1e-10);
}

TEST_CASE("the same verdict along the generic route")
{
    const auto obs = rotating("conventional");
    const auto w = std::make_shared<CircularWorldLine>(obs->integral_curve(FourVector(0, 1, 0, 0)));
    const FoucaultReport generic = foucault_analyze(obs, w, revolution_samples(*w, 9));
    CHECK(generic.meaningful);
    CHECK(generic.max_residual < 1e-10);
    CHECK(foucault_vs_spin(generic) < 1e-8);
    const FoucaultReport closed = closed_report(obs, 1.0, 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(max_abs_diff(generic.evolve(i, ex()), closed.evolve(i, ex())) < 1e-8);
    }

    const auto tt = rotating("tt");
    const auto wt = std::make_shared<CircularWorldLine>(tt->integral_curve(FourVector(0, 1, 0, 0)));
    CHECK_FALSE(foucault_analyze(tt, wt, revolution_samples(*wt, 9)).meaningful);
}

TEST_CASE("non-Killing profiles are not meaningful")
{
    for (const std::string p : {"tt", "sqrt"}) {
        CAPTURE(p);
        const FoucaultReport rep = closed_report(rotating(p), 1.0);
        CHECK_FALSE(rep.meaningful);
        CHECK(rep.max_residual > 1e-3);
        CHECK_FALSE(rep.samples.back().omega_foucault.has_value());
        CHECK_THROWS_AS(rep.evolve(3, ex()), NotMeaningful);
        CHECK_THROWS_AS(rep.angle_after(3, ex()), NotMeaningful);
        CHECK_THROWS_AS(rep.rotation(3), NotMeaningful);
        CHECK_THROWS_AS(foucault_vs_spin(rep), NotMeaningful);
    }
    const auto ca = std::make_shared<RotatingObserver>(
        RotatingObserver::standard(0.6, std::make_shared<ConstAlphaProfile>(1.25)));
    CHECK_FALSE(closed_report(ca, 1.0).meaningful);
}

TEST_CASE("meaningfulness follows the profile criterion")
{
    for (int i = 0; i < 20; ++i) {
        const double omega = uniform(0.2, 1.0);
        const double d = uniform(0.1, 0.9) / omega;
        const double h = uniform(0.3, 1.0);
        const auto hf = rotating("h-family", omega, h);
        const auto tt = rotating("tt", omega);
        const double k = omega * omega * d * d;
        const CriterionDefect dh = profile_criterion(hf->profile(), k);
        const CriterionDefect dt = profile_criterion(tt->profile(), k);
        CHECK(std::max(std::abs(dh.alpha), std::abs(dh.beta)) < 1e-12);
        CHECK(std::max(std::abs(dt.alpha), std::abs(dt.beta)) > 1e-6);
        CHECK(closed_report(hf, d, 6).meaningful);
        CHECK_FALSE(closed_report(tt, d, 6).meaningful);
    }
}

TEST_CASE("on the axis the Foucault frame turns against the rotation")
{
    const auto obs = rotating("conventional");
    const CircularWorldLine axis = obs->integral_curve(FourVector::Zero());
    const std::vector<double> samples{0.0, 1.0, 2.0, 4.0};
    const FoucaultReport rep = foucault_analyze(ClosedRotatingSource(obs, axis), samples);
    REQUIRE(rep.meaningful);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK(max_abs_diff(*rep.samples[i].omega_foucault, LinMap(-obs->omega().matrix())) < 1e-12);
        CHECK(rep.angle_after(i, ex()) == doctest::Approx(0.6 * samples[i]).epsilon(1e-10));
        CHECK(max_abs_diff(rep.evolve(i, ez()), ez()) < 1e-12);
    }
    // -Ω turns e_x towards -e_y
    CHECK(rep.evolve(1, ex())[2] == doctest::Approx(-std::sin(0.6)));
}

TEST_CASE("Foucault evolution preserves lengths")
{
    const auto obs = rotating("h-family", 0.7, 0.8);
    const FoucaultReport rep = closed_report(obs, 1.1, 12);
    REQUIRE(rep.meaningful);
    const double rate = corotating_generator(obs->integral_curve(FourVector(0, 1.1, 0, 0))).rate();
    const FourVector z0 = spatial_projector(rep.initial_velocity) * FourVector(0.2, 0.5, -1.0, 0.3);
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        const FourVector z = rep.evolve(i, z0);
        CHECK(lorentz_dot(z, z) == doctest::Approx(lorentz_dot(z0, z0)).epsilon(1e-12));
        CHECK(std::abs(lorentz_dot(z, rep.initial_velocity)) < 1e-12);
        CHECK(rep.rotation(i).angle == doctest::Approx(folded_angle(rate * rep.samples[i].s)).epsilon(1e-9));
    }
}

TEST_CASE("comoving families as flows")
{
    const auto line = std::make_shared<CircularWorldLine>(CircularWorldLine::standard(0.6, 1.0));
    const auto samples = revolution_samples(*line, 7);
    for (const auto fam : {TransportFamily::FermiWalker, TransportFamily::Boost, TransportFamily::Corotating}) {
        CAPTURE(static_cast<int>(fam));
        const auto field = std::make_shared<TwistedComovingObserver>(line, fam);
        const FoucaultReport rep = foucault_analyze(field, line, samples);
        REQUIRE(rep.meaningful);
        CHECK(foucault_vs_spin(rep) < 1e-6);
        // the Foucault frame is the family itself: z₀(s) = H(s) z(s) with FW z(s)
        const FourVector z0 = rest_triad(line->velocity(0))[0];
        for (std::size_t i = 0; i < samples.size(); i += 3) {
            const FourVector z = fermi_walker_transport(*line, z0, 0.0, samples[i], 1e-3).z;
            CHECK(max_abs_diff(rep.evolve(i, z0), FourVector(field->transport(samples[i]) * z)) < 1e-6);
        }
    }
}

TEST_CASE("rate routes agree for a non-Killing field")
{
    const auto obs = rotating("tt");
    const auto w = std::make_shared<CircularWorldLine>(obs->integral_curve(FourVector(0, 1, 0, 0)));
    const std::vector<double> samples{0.0, 0.9, 2.4};
    const auto a = VariationalSource(obs, w, 1e-3, VariationalSource::Rate::FlowIdentity).sweep(samples, false);
    const auto b = VariationalSource(obs, w, 1e-3, VariationalSource::Rate::FiniteDifference).sweep(samples, false);
    const ClosedRotatingSource closed(obs, *w);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const FlowDerivative c = closed.at(samples[i]);
        CHECK(max_abs_diff(a[i].R, c.R) < 1e-8);
        CHECK(max_abs_diff(b[i].R, c.R) < 1e-8);
        CHECK(max_abs_diff(a[i].R_dot, c.R_dot) < 1e-8);
        CHECK(max_abs_diff(b[i].R_dot, c.R_dot) < 1e-6);
    }
}

TEST_CASE("twisted corotating frames")
{
    const CircularWorldLine w = CircularWorldLine::standard(0.6, 1.0);
    const double s1 = 2.0;
    const TwistAngle plain = gamma_twist_angle(w, AntisymMap(), s1);
    CHECK(plain.closed == doctest::Approx(corotating_generator(w).rate() * s1).epsilon(1e-10));
    CHECK(std::abs(plain.closed - plain.numeric) < 1e-6);

    const auto triad = rest_triad(w.velocity(0));
    const TwistAngle twisted = gamma_twist_angle(w, rotation_generator(w.velocity(0), 0.3 * triad[0]), s1);
    CHECK(std::abs(twisted.closed - twisted.numeric) < 1e-6);
    CHECK(std::abs(twisted.closed - plain.closed) > 1e-2);

    // a twist of -Ω_r commutes with Ω_r and undoes it
    const TwistAngle cancel = gamma_twist_angle(w, -corotating_generator(w), s1);
    CHECK(std::abs(cancel.closed) < 1e-7);
    CHECK(std::abs(cancel.numeric) < 1e-6);

    CHECK_THROWS_AS(gamma_twist_angle(w, AntisymMap(), 0.0), PreconditionViolation);
}
