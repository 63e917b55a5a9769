#include "gyro/worldlines.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gyro {

FourVector WorldLine::jerk(double s) const
{
    const double h = 1e-3 * std::max(1.0, std::abs(s));
    return (-acceleration(s + 2 * h) + 8.0 * acceleration(s + h) - 8.0 * acceleration(s - h) +
            acceleration(s - 2 * h)) /
           (12.0 * h);
}

double WorldLine::sync_guess(const Event& x) const
{
    return -lorentz_dot(x - eval(0.0), velocity(0.0));
}

CircularWorldLine::CircularWorldLine(Event center, AbsoluteVelocity axis_velocity, AntisymMap omega,
                                     FourVector offset, double alpha0, double beta0)
    : center_(center), u_(axis_velocity), omega_(omega), d_(offset), alpha0_(alpha0), beta0_(beta0)
{
    const double scale = 1.0 + omega_.matrix().cwiseAbs().maxCoeff();
    if ((omega_ * u_.vector()).cwiseAbs().maxCoeff() > kStructuralTol * scale) {
        throw PreconditionViolation("circular world line: Omega must annihilate the axis velocity");
    }
    if (std::abs(lorentz_dot(u_, d_)) > kStructuralTol * (1.0 + d_.cwiseAbs().maxCoeff())) {
        throw PreconditionViolation("circular world line: offset must lie in E_u");
    }
    const double norm = alpha0_ * alpha0_ - beta0_ * beta0_ * k0();
    if (std::abs(norm - 1.0) > kStructuralTol * (1.0 + alpha0_ * alpha0_)) {
        std::ostringstream msg;
        msg << "circular world line: alpha0^2 - beta0^2 |Omega d|^2 = " << norm << " != 1";
        throw PreconditionViolation(msg.str());
    }
}

CircularWorldLine CircularWorldLine::standard(double omega, double radius)
{
    const double v = omega * radius;
    if (!(v * v < 1.0)) {
        throw OutsideDomain("standard circular world line: rim speed must be below 1");
    }
    const double g = 1.0 / std::sqrt(1.0 - v * v);
    return standard(omega, radius, g, g);
}

CircularWorldLine CircularWorldLine::standard(double omega, double radius, double alpha0, double beta0)
{
    LinMap w = LinMap::Zero();
    w(2, 1) = omega;
    w(1, 2) = -omega;
    return CircularWorldLine(Event(), AbsoluteVelocity(), AntisymMap::from(w), FourVector(0.0, radius, 0.0, 0.0),
                             alpha0, beta0);
}

CircularWorldLine CircularWorldLine::unchecked(Event center, AbsoluteVelocity axis_velocity, AntisymMap omega,
                                               FourVector offset, double alpha0, double beta0)
{
    return CircularWorldLine(NoCheck{}, center, axis_velocity, omega, offset, alpha0, beta0);
}

double CircularWorldLine::k0() const
{
    const FourVector wd = omega_ * d_;
    return lorentz_dot(wd, wd);
}

double CircularWorldLine::period() const
{
    return 2.0 * std::numbers::pi / (beta0_ * angular_speed());
}

CircularState CircularWorldLine::state(double s) const
{
    const LinMap e = rotation(s);
    const FourVector wd = omega_ * d_;
    const FourVector w2d = omega_ * wd;
    const FourVector vel = alpha0_ * u_.vector() + beta0_ * (e * wd);
    return {center_ + (s * alpha0_ * u_.vector() + e * d_), AbsoluteVelocity::from(vel, 1e-9),
            beta0_ * beta0_ * (e * w2d)};
}

Event CircularWorldLine::eval(double s) const
{
    return center_ + (s * alpha0_ * u_.vector() + rotation(s) * d_);
}

AbsoluteVelocity CircularWorldLine::velocity(double s) const
{
    const FourVector vel = alpha0_ * u_.vector() + beta0_ * (rotation(s) * (omega_ * d_));
    return AbsoluteVelocity::from(vel, 1e-9);
}

FourVector CircularWorldLine::acceleration(double s) const
{
    return beta0_ * beta0_ * (rotation(s) * (omega_ * (omega_ * d_)));
}

FourVector CircularWorldLine::jerk(double s) const
{
    return beta0_ * beta0_ * beta0_ * (rotation(s) * (omega_ * (omega_ * (omega_ * d_))));
}

double CircularWorldLine::sync_guess(const Event& x) const
{
    return -lorentz_dot(x - center_, u_) / alpha0_;
}

SyncSolveResult sync_time(const WorldLine& w, const Event& x, double s_guess)
{
    constexpr int kMaxIterations = 50;
    double s = s_guess;
    for (int it = 1; it <= kMaxIterations; ++it) {
        const Event r = w.eval(s);
        const FourVector rd = w.velocity(s);
        const FourVector rdd = w.acceleration(s);
        const FourVector offset = x - r;
        const double f = lorentz_dot(offset, rd);
        // f'(s) = -ṙ.ṙ + (x - r).r̈ = 1 + (x - r).r̈
        const double denom = 1.0 + lorentz_dot(offset, rdd);
        if (std::abs(denom) < 1e-10) {
            throw DegenerateDenominator("synchronization: 1 + (x - r(s)).r̈(s) vanishes");
        }
        const double scale = 1.0 + x.coords.cwiseAbs().maxCoeff() + r.coords.cwiseAbs().maxCoeff();
        const double step = f / denom;
        if (std::abs(f) <= 1e-12 * scale || std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) {
            SyncSolveResult out;
            out.s = s;
            out.gradient = -rd / denom;
            out.iterations = it;
            return out;
        }
        s -= step;
        if (!std::isfinite(s)) {
            break;
        }
    }
    throw NonConvergence("synchronization: Newton iteration did not converge");
}

SyncSolveResult sync_time(const WorldLine& w, const Event& x)
{
    return sync_time(w, x, w.sync_guess(x));
}

double fd_velocity_error(const WorldLine& w, const std::vector<double>& samples, double h)
{
    double worst = 0.0;
    for (double s : samples) {
        const FourVector fd = (w.eval(s + h) - w.eval(s - h)) / (2.0 * h);
        worst = std::max(worst, max_abs_diff(fd, w.velocity(s)));
    }
    return worst;
}

WorldLineReport check_worldline(const WorldLine& w, const std::vector<double>& samples, double fd_step, double tol,
                                double fd_tol)
{
    WorldLineReport report;
    for (double s : samples) {
        bool bad = false;
        FourVector rd;
        try {
            rd = w.velocity(s);
        } catch (const PreconditionViolation& e) {
            report.ok = false;
            report.offending_samples.push_back(s);
            report.messages.push_back("s = " + std::to_string(s) + ": normalization failure (" + e.what() + ")");
            report.max_normalization_error = INFINITY;
            continue;
        }
        const FourVector rdd = w.acceleration(s);
        const double norm_err = std::abs(lorentz_dot(rd, rd) + 1.0);
        const double orth_err = std::abs(lorentz_dot(rd, rdd));
        const FourVector fd_v = (w.eval(s + fd_step) - w.eval(s - fd_step)) / (2.0 * fd_step);
        const FourVector fd_a =
            (w.velocity(s + fd_step).vector() - w.velocity(s - fd_step).vector()) / (2.0 * fd_step);
        const double fd_err = std::max(max_abs_diff(fd_v, rd), max_abs_diff(fd_a, rdd));
        report.max_normalization_error = std::max(report.max_normalization_error, norm_err);
        report.max_orthogonality_error = std::max(report.max_orthogonality_error, orth_err);
        report.max_fd_velocity_error = std::max(report.max_fd_velocity_error, fd_err);
        std::ostringstream msg;
        msg << "s = " << s << ":";
        if (norm_err > tol) {
            msg << " normalization error " << norm_err;
            bad = true;
        }
        if (orth_err > tol) {
            msg << " orthogonality error " << orth_err;
            bad = true;
        }
        if (fd_err > fd_tol) {
            msg << " finite-difference mismatch " << fd_err;
            bad = true;
        }
        if (bad) {
            report.ok = false;
            report.offending_samples.push_back(s);
            report.messages.push_back(msg.str());
        }
    }
    return report;
}

WorldLineReport validate_worldline(const WorldLine& w, const std::vector<double>& samples, double fd_step,
                                   double tol, double fd_tol)
{
    WorldLineReport report = check_worldline(w, samples, fd_step, tol, fd_tol);
    if (!report.ok) {
        std::ostringstream msg;
        msg << "world line validation failed at " << report.offending_samples.size() << " sample(s):";
        for (const auto& m : report.messages) {
            msg << "\n  " << m;
        }
        throw ValidationFailure(msg.str());
    }
    return report;
}

}  // namespace gyro
