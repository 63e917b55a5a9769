#include "gyro/gyroscope.hpp"

#include <cmath>
#include <sstream>

#include "gyro/rk4.hpp"

namespace gyro {

namespace {

AntisymMap fermi_walker_generator(const WorldLine& w, double s)
{
    return wedge(w.velocity(s), w.acceleration(s));
}

}  // namespace

GyroscopicVector fermi_walker_transport(const WorldLine& w, const FourVector& z0, double s0, double s1,
                                        const TransportOptions& options)
{
    const AbsoluteVelocity v0 = w.velocity(s0);
    const double scale = 1.0 + z0.cwiseAbs().maxCoeff();
    if (std::abs(lorentz_dot(v0, z0)) > 1e-9 * scale) {
        throw PreconditionViolation("Fermi-Walker transport: z0 must be orthogonal to the velocity");
    }
    const double len0 = lorentz_dot(z0, z0);
    const auto rhs = [&w](double s, const FourVector& z) -> FourVector { return fermi_walker_generator(w, s) * z; };
    const std::size_t n = ode::steps_for(s1 - s0, options.step);
    FourVector z = ode::rk4_integrate(rhs, s0, s1, z0, n, [&](double s, FourVector& y) {
        if (options.reproject) {
            y = spatial_projector(w.velocity(s)) * y;
        }
    });
    const double orth = std::abs(lorentz_dot(w.velocity(s1), z));
    const double drift = std::abs(lorentz_dot(z, z) - len0);
    if (orth > options.drift_tol * scale || drift > options.drift_tol * (1.0 + std::abs(len0))) {
        std::ostringstream msg;
        msg << "Fermi-Walker transport drift too large (orthogonality " << orth << ", length " << drift
            << "); reduce the step";
        throw StepTooLarge(msg.str());
    }
    return {s1, z};
}

GyroscopicVector fermi_walker_transport(const WorldLine& w, const FourVector& z0, double s0, double s1, double step)
{
    TransportOptions options;
    options.step = step;
    return fermi_walker_transport(w, z0, s0, s1, options);
}

LinMap fermi_walker_propagator(const WorldLine& w, double s0, double s1, double step)
{
    const auto rhs = [&w](double s, const LinMap& m) -> LinMap { return fermi_walker_generator(w, s) * m; };
    const LinMap phi = ode::rk4_integrate(rhs, s0, s1, LinMap(LinMap::Identity()), ode::steps_for(s1 - s0, step));
    if (lorentz_residual(phi) > 1e-6) {
        throw StepTooLarge("Fermi-Walker propagator is no longer a Lorentz map; reduce the step");
    }
    return phi;
}

RotationSummary summarize_rotation(const LinMap& L, const AbsoluteVelocity& v, const std::array<FourVector, 3>& triad)
{
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            m(i, j) = lorentz_dot(triad[i], L * triad[j]);
        }
    }
    RotationSummary out;
    out.map = -tensor(v, v);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out.map += m(i, j) * tensor(triad[i], triad[j]);
        }
    }
    out.determinant = m.determinant();

    const Eigen::Vector3d a(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    const double sin_theta = 0.5 * a.norm();
    const double cos_theta = 0.5 * (m.trace() - 1.0);
    out.angle = std::atan2(sin_theta, cos_theta);

    Eigen::Vector3d axis = Eigen::Vector3d::Zero();
    if (out.angle < 1e-12) {
        out.angle = 0.0;
    } else if (cos_theta > -0.9) {
        axis = a.normalized();
    } else {
        // Near π the antisymmetric part is tiny; n n^T = (B - cos θ I)/(1 - cos θ).
        const Eigen::Matrix3d b = 0.5 * (m + m.transpose());
        const Eigen::Matrix3d nn = (b - cos_theta * Eigen::Matrix3d::Identity()) / (1.0 - cos_theta);
        int col = 0;
        nn.diagonal().maxCoeff(&col);
        axis = nn.col(col).normalized();
        if (axis.dot(a) < 0.0) {
            axis = -axis;
        }
    }
    // Orientation: the triad may be left-handed relative to rest_triad(v).
    const auto ref = rest_triad(v);
    Eigen::Matrix3d change;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            change(i, j) = lorentz_dot(ref[i], triad[j]);
        }
    }
    const double handedness = change.determinant() < 0.0 ? -1.0 : 1.0;
    out.axis = handedness * (axis[0] * triad[0] + axis[1] * triad[1] + axis[2] * triad[2]);
    return out;
}

RotationSummary summarize_rotation(const LinMap& L, const AbsoluteVelocity& v)
{
    return summarize_rotation(L, v, rest_triad(v));
}

RotationSummary thomas_rotation(const WorldLine& w, double s1, double s2, double step,
                                const std::array<FourVector, 3>& triad)
{
    const AbsoluteVelocity v1 = w.velocity(s1);
    const AbsoluteVelocity v2 = w.velocity(s2);
    if (max_abs_diff(v1.vector(), v2.vector()) > 1e-9) {
        std::ostringstream msg;
        msg << "Thomas rotation needs equal velocities at s1 = " << s1 << " and s2 = " << s2 << " (difference "
            << max_abs_diff(v1.vector(), v2.vector()) << ")";
        throw VelocitiesDiffer(msg.str());
    }
    for (const auto& e : triad) {
        if (std::abs(lorentz_dot(e, v1)) > 1e-9) {
            throw PreconditionViolation("Thomas rotation: triad must lie in E_{ṙ(s1)}");
        }
    }
    if (s1 == s2) {
        return summarize_rotation(LinMap::Identity(), v1, triad);
    }
    const LinMap phi = fermi_walker_propagator(w, s1, s2, step);
    return summarize_rotation(phi, v1, triad);
}

RotationSummary thomas_rotation(const WorldLine& w, double s1, double s2, double step)
{
    return thomas_rotation(w, s1, s2, step, rest_triad(w.velocity(s1)));
}

PrecessionState thomas_precession_omega(const AbsoluteVelocity& u, const WorldLine& w, double s)
{
    const AbsoluteVelocity rd = w.velocity(s);
    const FourVector rdd = w.acceleration(s);
    PrecessionState st;
    st.s = s;
    st.t = u_time(u, w, s);
    st.gamma_u = -lorentz_dot(u, rd);
    st.v_u = rd.vector() / st.gamma_u - u.vector();
    st.a_u = (rdd + rd.vector() * (lorentz_dot(u, rdd) / st.gamma_u)) / (st.gamma_u * st.gamma_u);
    st.omega_u = (st.gamma_u * st.gamma_u / (1.0 + st.gamma_u)) * wedge(st.v_u, st.a_u);
    return st;
}

double u_time(const AbsoluteVelocity& u, const WorldLine& w, double s)
{
    return -lorentz_dot(u, w.eval(s) - w.eval(0.0));
}

double proper_time_at(const AbsoluteVelocity& u, const WorldLine& w, double t)
{
    // dt/ds = γ_u >= 1, so s = t is a safe start and Newton is monotone.
    double s = t / std::max(1.0, -lorentz_dot(u, w.velocity(0.0)));
    for (int it = 0; it < 100; ++it) {
        const double f = u_time(u, w, s) - t;
        const double gamma = -lorentz_dot(u, w.velocity(s));
        const double ds = f / gamma;
        s -= ds;
        if (std::abs(ds) <= 1e-15 * std::max(1.0, std::abs(s))) {
            return s;
        }
    }
    throw NonConvergence("proper_time_at: Newton iteration did not converge");
}

PrecessionState precession_evolve(const AbsoluteVelocity& u, const WorldLine& w, const FourVector& z0, double t0,
                                  double t1, double step, const PrecessionObserver& on_step)
{
    using State = Eigen::Matrix<double, 5, 1>;
    const double scale = 1.0 + z0.cwiseAbs().maxCoeff();
    if (std::abs(lorentz_dot(u, z0)) > 1e-9 * scale) {
        throw PreconditionViolation("precession_evolve: z0 must lie in E_u");
    }
    const auto rhs = [&](double, const State& y) -> State {
        const PrecessionState st = thomas_precession_omega(u, w, y[4]);
        State dy;
        dy.head<4>() = st.omega_u * FourVector(y.head<4>());
        dy[4] = 1.0 / st.gamma_u;
        return dy;
    };
    const auto snapshot = [&](double t, const State& y) {
        PrecessionState st = thomas_precession_omega(u, w, y[4]);
        st.t = t;
        st.z_u = y.head<4>();
        return st;
    };
    State y;
    y.head<4>() = z0;
    y[4] = proper_time_at(u, w, t0);
    if (on_step) {
        on_step(snapshot(t0, y));
    }
    const double len0 = lorentz_dot(z0, z0);
    y = ode::rk4_integrate(rhs, t0, t1, y, ode::steps_for(t1 - t0, step), [&](double t, State& state) {
        if (on_step) {
            on_step(snapshot(t, state));
        }
    });
    const FourVector z = y.head<4>();
    if (std::abs(lorentz_dot(z, z) - len0) > 1e-6 * (1.0 + std::abs(len0))) {
        throw StepTooLarge("precession_evolve: length drift too large; reduce the step");
    }
    return snapshot(t1, y);
}

double precession_angle_integral(const AbsoluteVelocity& u, const WorldLine& w, double t0, double t1, double step)
{
    using State = Eigen::Vector2d;  // (s, accumulated angle)
    const auto rhs = [&](double, const State& y) -> State {
        const PrecessionState st = thomas_precession_omega(u, w, y[0]);
        return State(1.0 / st.gamma_u, st.omega_u.rate());
    };
    const State y0(proper_time_at(u, w, t0), 0.0);
    return ode::rk4_integrate(rhs, t0, t1, y0, ode::steps_for(t1 - t0, step))[1];
}

}  // namespace gyro
