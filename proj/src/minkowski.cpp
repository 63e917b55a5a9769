#include "gyro/minkowski.hpp"

#include <cmath>
#include <sstream>

namespace gyro {

const LinMap& metric()
{
    static const LinMap g = FourVector(-1.0, 1.0, 1.0, 1.0).asDiagonal();
    return g;
}

double spatial_length(const FourVector& x)
{
    const double q = lorentz_dot(x, x);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

LinMap tensor(const FourVector& a, const FourVector& b)
{
    // (a ⊗ b) x = a (b.x), so the matrix is a (g b)^T.
    const FourVector gb(-b[0], b[1], b[2], b[3]);
    return a * gb.transpose();
}

LinMap adjoint(const LinMap& L)
{
    const LinMap& g = metric();
    return g * L.transpose() * g;
}

AbsoluteVelocity AbsoluteVelocity::from(const FourVector& u, double tol)
{
    const double n = lorentz_dot(u, u);
    if (!(std::abs(n + 1.0) <= tol) || !(u[0] > 0.0)) {
        std::ostringstream msg;
        msg << "not an absolute velocity: u.u = " << n << ", u0 = " << u[0];
        throw PreconditionViolation(msg.str());
    }
    return AbsoluteVelocity(u);
}

AbsoluteVelocity AbsoluteVelocity::normalize(const FourVector& timelike)
{
    const double n = lorentz_dot(timelike, timelike);
    if (!(n < 0.0) || !(timelike[0] > 0.0)) {
        throw NonTimelike("vector is not future-directed timelike");
    }
    return AbsoluteVelocity(timelike / std::sqrt(-n));
}

AbsoluteVelocity AbsoluteVelocity::from_relative(double vx, double vy, double vz)
{
    const double v2 = vx * vx + vy * vy + vz * vz;
    if (!(v2 < 1.0)) {
        throw PreconditionViolation("relative speed must be below 1");
    }
    const double gamma = 1.0 / std::sqrt(1.0 - v2);
    return AbsoluteVelocity(FourVector(gamma, gamma * vx, gamma * vy, gamma * vz));
}

AntisymMap AntisymMap::from(const LinMap& w, double tol)
{
    const double residual = (adjoint(w) + w).cwiseAbs().maxCoeff();
    if (!(residual <= tol * (1.0 + w.cwiseAbs().maxCoeff()))) {
        std::ostringstream msg;
        msg << "map is not Lorentz-antisymmetric (residual " << residual << ")";
        throw PreconditionViolation(msg.str());
    }
    return AntisymMap(0.5 * (w - adjoint(w)));
}

AntisymMap AntisymMap::antisymmetric_part(const LinMap& w)
{
    return AntisymMap(0.5 * (w - adjoint(w)));
}

double AntisymMap::rate() const
{
    const double t = -0.5 * (w_ * w_).trace();
    return t > 0.0 ? std::sqrt(t) : 0.0;
}

LinMap spatial_projector(const AbsoluteVelocity& u)
{
    return LinMap::Identity() + tensor(u, u);
}

AntisymMap wedge(const FourVector& a, const FourVector& b)
{
    return AntisymMap::antisymmetric_part(tensor(a, b) - tensor(b, a));
}

LinMap exp_map(const LinMap& w, double s)
{
    LinMap a = s * w;
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.25) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
        a /= std::ldexp(1.0, squarings);
    }
    // |a| <= 1/4: the Taylor tail after 18 terms is far below one ulp.
    LinMap result = LinMap::Identity();
    LinMap term = LinMap::Identity();
    for (int k = 1; k <= 18; ++k) {
        term = term * a / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) {
            break;
        }
    }
    for (int i = 0; i < squarings; ++i) {
        result = result * result;
    }
    return result;
}

LinMap boost(const AbsoluteVelocity& u, const AbsoluteVelocity& u2)
{
    const double gamma = -lorentz_dot(u, u2);
    if (!(1.0 + gamma > 1e-12)) {
        throw PreconditionViolation("boost between antipodal velocities");
    }
    const FourVector w = u.vector() + u2.vector();
    return LinMap::Identity() + tensor(w, w) / (1.0 + gamma) - 2.0 * tensor(u2, u);
}

std::array<FourVector, 3> orthonormal_range_basis(const LinMap& P)
{
    std::array<FourVector, 3> basis{};
    int found = 0;
    for (int c = 0; c < 4 && found < 3; ++c) {
        FourVector h = P.col(c);
        for (int i = 0; i < found; ++i) {
            h -= lorentz_dot(basis[i], h) * basis[i];
        }
        const double n2 = lorentz_dot(h, h);
        if (n2 > 1e-8) {
            basis[found++] = h / std::sqrt(n2);
        }
    }
    if (found < 3) {
        throw PreconditionViolation("projector range is not a 3-dimensional spacelike subspace");
    }
    return basis;
}

double antisymmetry_residual(const LinMap& w, const LinMap& P)
{
    const auto h = orthonormal_range_basis(P);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        const FourVector wi = w * h[i];
        for (int j = 0; j < 3; ++j) {
            const double r = lorentz_dot(h[i], w * h[j]) + lorentz_dot(wi, h[j]);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

double lorentz_residual(const LinMap& L)
{
    return (L.transpose() * metric() * L - metric()).cwiseAbs().maxCoeff();
}

std::array<FourVector, 3> rest_triad(const AbsoluteVelocity& v)
{
    const LinMap B = boost(AbsoluteVelocity(), v);
    return {FourVector(B.col(1)), FourVector(B.col(2)), FourVector(B.col(3))};
}

FourVector spatial_cross(const AbsoluteVelocity& v, const FourVector& a, const FourVector& b)
{
    // Boost to the rest frame, take the 3D cross product, boost back.
    const LinMap to_rest = boost(v, AbsoluteVelocity());
    const FourVector ra = to_rest * a;
    const FourVector rb = to_rest * b;
    const Eigen::Vector3d c = ra.tail<3>().cross(rb.tail<3>());
    return boost(AbsoluteVelocity(), v) * FourVector(0.0, c[0], c[1], c[2]);
}

AntisymMap rotation_generator(const AbsoluteVelocity& v, const FourVector& axis)
{
    const LinMap to_rest = boost(v, AbsoluteVelocity());
    const FourVector ra = to_rest * axis;
    LinMap w0 = LinMap::Zero();
    // w0 x = a × x on the spatial block.
    w0(1, 2) = -ra[3];
    w0(1, 3) = ra[2];
    w0(2, 1) = ra[3];
    w0(2, 3) = -ra[1];
    w0(3, 1) = -ra[2];
    w0(3, 2) = ra[1];
    const LinMap from_rest = boost(AbsoluteVelocity(), v);
    return AntisymMap::antisymmetric_part(from_rest * w0 * to_rest);
}

LinMap inverse(const LinMap& L)
{
    const Eigen::PartialPivLU<LinMap> lu(L);
    const double rcond = lu.rcond();
    if (!(rcond > 1.0 / kMaxCondition)) {
        std::ostringstream msg;
        msg << "matrix inversion rejected: estimated condition number " << (rcond > 0 ? 1.0 / rcond : INFINITY);
        throw SingularMap(msg.str());
    }
    return lu.inverse();
}

}  // namespace gyro
