#pragma once

// Fixed-basis Minkowski linear algebra. Components are (t, x, y, z) in a
// Lorentz-orthonormal basis with metric g = diag(-1, 1, 1, 1) and c = 1.

#include <array>

#include <Eigen/Dense>

#include "gyro/errors.hpp"

namespace gyro {

using FourVector = Eigen::Vector4d;
using LinMap = Eigen::Matrix4d;

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kLorentzTol = 1e-10;
inline constexpr double kMaxCondition = 1e12;

/// The metric g as a matrix.
const LinMap& metric();

/// -x0 y0 + x1 y1 + x2 y2 + x3 y3
inline double lorentz_dot(const FourVector& x, const FourVector& y)
{
    return -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3];
}

/// |x|, the square root of x.x for spacelike x (0 otherwise).
double spatial_length(const FourVector& x);

/// (a ⊗ b) x = a (b.x)
LinMap tensor(const FourVector& a, const FourVector& b);

/// Lorentz adjoint L* with (L x).y = x.(L* y).
LinMap adjoint(const LinMap& L);

/// A point of the affine spacetime. Differences are vectors.
struct Event {
    FourVector coords = FourVector::Zero();

    Event() = default;
    explicit Event(const FourVector& c) : coords(c) {}
    Event(double t, double x, double y, double z) : coords(t, x, y, z) {}

    Event& operator+=(const FourVector& v)
    {
        coords += v;
        return *this;
    }
    friend Event operator+(Event e, const FourVector& v) { return e += v; }
    friend Event operator-(Event e, const FourVector& v) { return e += -v; }
    friend FourVector operator-(const Event& a, const Event& b) { return a.coords - b.coords; }
};

/// A future-directed unit timelike vector (four-velocity).
class AbsoluteVelocity {
public:
    /// The rest velocity (1, 0, 0, 0).
    AbsoluteVelocity() : v_(1.0, 0.0, 0.0, 0.0) {}

    /// Validates u.u = -1 within `tol` and u0 > 0; throws PreconditionViolation.
    static AbsoluteVelocity from(const FourVector& u, double tol = kStructuralTol);

    /// Rescales a future-directed timelike vector to unit length.
    static AbsoluteVelocity normalize(const FourVector& timelike);

    /// Velocity for a relative 3-velocity (vx, vy, vz) with |v| < 1 in the rest basis.
    static AbsoluteVelocity from_relative(double vx, double vy, double vz);

    const FourVector& vector() const noexcept { return v_; }
    operator const FourVector&() const noexcept { return v_; }
    double operator[](int i) const { return v_[i]; }

private:
    explicit AbsoluteVelocity(const FourVector& v) : v_(v) {}
    FourVector v_;
};

/// A linear map W with (W x).y = -x.(W y).
class AntisymMap {
public:
    AntisymMap() : w_(LinMap::Zero()) {}

    /// Validates antisymmetry within tol * (1 + |W|); throws PreconditionViolation.
    static AntisymMap from(const LinMap& w, double tol = kStructuralTol);

    /// The antisymmetric part (W - W*)/2, never throws.
    static AntisymMap antisymmetric_part(const LinMap& w);

    const LinMap& matrix() const noexcept { return w_; }
    operator const LinMap&() const noexcept { return w_; }

    FourVector operator*(const FourVector& x) const { return w_ * x; }
    LinMap operator*(const LinMap& m) const { return w_ * m; }

    friend AntisymMap operator+(const AntisymMap& a, const AntisymMap& b) { return AntisymMap(a.w_ + b.w_); }
    friend AntisymMap operator-(const AntisymMap& a, const AntisymMap& b) { return AntisymMap(a.w_ - b.w_); }
    friend AntisymMap operator-(const AntisymMap& a) { return AntisymMap(-a.w_); }
    friend AntisymMap operator*(double s, const AntisymMap& a) { return AntisymMap(s * a.w_); }

    /// Angular rate sqrt(-Tr(W^2)/2); equals omega for a spatial rotation generator.
    double rate() const;

private:
    explicit AntisymMap(const LinMap& w) : w_(w) {}
    LinMap w_;
};

/// 1 + u ⊗ u, the projection onto E_u along u.
LinMap spatial_projector(const AbsoluteVelocity& u);

/// (a ∧ b) x = a (b.x) - b (a.x)
AntisymMap wedge(const FourVector& a, const FourVector& b);

/// exp(s W) by scaling and squaring of the Taylor series.
LinMap exp_map(const LinMap& w, double s = 1.0);
inline LinMap exp_map(const AntisymMap& w, double s = 1.0) { return exp_map(w.matrix(), s); }

/// The pure boost taking u to u2; identity on the complement of span{u, u2}.
LinMap boost(const AbsoluteVelocity& u, const AbsoluteVelocity& u2);

/// Max over an orthonormal basis {h_i} of range(P) of |h_i.(W h_j) + (W h_i).h_j|.
double antisymmetry_residual(const LinMap& w, const LinMap& P);

/// max |L^T g L - g| elementwise.
double lorentz_residual(const LinMap& L);

/// Lorentz-orthonormal basis of the range of a spatial projector (ordered
/// Gram-Schmidt over the columns of P).
std::array<FourVector, 3> orthonormal_range_basis(const LinMap& P);

/// Positively oriented orthonormal triad of E_v: the boost of the rest triad.
std::array<FourVector, 3> rest_triad(const AbsoluteVelocity& v);

/// Cross product inside E_v (orientation of rest_triad).
FourVector spatial_cross(const AbsoluteVelocity& v, const FourVector& a, const FourVector& b);

/// The generator W on E_v with W x = axis × x and W v = 0.
AntisymMap rotation_generator(const AbsoluteVelocity& v, const FourVector& axis);

/// Inverse via LU with partial pivoting; throws SingularMap when the estimated
/// condition number exceeds kMaxCondition.
LinMap inverse(const LinMap& L);

/// Inverse of a Lorentz map, g L^T g.
inline LinMap lorentz_inverse(const LinMap& L) { return adjoint(L); }

/// max |a_ij - b_ij|
inline double max_abs_diff(const LinMap& a, const LinMap& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_abs_diff(const FourVector& a, const FourVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace gyro
