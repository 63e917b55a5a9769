#include "gyro/profiles.hpp"

#include <cmath>
#include <sstream>

#include "gyro/errors.hpp"

namespace gyro {

ProfileValues Profile::at(double k) const
{
    if (!in_domain(k)) {
        std::ostringstream msg;
        msg << "profile " << name() << ": k = " << k << " is outside the domain";
        throw OutsideDomain(msg.str());
    }
    return evaluate(k);
}

HFamilyProfile::HFamilyProfile(double h) : h_(h)
{
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw PreconditionViolation("h-family profile needs h > 0");
    }
}

std::string HFamilyProfile::name() const
{
    if (h_ == 1.0) {
        return "conventional";
    }
    std::ostringstream out;
    out << "h-family(h=" << h_ << ")";
    return out.str();
}

ProfileValues HFamilyProfile::evaluate(double k) const
{
    const double h2 = h_ * h_;
    const double q = 1.0 - h2 * k;
    const double a = 1.0 / std::sqrt(q);
    const double a3 = a / q;  // q^{-3/2}
    return {a, h_ * a, 0.5 * h2 * a3, 0.5 * h2 * h_ * a3};
}

ProfileValues TrocherisTakenoProfile::evaluate(double k) const
{
    if (k < 1e-3) {
        // sinh(q)/q = Σ k^n/(2n+1)!, cosh(q) = Σ k^n/(2n)!
        const double beta = 1.0 + k / 6.0 + k * k / 120.0 + k * k * k / 5040.0 + k * k * k * k / 362880.0;
        const double dbeta = 1.0 / 6.0 + k / 60.0 + k * k / 1680.0 + k * k * k / 90720.0;
        const double alpha = 1.0 + k / 2.0 + k * k / 24.0 + k * k * k / 720.0 + k * k * k * k / 40320.0;
        return {alpha, beta, 0.5 * beta, dbeta};
    }
    const double q = std::sqrt(k);
    const double sh = std::sinh(q);
    const double ch = std::cosh(q);
    const double beta = sh / q;
    return {ch, beta, 0.5 * beta, (q * ch - sh) / (2.0 * q * q * q)};
}

ProfileValues SqrtProfile::evaluate(double k) const
{
    const double a = std::sqrt(1.0 + k);
    return {a, 1.0, 0.5 / a, 0.0};
}

ConstAlphaProfile::ConstAlphaProfile(double alpha) : alpha_(alpha)
{
    if (!(alpha > 1.0) || !std::isfinite(alpha)) {
        throw PreconditionViolation("const-alpha profile needs alpha > 1");
    }
}

ProfileValues ConstAlphaProfile::evaluate(double k) const
{
    const double c = std::sqrt(alpha_ * alpha_ - 1.0);
    const double q = std::sqrt(k);
    return {alpha_, c / q, 0.0, -0.5 * c / (k * q)};
}

ExpressionProfile::ExpressionProfile(const std::string& alpha_source, const std::string& beta_source)
    : alpha_(Expression::parse(alpha_source)), beta_(Expression::parse(beta_source))
{
}

std::string ExpressionProfile::name() const
{
    return "expr(alpha=" + alpha_.source() + ", beta=" + beta_.source() + ")";
}

bool ExpressionProfile::in_domain(double k) const
{
    if (!(k >= 0.0) || !std::isfinite(k)) {
        return false;
    }
    const Dual a = alpha_.eval(k);
    const Dual b = beta_.eval(k);
    return std::isfinite(a.value) && std::isfinite(b.value) && std::isfinite(a.deriv) && std::isfinite(b.deriv) &&
           a.value > 0.0 && b.value > 0.0;
}

ProfileValues ExpressionProfile::evaluate(double k) const
{
    const Dual a = alpha_.eval(k);
    const Dual b = beta_.eval(k);
    return {a.value, b.value, a.deriv, b.deriv};
}

std::shared_ptr<const Profile> make_profile(const std::string& name, double h, double const_alpha)
{
    if (name == "conventional") {
        return std::make_shared<HFamilyProfile>(1.0);
    }
    if (name == "h-family") {
        return std::make_shared<HFamilyProfile>(h);
    }
    if (name == "tt") {
        return std::make_shared<TrocherisTakenoProfile>();
    }
    if (name == "sqrt") {
        return std::make_shared<SqrtProfile>();
    }
    if (name == "const-alpha") {
        return std::make_shared<ConstAlphaProfile>(const_alpha);
    }
    throw PreconditionViolation("unknown profile preset '" + name + "'");
}

CriterionDefect profile_criterion(const Profile& p, double k)
{
    const ProfileValues v = p.at(k);
    return {2.0 * v.dalpha - v.alpha * v.beta * v.beta, 2.0 * v.dbeta - v.beta * v.beta * v.beta};
}

double normalization_defect(const Profile& p, double k)
{
    const ProfileValues v = p.at(k);
    return v.alpha * v.alpha - v.beta * v.beta * k - 1.0;
}

double derivative_identity_defect(const Profile& p, double k)
{
    const ProfileValues v = p.at(k);
    return 2.0 * v.alpha * v.dalpha - 2.0 * v.beta * v.dbeta * k - v.beta * v.beta;
}

}  // namespace gyro
