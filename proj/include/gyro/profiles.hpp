#pragma once

#include <cmath>
#include <memory>
#include <string>

#include "gyro/expression.hpp"

namespace gyro {

/// α, β and their derivatives with respect to k.
struct ProfileValues {
    double alpha = 1.0;
    double beta = 1.0;
    double dalpha = 0.0;
    double dbeta = 0.0;
};

/// Coefficient functions of a rotating observer U = α(k) u + β(k) Ω(x - o),
/// k = |Ω(x - o)|², subject to α² - β² k = 1.
class Profile {
public:
    virtual ~Profile() = default;

    virtual std::string name() const = 0;
    virtual bool in_domain(double k) const = 0;

    /// Throws OutsideDomain when !in_domain(k).
    ProfileValues at(double k) const;

    double alpha(double k) const { return at(k).alpha; }
    double beta(double k) const { return at(k).beta; }

protected:
    virtual ProfileValues evaluate(double k) const = 0;
};

/// α = 1/sqrt(1 - h²k), β = h/sqrt(1 - h²k); h = 1 is the conventional
/// rotating observer. Domain h²k < 1 - 1e-9.
class HFamilyProfile final : public Profile {
public:
    explicit HFamilyProfile(double h = 1.0);

    std::string name() const override;
    bool in_domain(double k) const override { return k >= 0.0 && h_ * h_ * k < 1.0 - 1e-9; }
    double h() const noexcept { return h_; }

protected:
    ProfileValues evaluate(double k) const override;

private:
    double h_;
};

/// Trocheris-Takeno: α = cosh √k, β = sinh √k / √k.
class TrocherisTakenoProfile final : public Profile {
public:
    std::string name() const override { return "tt"; }
    bool in_domain(double k) const override { return k >= 0.0 && std::isfinite(k); }

protected:
    ProfileValues evaluate(double k) const override;
};

/// α = sqrt(1 + k), β = 1.
class SqrtProfile final : public Profile {
public:
    std::string name() const override { return "sqrt"; }
    bool in_domain(double k) const override { return k >= 0.0 && std::isfinite(k); }

protected:
    ProfileValues evaluate(double k) const override;
};

/// α = const > 1, β = sqrt(α² - 1)/√k; undefined on the axis (k = 0).
class ConstAlphaProfile final : public Profile {
public:
    explicit ConstAlphaProfile(double alpha = 1.25);

    std::string name() const override { return "const-alpha"; }
    bool in_domain(double k) const override { return k > 0.0 && std::isfinite(k); }
    double constant() const noexcept { return alpha_; }

protected:
    ProfileValues evaluate(double k) const override;

private:
    double alpha_;
};

/// α and β given as expressions in k; derivatives by forward-mode evaluation.
/// The domain is where both values are finite and positive.
class ExpressionProfile final : public Profile {
public:
    ExpressionProfile(const std::string& alpha_source, const std::string& beta_source);

    std::string name() const override;
    bool in_domain(double k) const override;

protected:
    ProfileValues evaluate(double k) const override;

private:
    Expression alpha_;
    Expression beta_;
};

/// Preset by name: conventional, tt, sqrt, const-alpha, h-family.
std::shared_ptr<const Profile> make_profile(const std::string& name, double h = 1.0, double const_alpha = 1.25);

struct CriterionDefect {
    double alpha = 0.0;  ///< 2α' - αβ²
    double beta = 0.0;   ///< 2β' - β³
};

/// Defects of the Foucault meaningfulness equations at k; both vanish exactly
/// for the h-family.
CriterionDefect profile_criterion(const Profile& p, double k);

/// α² - β² k - 1
double normalization_defect(const Profile& p, double k);

/// 2αα' - 2ββ'k - β², which vanishes for any normalized profile.
double derivative_identity_defect(const Profile& p, double k);

}  // namespace gyro
