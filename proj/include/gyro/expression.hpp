#pragma once

#include <memory>
#include <string>

#include "gyro/errors.hpp"

namespace gyro {

class ExpressionError : public Error {
public:
    using Error::Error;
};

/// Value and first derivative with respect to the single variable.
struct Dual {
    double value = 0.0;
    double deriv = 0.0;
};

/// A parsed real expression of one variable (named `k` by default).
///
/// Grammar: sums and differences of products and quotients of powers (`^`,
/// right associative) over numbers, the variable, the constants `pi` and `e`,
/// parenthesized subexpressions and the functions sqrt exp log sin cos tan
/// sinh cosh tanh abs. Evaluation is forward-mode so the derivative comes
/// with the value.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& source, const std::string& variable = "k");

    Dual eval(double x) const;
    double value(double x) const { return eval(x).value; }
    const std::string& source() const noexcept { return source_; }

private:
    Expression(std::string source, std::shared_ptr<const Node> root) : source_(std::move(source)), root_(std::move(root))
    {
    }

    std::string source_;
    std::shared_ptr<const Node> root_;
};

}  // namespace gyro
