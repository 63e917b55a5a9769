#include "gyro/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace gyro {

struct Expression::Node {
    enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
    enum class Fn { Sqrt, Exp, Log, Sin, Cos, Tan, Sinh, Cosh, Tanh, Abs };

    Kind kind = Kind::Number;
    Fn fn = Fn::Sqrt;
    double number = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
public:
    Parser(const std::string& src, const std::string& variable) : src_(src), variable_(variable) {}

    NodePtr parse()
    {
        NodePtr root = expr();
        skip_space();
        if (pos_ != src_.size()) {
            fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ExpressionError("expression \"" + src_ + "\": " + what + " at offset " + std::to_string(pos_));
    }

    void skip_space()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Node::Kind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make(Node::Kind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Node::Kind::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Node::Kind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary()
    {
        if (accept('-')) {
            return make(Node::Kind::Negate, unary());
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (accept('^')) {
            return make(Node::Kind::Pow, base, unary());
        }
        return base;
    }

    NodePtr primary()
    {
        skip_space();
        if (pos_ >= src_.size()) {
            fail("unexpected end of input");
        }
        if (accept('(')) {
            NodePtr inner = expr();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const char* begin = src_.data() + pos_;
            const auto [end, ec] = std::from_chars(begin, src_.data() + src_.size(), v);
            if (ec != std::errc()) {
                fail("bad number");
            }
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->number = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name = src_.substr(start, pos_ - start);
            if (name == variable_) {
                return make(Node::Kind::Variable);
            }
            if (name == "pi" || name == "e") {
                auto n = std::make_shared<Node>();
                n->number = name == "pi" ? std::numbers::pi : std::numbers::e;
                return n;
            }
            static const std::vector<std::pair<std::string, Node::Fn>> functions = {
                {"sqrt", Node::Fn::Sqrt}, {"exp", Node::Fn::Exp},   {"log", Node::Fn::Log},
                {"sin", Node::Fn::Sin},   {"cos", Node::Fn::Cos},   {"tan", Node::Fn::Tan},
                {"sinh", Node::Fn::Sinh}, {"cosh", Node::Fn::Cosh}, {"tanh", Node::Fn::Tanh},
                {"abs", Node::Fn::Abs}};
            for (const auto& [fname, fn] : functions) {
                if (fname == name) {
                    if (!accept('(')) {
                        fail("expected '(' after " + name);
                    }
                    auto n = std::make_shared<Node>();
                    n->kind = Node::Kind::Call;
                    n->fn = fn;
                    n->lhs = expr();
                    if (!accept(')')) {
                        fail("expected ')'");
                    }
                    return n;
                }
            }
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& src_;
    const std::string& variable_;
    std::size_t pos_ = 0;
};

Dual apply(Node::Fn fn, Dual a)
{
    switch (fn) {
    case Node::Fn::Sqrt: {
        const double r = std::sqrt(a.value);
        return {r, a.deriv / (2.0 * r)};
    }
    case Node::Fn::Exp: {
        const double e = std::exp(a.value);
        return {e, e * a.deriv};
    }
    case Node::Fn::Log:
        return {std::log(a.value), a.deriv / a.value};
    case Node::Fn::Sin:
        return {std::sin(a.value), std::cos(a.value) * a.deriv};
    case Node::Fn::Cos:
        return {std::cos(a.value), -std::sin(a.value) * a.deriv};
    case Node::Fn::Tan: {
        const double c = std::cos(a.value);
        return {std::tan(a.value), a.deriv / (c * c)};
    }
    case Node::Fn::Sinh:
        return {std::sinh(a.value), std::cosh(a.value) * a.deriv};
    case Node::Fn::Cosh:
        return {std::cosh(a.value), std::sinh(a.value) * a.deriv};
    case Node::Fn::Tanh: {
        const double t = std::tanh(a.value);
        return {t, (1.0 - t * t) * a.deriv};
    }
    case Node::Fn::Abs:
        return {std::abs(a.value), a.value < 0.0 ? -a.deriv : a.deriv};
    }
    return {};
}

Dual evaluate(const Node& n, double x)
{
    switch (n.kind) {
    case Node::Kind::Number:
        return {n.number, 0.0};
    case Node::Kind::Variable:
        return {x, 1.0};
    case Node::Kind::Negate: {
        const Dual a = evaluate(*n.lhs, x);
        return {-a.value, -a.deriv};
    }
    case Node::Kind::Call:
        return apply(n.fn, evaluate(*n.lhs, x));
    default:
        break;
    }
    const Dual a = evaluate(*n.lhs, x);
    const Dual b = evaluate(*n.rhs, x);
    switch (n.kind) {
    case Node::Kind::Add:
        return {a.value + b.value, a.deriv + b.deriv};
    case Node::Kind::Sub:
        return {a.value - b.value, a.deriv - b.deriv};
    case Node::Kind::Mul:
        return {a.value * b.value, a.deriv * b.value + a.value * b.deriv};
    case Node::Kind::Div:
        return {a.value / b.value, (a.deriv * b.value - a.value * b.deriv) / (b.value * b.value)};
    case Node::Kind::Pow: {
        const double p = std::pow(a.value, b.value);
        double d = 0.0;
        if (a.deriv != 0.0) {
            d += b.value * std::pow(a.value, b.value - 1.0) * a.deriv;
        }
        if (b.deriv != 0.0) {
            d += p * std::log(a.value) * b.deriv;
        }
        return {p, d};
    }
    default:
        return {};
    }
}

}  // namespace

Expression Expression::parse(const std::string& source, const std::string& variable)
{
    Parser parser(source, variable);
    return Expression(source, parser.parse());
}

Dual Expression::eval(double x) const
{
    return evaluate(*root_, x);
}

}  // namespace gyro
