#include "rtsmp/expression.hpp"

#include "rtsmp/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace rtsmp {

struct Expression::Node {
    enum class Kind { number, x_var, v_var, neg, add, sub, mul, div, pow, call };
    Kind kind = Kind::number;
    double value = 0.0;
    int axis = 0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, std::vector<NodePtr> args = {}) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
}

struct FunctionInfo {
    const char* name;
    int arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", 1},  {"cos", 1},   {"tan", 1},  {"exp", 1},  {"log", 1}, {"sqrt", 1}, {"abs", 1},
    {"floor", 1}, {"ceil", 1}, {"sign", 1}, {"step", 1}, {"min", 2}, {"max", 2},  {"pow", 2},
};

class Parser {
  public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    int max_x = -1;
    int max_v = -1;

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("", "expression \"" + s_ + "\": " + what + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) lhs = make(Kind::add, {lhs, term()});
            else if (eat('-')) lhs = make(Kind::sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*')) lhs = make(Kind::mul, {lhs, unary()});
            else if (eat('/')) lhs = make(Kind::div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary() {
        if (eat('-')) return make(Kind::neg, {unary()});
        if (eat('+')) return unary();
        return power();
    }

    // right-associative; binds tighter than unary minus on its left operand
    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return make(Kind::pow, {base, unary()});
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        double value = 0.0;
        const char* begin = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), value);
        if (ec != std::errc()) fail("bad number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::number;
        n->value = value;
        return n;
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string id = s_.substr(start, pos_ - start);

        if (id == "pi" || id == "e") {
            auto n = std::make_shared<Expression::Node>();
            n->value = id == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if ((id[0] == 'x' || id[0] == 'v') &&
            (id.size() == 1 || (id.size() == 2 && std::isdigit(static_cast<unsigned char>(id[1]))))) {
            auto n = std::make_shared<Expression::Node>();
            n->kind = id[0] == 'x' ? Kind::x_var : Kind::v_var;
            n->axis = id.size() == 2 ? id[1] - '0' : 0;
            int& m = id[0] == 'x' ? max_x : max_v;
            m = std::max(m, n->axis);
            return n;
        }
        for (const auto& f : kFunctions) {
            if (id != f.name) continue;
            if (!eat('(')) fail("expected '(' after " + id);
            std::vector<NodePtr> args{expr()};
            while (eat(',')) args.push_back(expr());
            if (!eat(')')) fail("expected ')'");
            if (static_cast<int>(args.size()) != f.arity)
                fail(id + " takes " + std::to_string(f.arity) + " argument(s)");
            auto n = std::make_shared<Expression::Node>();
            n->kind = Kind::call;
            n->fn = id;
            n->args = std::move(args);
            return n;
        }
        fail("unknown identifier '" + id + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

double call(const std::string& fn, double a, double b) {
    if (fn == "sin") return std::sin(a);
    if (fn == "cos") return std::cos(a);
    if (fn == "tan") return std::tan(a);
    if (fn == "exp") return std::exp(a);
    if (fn == "log") return std::log(a);
    if (fn == "sqrt") return std::sqrt(a);
    if (fn == "abs") return std::abs(a);
    if (fn == "floor") return std::floor(a);
    if (fn == "ceil") return std::ceil(a);
    if (fn == "sign") return static_cast<double>((a > 0.0) - (a < 0.0));
    if (fn == "step") return a >= 0.0 ? 1.0 : 0.0;
    if (fn == "min") return std::min(a, b);
    if (fn == "max") return std::max(a, b);
    return std::pow(a, b);
}

double eval(const Expression::Node& n, const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::x_var: return n.axis < x.size() ? x[n.axis] : std::nan("");
        case Kind::v_var: return n.axis < v.size() ? v[n.axis] : std::nan("");
        case Kind::neg: return -eval(*n.args[0], x, v);
        case Kind::add: return eval(*n.args[0], x, v) + eval(*n.args[1], x, v);
        case Kind::sub: return eval(*n.args[0], x, v) - eval(*n.args[1], x, v);
        case Kind::mul: return eval(*n.args[0], x, v) * eval(*n.args[1], x, v);
        case Kind::div: return eval(*n.args[0], x, v) / eval(*n.args[1], x, v);
        case Kind::pow: return std::pow(eval(*n.args[0], x, v), eval(*n.args[1], x, v));
        case Kind::call: {
            const double a = eval(*n.args[0], x, v);
            const double b = n.args.size() > 1 ? eval(*n.args[1], x, v) : 0.0;
            return call(n.fn, a, b);
        }
    }
    return std::nan("");
}

}  // namespace

Expression::Expression(std::string text) : text_(std::move(text)) {
    Parser p(text_);
    root_ = p.parse();
    max_x_ = p.max_x;
    max_v_ = p.max_v;
}

double Expression::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& v) const {
    return eval(*root_, x, v);
}

}  // namespace rtsmp
