#include "dblab/expression.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace dblab {

namespace {

std::string located(const std::string& msg, int line, int column) {
    std::ostringstream os;
    os << "expression error at line " << line << ", column " << column << ": " << msg;
    return os.str();
}

}  // namespace

ExprError::ExprError(const std::string& msg, int line, int column)
    : InputError(located(msg, line, column)), line_(line), column_(column) {}

struct Expression::Node {
    enum class Kind { number, imag, x1, x2, add, sub, mul, div, neg, pow, sin, cos, exp } kind;
    cplx value = 0.0;
    int exponent = 0;
    int line = 1, column = 1;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

class Parser {
public:
    Parser(const std::string& s, int n) : s_(s), n_(n) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    int n_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { fail_at(msg, pos_); }

    [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
        auto [line, col] = where(at);
        throw ExprError(msg, line, col);
    }

    std::pair<int, int> where(std::size_t at) const {
        int line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
            if (s_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr make(Node::Kind k, std::size_t at, NodePtr a = nullptr, NodePtr b = nullptr) const {
        auto node = std::make_shared<Node>();
        node->kind = k;
        auto [line, col] = where(at);
        node->line = line;
        node->column = col;
        node->lhs = std::move(a);
        node->rhs = std::move(b);
        return node;
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (accept('+')) {
                left = make(Node::Kind::add, at, left, term());
            } else if (accept('-')) {
                left = make(Node::Kind::sub, at, left, term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (accept('*')) {
                left = make(Node::Kind::mul, at, left, unary());
            } else if (accept('/')) {
                left = make(Node::Kind::div, at, left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        skip();
        const std::size_t at = pos_;
        if (accept('-')) return make(Node::Kind::neg, at, unary());
        return factor();
    }

    NodePtr factor() {
        NodePtr base = atom();
        for (;;) {
            skip();
            const std::size_t at = pos_;
            if (!accept('^')) return base;
            skip();
            bool negative = accept('-');
            skip();
            const std::size_t digits = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (digits == pos_) fail("expected integer exponent");
            long e = std::stol(s_.substr(digits, pos_ - digits));
            if (e > 64) fail_at("exponent too large", digits);
            auto node = std::make_shared<Node>(*make(Node::Kind::pow, at, base));
            node->exponent = static_cast<int>(negative ? -e : e);
            base = node;
        }
    }

    NodePtr atom() {
        skip();
        const std::size_t at = pos_;
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t end = pos_;
            while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
            const std::string word = s_.substr(pos_, end - pos_);
            pos_ = end;
            if (word == "i") return make(Node::Kind::imag, at);
            if (word == "x1") return make(Node::Kind::x1, at);
            if (word == "x2") {
                if (n_ < 2) fail_at("x2 is not available when n = 1", at);
                return make(Node::Kind::x2, at);
            }
            Node::Kind k;
            if (word == "sin") {
                k = Node::Kind::sin;
            } else if (word == "cos") {
                k = Node::Kind::cos;
            } else if (word == "exp") {
                k = Node::Kind::exp;
            } else {
                fail_at("unknown identifier '" + word + "'", at);
            }
            if (!accept('(')) fail("expected '(' after " + word);
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return make(k, at, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t at = pos_;
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto node = std::make_shared<Node>(*make(Node::Kind::number, at));
        node->value = v;
        return node;
    }
};

struct DivisionError {
    const Node* node;
};

cplx eval_node(const Node& nd, double x1, double x2) {
    switch (nd.kind) {
        case Node::Kind::number: return nd.value;
        case Node::Kind::imag: return cplx(0.0, 1.0);
        case Node::Kind::x1: return x1;
        case Node::Kind::x2: return x2;
        case Node::Kind::add: return eval_node(*nd.lhs, x1, x2) + eval_node(*nd.rhs, x1, x2);
        case Node::Kind::sub: return eval_node(*nd.lhs, x1, x2) - eval_node(*nd.rhs, x1, x2);
        case Node::Kind::mul: return eval_node(*nd.lhs, x1, x2) * eval_node(*nd.rhs, x1, x2);
        case Node::Kind::div: {
            const cplx den = eval_node(*nd.rhs, x1, x2);
            if (std::abs(den) < 1e-14) throw DivisionError{&nd};
            return eval_node(*nd.lhs, x1, x2) / den;
        }
        case Node::Kind::neg: return -eval_node(*nd.lhs, x1, x2);
        case Node::Kind::pow: {
            const cplx b = eval_node(*nd.lhs, x1, x2);
            cplx r = 1.0;
            for (int k = 0; k < std::abs(nd.exponent); ++k) r *= b;
            if (nd.exponent < 0) {
                if (std::abs(r) < 1e-14) throw DivisionError{&nd};
                r = 1.0 / r;
            }
            return r;
        }
        case Node::Kind::sin: return std::sin(eval_node(*nd.lhs, x1, x2));
        case Node::Kind::cos: return std::cos(eval_node(*nd.lhs, x1, x2));
        case Node::Kind::exp: return std::exp(eval_node(*nd.lhs, x1, x2));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& src, int n) {
    Expression e;
    e.src_ = src;
    e.root_ = Parser(src, n).parse();
    return e;
}

cplx Expression::eval(double x1, double x2) const {
    try {
        return eval_node(*root_, x1, x2);
    } catch (const DivisionError& d) {
        throw ExprError("division by a value below 1e-14", d.node->line, d.node->column);
    }
}

Vec Expression::evaluate(const GridSpec& g) const {
    Vec out(g.points());
    for (std::size_t k = 0; k < g.points(); ++k) {
        auto x = grid_point(g, k);
        try {
            out(k) = eval_node(*root_, x[0], x[1]);
        } catch (const DivisionError& d) {
            std::ostringstream os;
            os << "division by a value below 1e-14 at grid point (" << x[0] << ", " << x[1] << ")";
            throw ExprError(os.str(), d.node->line, d.node->column);
        }
        if (!std::isfinite(out(k).real()) || !std::isfinite(out(k).imag()))
            throw ExprError("non-finite value", 1, 1);
    }
    return out;
}

}  // namespace dblab
