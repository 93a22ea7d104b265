#pragma once

#include <memory>
#include <string>

#include "dblab/grid.hpp"

namespace dblab {

// Coefficient mini-language:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := atom ('^' integer)*
//   atom   := number | 'i' | 'x1' | 'x2' | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | exp
class ExprError : public InputError {
public:
    ExprError(const std::string& msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class Expression {
public:
    struct Node;

    // Parses `src` for dimension n (x2 is rejected when n == 1).
    static Expression parse(const std::string& src, int n);

    cplx eval(double x1, double x2) const;
    // Pointwise evaluation on the grid; rejects near-zero denominators.
    Vec evaluate(const GridSpec& g) const;
    const std::string& source() const { return src_; }

private:
    std::string src_;
    std::shared_ptr<const Node> root_;
};

inline Vec parse_coefficient_expr(const std::string& src, const GridSpec& g) {
    return Expression::parse(src, g.n).evaluate(g);
}

}  // namespace dblab
