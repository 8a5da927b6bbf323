#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "geotomo/util.hpp"

namespace geotomo {

// Arithmetic expressions in the variables x and y, used to describe conformal
// factors in config files. Nodes live in a flat vector; node 0 is unused so
// index 0 can mean "none".
enum class ExprOp : std::uint8_t {
    Num,
    VarX,
    VarY,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
};

struct ExprNode {
    ExprOp op = ExprOp::Num;
    int a = 0;     // left child / unary argument
    int b = 0;     // right child
    double value = 0.0;
};

class Expression {
  public:
    Expression() = default;

    double eval(double x, double y) const;

    // Symbolic partial derivative; var is 0 for x, 1 for y. Constant folding
    // keeps repeated differentiation (for curvature) from blowing up.
    Expression derivative(int var) const;

    std::string pretty() const;
    bool equals(const Expression& other) const;
    bool empty() const { return nodes_.size() <= 1; }

    static Expression number(double v);

  private:
    friend Expression parse_expression(const std::string& text);
    friend class ExprBuilder;

    std::vector<ExprNode> nodes_{ExprNode{}};  // slot 0 reserved
    int root_ = 0;

    double eval_node(int idx, double x, double y) const;
    std::string pretty_node(int idx, int parent_prec, bool right_side) const;
};

// Recursive-descent parser. Precedence, loosest to tightest:
//   + -   (left)
//   * /   (left)
//   unary -
//   ^     (right associative, binds above unary minus: -x^2 == -(x^2))
// Calls: exp, log, sin, cos, sqrt. Errors carry the byte offset.
Expression parse_expression(const std::string& text);

}  // namespace geotomo
