#include "geotomo/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace geotomo {

namespace {

bool is_zero(const ExprNode& n) { return n.op == ExprOp::Num && n.value == 0.0; }
bool is_one(const ExprNode& n) { return n.op == ExprOp::Num && n.value == 1.0; }

}  // namespace

// Builder with folding simplifications; used by the parser and by derivative().
class ExprBuilder {
  public:
    std::vector<ExprNode> nodes{ExprNode{}};

    int num(double v) {
        nodes.push_back({ExprOp::Num, 0, 0, v});
        return int(nodes.size()) - 1;
    }
    int var(int which) {
        nodes.push_back({which == 0 ? ExprOp::VarX : ExprOp::VarY, 0, 0, 0.0});
        return int(nodes.size()) - 1;
    }
    int unary(ExprOp op, int a) {
        if (nodes[a].op == ExprOp::Num) {
            double v = nodes[a].value;
            switch (op) {
                case ExprOp::Neg: return num(-v);
                case ExprOp::Exp: return num(std::exp(v));
                case ExprOp::Sin: return num(std::sin(v));
                case ExprOp::Cos: return num(std::cos(v));
                default: break;  // log/sqrt of constants may be domain errors; keep symbolic
            }
        }
        if (op == ExprOp::Neg && nodes[a].op == ExprOp::Neg) return nodes[a].a;
        nodes.push_back({op, a, 0, 0.0});
        return int(nodes.size()) - 1;
    }
    int binary(ExprOp op, int a, int b) {
        const ExprNode& na = nodes[a];
        const ExprNode& nb = nodes[b];
        if (na.op == ExprOp::Num && nb.op == ExprOp::Num) {
            switch (op) {
                case ExprOp::Add: return num(na.value + nb.value);
                case ExprOp::Sub: return num(na.value - nb.value);
                case ExprOp::Mul: return num(na.value * nb.value);
                case ExprOp::Pow: return num(std::pow(na.value, nb.value));
                case ExprOp::Div:
                    if (nb.value != 0.0) return num(na.value / nb.value);
                    break;
                default: break;
            }
        }
        switch (op) {
            case ExprOp::Add:
                if (is_zero(na)) return b;
                if (is_zero(nb)) return a;
                break;
            case ExprOp::Sub:
                if (is_zero(nb)) return a;
                if (is_zero(na)) return unary(ExprOp::Neg, b);
                break;
            case ExprOp::Mul:
                if (is_zero(na) || is_zero(nb)) return num(0.0);
                if (is_one(na)) return b;
                if (is_one(nb)) return a;
                break;
            case ExprOp::Div:
                if (is_zero(na)) return num(0.0);
                if (is_one(nb)) return a;
                break;
            case ExprOp::Pow:
                if (is_one(nb)) return a;
                if (is_zero(nb)) return num(1.0);
                break;
            default: break;
        }
        nodes.push_back({op, a, b, 0.0});
        return int(nodes.size()) - 1;
    }

    Expression take(int root) {
        Expression e;
        e.nodes_ = std::move(nodes);
        e.root_ = root;
        return e;
    }
};

double Expression::eval_node(int idx, double x, double y) const {
    const ExprNode& n = nodes_[idx];
    switch (n.op) {
        case ExprOp::Num: return n.value;
        case ExprOp::VarX: return x;
        case ExprOp::VarY: return y;
        case ExprOp::Add: return eval_node(n.a, x, y) + eval_node(n.b, x, y);
        case ExprOp::Sub: return eval_node(n.a, x, y) - eval_node(n.b, x, y);
        case ExprOp::Mul: return eval_node(n.a, x, y) * eval_node(n.b, x, y);
        case ExprOp::Div: {
            double d = eval_node(n.b, x, y);
            if (d == 0.0) throw DomainError("division by zero in expression");
            return eval_node(n.a, x, y) / d;
        }
        case ExprOp::Pow: return std::pow(eval_node(n.a, x, y), eval_node(n.b, x, y));
        case ExprOp::Neg: return -eval_node(n.a, x, y);
        case ExprOp::Exp: return std::exp(eval_node(n.a, x, y));
        case ExprOp::Log: {
            double v = eval_node(n.a, x, y);
            if (v <= 0.0) throw DomainError("log argument not positive");
            return std::log(v);
        }
        case ExprOp::Sin: return std::sin(eval_node(n.a, x, y));
        case ExprOp::Cos: return std::cos(eval_node(n.a, x, y));
        case ExprOp::Sqrt: {
            double v = eval_node(n.a, x, y);
            if (v < 0.0) throw DomainError("sqrt argument negative");
            return std::sqrt(v);
        }
    }
    throw Error("corrupt expression node");
}

double Expression::eval(double x, double y) const {
    if (empty()) throw Error("empty expression");
    return eval_node(root_, x, y);
}

Expression Expression::number(double v) {
    ExprBuilder b;
    return b.take(b.num(v));
}

namespace {

// Copies subtree src[idx] into dst, returning the new index.
int copy_into(ExprBuilder& dst, const std::vector<ExprNode>& src, int idx) {
    const ExprNode& n = src[idx];
    switch (n.op) {
        case ExprOp::Num: return dst.num(n.value);
        case ExprOp::VarX: return dst.var(0);
        case ExprOp::VarY: return dst.var(1);
        case ExprOp::Neg:
        case ExprOp::Exp:
        case ExprOp::Log:
        case ExprOp::Sin:
        case ExprOp::Cos:
        case ExprOp::Sqrt: return dst.unary(n.op, copy_into(dst, src, n.a));
        default: {
            int a = copy_into(dst, src, n.a);
            int b = copy_into(dst, src, n.b);
            return dst.binary(n.op, a, b);
        }
    }
}

int diff_node(ExprBuilder& out, const std::vector<ExprNode>& src, int idx, int var) {
    const ExprNode& n = src[idx];
    auto cp = [&](int i) { return copy_into(out, src, i); };
    switch (n.op) {
        case ExprOp::Num: return out.num(0.0);
        case ExprOp::VarX: return out.num(var == 0 ? 1.0 : 0.0);
        case ExprOp::VarY: return out.num(var == 1 ? 1.0 : 0.0);
        case ExprOp::Add: return out.binary(ExprOp::Add, diff_node(out, src, n.a, var), diff_node(out, src, n.b, var));
        case ExprOp::Sub: return out.binary(ExprOp::Sub, diff_node(out, src, n.a, var), diff_node(out, src, n.b, var));
        case ExprOp::Mul: {
            int da = diff_node(out, src, n.a, var);
            int db = diff_node(out, src, n.b, var);
            return out.binary(ExprOp::Add, out.binary(ExprOp::Mul, da, cp(n.b)),
                              out.binary(ExprOp::Mul, cp(n.a), db));
        }
        case ExprOp::Div: {
            // (a/b)' = (a'b - a b') / b^2
            int da = diff_node(out, src, n.a, var);
            int db = diff_node(out, src, n.b, var);
            int numtr = out.binary(ExprOp::Sub, out.binary(ExprOp::Mul, da, cp(n.b)),
                                   out.binary(ExprOp::Mul, cp(n.a), db));
            int den = out.binary(ExprOp::Mul, cp(n.b), cp(n.b));
            return out.binary(ExprOp::Div, numtr, den);
        }
        case ExprOp::Pow: {
            if (src[n.b].op == ExprOp::Num) {
                // c f^(c-1) f'
                double c = src[n.b].value;
                int da = diff_node(out, src, n.a, var);
                int p = out.binary(ExprOp::Pow, cp(n.a), out.num(c - 1.0));
                return out.binary(ExprOp::Mul, out.binary(ExprOp::Mul, out.num(c), p), da);
            }
            // f^g (g' log f + g f'/f)
            int da = diff_node(out, src, n.a, var);
            int dg = diff_node(out, src, n.b, var);
            int t1 = out.binary(ExprOp::Mul, dg, out.unary(ExprOp::Log, cp(n.a)));
            int t2 = out.binary(ExprOp::Div, out.binary(ExprOp::Mul, cp(n.b), da), cp(n.a));
            return out.binary(ExprOp::Mul, out.binary(ExprOp::Pow, cp(n.a), cp(n.b)),
                              out.binary(ExprOp::Add, t1, t2));
        }
        case ExprOp::Neg: return out.unary(ExprOp::Neg, diff_node(out, src, n.a, var));
        case ExprOp::Exp:
            return out.binary(ExprOp::Mul, out.unary(ExprOp::Exp, cp(n.a)), diff_node(out, src, n.a, var));
        case ExprOp::Log: return out.binary(ExprOp::Div, diff_node(out, src, n.a, var), cp(n.a));
        case ExprOp::Sin:
            return out.binary(ExprOp::Mul, out.unary(ExprOp::Cos, cp(n.a)), diff_node(out, src, n.a, var));
        case ExprOp::Cos:
            return out.unary(ExprOp::Neg, out.binary(ExprOp::Mul, out.unary(ExprOp::Sin, cp(n.a)),
                                                     diff_node(out, src, n.a, var)));
        case ExprOp::Sqrt: {
            // f' / (2 sqrt f)
            int da = diff_node(out, src, n.a, var);
            int den = out.binary(ExprOp::Mul, out.num(2.0), out.unary(ExprOp::Sqrt, cp(n.a)));
            return out.binary(ExprOp::Div, da, den);
        }
    }
    throw Error("corrupt expression node");
}

}  // namespace

Expression Expression::derivative(int var) const {
    if (empty()) throw Error("empty expression");
    ExprBuilder b;
    int root = diff_node(b, nodes_, root_, var);
    return b.take(root);
}

// ---------------------------------------------------------------------------
// Pretty printing with minimal parentheses; parse(pretty(e)) == e structurally.

namespace {
int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;
    }
}
}  // namespace

std::string Expression::pretty_node(int idx, int parent_prec, bool right_side) const {
    const ExprNode& n = nodes_[idx];
    std::string s;
    int prec = precedence(n.op);
    switch (n.op) {
        case ExprOp::Num: {
            char buf[40];
            if (n.value == double(long(n.value)) && std::abs(n.value) < 1e15)
                std::snprintf(buf, sizeof buf, "%ld", long(n.value));
            else
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
            s = buf;
            if (n.value < 0.0) {
                prec = precedence(ExprOp::Neg);
                s = "(" + s + ")";
                return s;
            }
            return s;
        }
        case ExprOp::VarX: return "x";
        case ExprOp::VarY: return "y";
        case ExprOp::Add:
            s = pretty_node(n.a, prec, false) + " + " + pretty_node(n.b, prec, true);
            break;
        case ExprOp::Sub:
            s = pretty_node(n.a, prec, false) + " - " + pretty_node(n.b, prec + 1, true);
            break;
        case ExprOp::Mul:
            s = pretty_node(n.a, prec, false) + "*" + pretty_node(n.b, prec, true);
            break;
        case ExprOp::Div:
            s = pretty_node(n.a, prec, false) + "/" + pretty_node(n.b, prec + 1, true);
            break;
        case ExprOp::Pow:
            // right associative: left child needs parens at equal precedence
            s = pretty_node(n.a, prec + 1, false) + "^" + pretty_node(n.b, prec, true);
            break;
        case ExprOp::Neg: s = "-" + pretty_node(n.a, prec, true); break;
        case ExprOp::Exp: return "exp(" + pretty_node(n.a, 0, false) + ")";
        case ExprOp::Log: return "log(" + pretty_node(n.a, 0, false) + ")";
        case ExprOp::Sin: return "sin(" + pretty_node(n.a, 0, false) + ")";
        case ExprOp::Cos: return "cos(" + pretty_node(n.a, 0, false) + ")";
        case ExprOp::Sqrt: return "sqrt(" + pretty_node(n.a, 0, false) + ")";
    }
    if (prec < parent_prec || (prec == parent_prec && right_side && prec <= 2))
        s = "(" + s + ")";
    return s;
}

std::string Expression::pretty() const {
    if (empty()) return "";
    return pretty_node(root_, 0, false);
}

namespace {
bool nodes_equal(const std::vector<ExprNode>& an, int a, const std::vector<ExprNode>& bn, int b) {
    const ExprNode& na = an[a];
    const ExprNode& nb = bn[b];
    if (na.op != nb.op) return false;
    if (na.op == ExprOp::Num) return na.value == nb.value;
    if (na.op == ExprOp::VarX || na.op == ExprOp::VarY) return true;
    if (na.b == 0 && nb.b == 0) return nodes_equal(an, na.a, bn, nb.a);
    if (na.b == 0 || nb.b == 0) return false;
    return nodes_equal(an, na.a, bn, nb.a) && nodes_equal(an, na.b, bn, nb.b);
}
}  // namespace

bool Expression::equals(const Expression& other) const {
    if (empty() || other.empty()) return empty() == other.empty();
    return nodes_equal(nodes_, root_, other.nodes_, other.root_);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Parser {
    const std::string& text;
    std::size_t pos = 0;
    ExprBuilder b;

    explicit Parser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& what) { throw ParseError(what, pos); }

    int parse_sum() {
        int lhs = parse_product();
        for (;;) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos;
                int rhs = parse_product();
                lhs = b.binary(c == '+' ? ExprOp::Add : ExprOp::Sub, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    int parse_product() {
        int lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos;
                int rhs = parse_unary();
                lhs = b.binary(c == '*' ? ExprOp::Mul : ExprOp::Div, lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        if (peek() == '-') {
            ++pos;
            return b.unary(ExprOp::Neg, parse_unary());
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        if (peek() == '^') {
            ++pos;
            // right associative; allow unary minus in the exponent
            int expo = peek() == '-' ? (++pos, b.unary(ExprOp::Neg, parse_power())) : parse_power();
            return b.binary(ExprOp::Pow, base, expo);
        }
        return base;
    }

    int parse_atom() {
        char c = peek();
        if (c == '\0') fail("unexpected end of input");
        if (c == '(') {
            ++pos;
            int inner = parse_sum();
            if (peek() != ')') fail("expected ')'");
            ++pos;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        fail("unexpected character");
    }

    int parse_number() {
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            } else {
                pos = mark;  // 'e' was not an exponent
            }
        }
        if (pos == start) fail("malformed number");
        return b.num(std::stod(text.substr(start, pos - start)));
    }

    int parse_ident() {
        std::size_t start = pos;
        while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
        std::string name = text.substr(start, pos - start);
        if (name == "x") return b.var(0);
        if (name == "y") return b.var(1);
        ExprOp op;
        if (name == "exp") op = ExprOp::Exp;
        else if (name == "log") op = ExprOp::Log;
        else if (name == "sin") op = ExprOp::Sin;
        else if (name == "cos") op = ExprOp::Cos;
        else if (name == "sqrt") op = ExprOp::Sqrt;
        else {
            pos = start;
            fail("unknown identifier '" + name + "'");
        }
        if (peek() != '(') fail("expected '(' after function name");
        ++pos;
        int arg = parse_sum();
        if (peek() != ')') fail("expected ')'");
        ++pos;
        return b.unary(op, arg);
    }
};

}  // namespace

Expression parse_expression(const std::string& text) {
    Parser p(text);
    int root = p.parse_sum();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return p.b.take(root);
}

}  // namespace geotomo
