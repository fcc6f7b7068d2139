#include "vwflow/expression.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace vwflow {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Sqrt, Abs, Log, Sign };

struct Expression::Node {
    Kind kind;
    double value = 0.0;
    Variable var = Variable::t;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

bool is_binary(Kind k) { return k >= Kind::Add && k <= Kind::Pow; }

double apply(Kind k, double a, double b) {
    switch (k) {
        case Kind::Neg: return -a;
        case Kind::Add: return a + b;
        case Kind::Sub: return a - b;
        case Kind::Mul: return a * b;
        case Kind::Div: return a / b;
        case Kind::Pow: return std::pow(a, b);
        case Kind::Sin: return std::sin(a);
        case Kind::Cos: return std::cos(a);
        case Kind::Exp: return std::exp(a);
        case Kind::Sqrt: return std::sqrt(a);
        case Kind::Abs: return std::abs(a);
        case Kind::Log: return std::log(a);
        case Kind::Sign: return static_cast<double>((a > 0.0) - (a < 0.0));
        default: return 0.0;
    }
}

NodePtr make_const(double v) { return std::make_shared<const Expression::Node>(Expression::Node{Kind::Const, v, Variable::t, nullptr, nullptr}); }
NodePtr make_var(Variable v) {
    return std::make_shared<const Expression::Node>(Expression::Node{Kind::Var, 0.0, v, nullptr, nullptr});
}
bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Const && n->value == v; }

NodePtr make_unary(Kind k, NodePtr a) {
    if (a->kind == Kind::Const) return make_const(apply(k, a->value, 0.0));
    if (k == Kind::Neg && a->kind == Kind::Neg) return a->a;
    return std::make_shared<const Expression::Node>(Expression::Node{k, 0.0, Variable::t, std::move(a), nullptr});
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
    if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(apply(k, a->value, b->value));
    switch (k) {
        case Kind::Add:
            if (is_const(a, 0.0)) return b;
            if (is_const(b, 0.0)) return a;
            break;
        case Kind::Sub:
            if (is_const(b, 0.0)) return a;
            if (is_const(a, 0.0)) return make_unary(Kind::Neg, b);
            break;
        case Kind::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
            if (is_const(a, 1.0)) return b;
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::Div:
            if (is_const(a, 0.0)) return make_const(0.0);
            if (is_const(b, 1.0)) return a;
            break;
        case Kind::Pow:
            if (is_const(b, 1.0)) return a;
            if (is_const(b, 0.0)) return make_const(1.0);
            break;
        default: break;
    }
    return std::make_shared<const Expression::Node>(Expression::Node{k, 0.0, Variable::t, std::move(a), std::move(b)});
}

NodePtr differentiate(const NodePtr& n, Variable v) {
    const auto& a = n->a;
    const auto& b = n->b;
    switch (n->kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Var: return make_const(n->var == v ? 1.0 : 0.0);
        case Kind::Neg: return make_unary(Kind::Neg, differentiate(a, v));
        case Kind::Add: return make_binary(Kind::Add, differentiate(a, v), differentiate(b, v));
        case Kind::Sub: return make_binary(Kind::Sub, differentiate(a, v), differentiate(b, v));
        case Kind::Mul:
            return make_binary(Kind::Add, make_binary(Kind::Mul, differentiate(a, v), b),
                               make_binary(Kind::Mul, a, differentiate(b, v)));
        case Kind::Div:
            return make_binary(Kind::Div,
                               make_binary(Kind::Sub, make_binary(Kind::Mul, differentiate(a, v), b),
                                           make_binary(Kind::Mul, a, differentiate(b, v))),
                               make_binary(Kind::Mul, b, b));
        case Kind::Pow: {
            if (b->kind == Kind::Const) {
                return make_binary(Kind::Mul,
                                   make_binary(Kind::Mul, b, make_binary(Kind::Pow, a, make_const(b->value - 1.0))),
                                   differentiate(a, v));
            }
            const NodePtr rate = make_binary(Kind::Add, make_binary(Kind::Mul, differentiate(b, v), make_unary(Kind::Log, a)),
                                             make_binary(Kind::Div, make_binary(Kind::Mul, b, differentiate(a, v)), a));
            return make_binary(Kind::Mul, n, rate);
        }
        case Kind::Sin: return make_binary(Kind::Mul, make_unary(Kind::Cos, a), differentiate(a, v));
        case Kind::Cos:
            return make_unary(Kind::Neg, make_binary(Kind::Mul, make_unary(Kind::Sin, a), differentiate(a, v)));
        case Kind::Exp: return make_binary(Kind::Mul, n, differentiate(a, v));
        case Kind::Sqrt:
            return make_binary(Kind::Div, differentiate(a, v), make_binary(Kind::Mul, make_const(2.0), n));
        case Kind::Abs: return make_binary(Kind::Mul, make_unary(Kind::Sign, a), differentiate(a, v));
        case Kind::Log: return make_binary(Kind::Div, differentiate(a, v), a);
        case Kind::Sign: return make_const(0.0);
    }
    return make_const(0.0);
}

bool depends(const NodePtr& n, Variable v) {
    if (!n) return false;
    if (n->kind == Kind::Var) return n->var == v;
    return depends(n->a, v) || depends(n->b, v);
}

std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), end);
    return v < 0.0 ? "(" + s + ")" : s;
}

std::string to_text(const NodePtr& n) {
    static constexpr const char* kFunc[] = {"sin", "cos", "exp", "sqrt", "abs", "log", "sign"};
    static constexpr const char* kVar[] = {"t", "x1", "x2"};
    switch (n->kind) {
        case Kind::Const: return format_number(n->value);
        case Kind::Var: return kVar[static_cast<int>(n->var)];
        case Kind::Neg: return "(-" + to_text(n->a) + ")";
        case Kind::Add: return "(" + to_text(n->a) + " + " + to_text(n->b) + ")";
        case Kind::Sub: return "(" + to_text(n->a) + " - " + to_text(n->b) + ")";
        case Kind::Mul: return "(" + to_text(n->a) + " * " + to_text(n->b) + ")";
        case Kind::Div: return "(" + to_text(n->a) + " / " + to_text(n->b) + ")";
        case Kind::Pow: return "(" + to_text(n->a) + " ^ " + to_text(n->b) + ")";
        default:
            return std::string(kFunc[static_cast<int>(n->kind) - static_cast<int>(Kind::Sin)]) + "(" +
                   to_text(n->a) + ")";
    }
}

class Parser {
public:
    Parser(std::string_view text, int line, int column_offset)
        : text_(text), line_(line), offset_(column_offset) {}

    NodePtr parse() {
        NodePtr root = expr();
        skip_space();
        if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, line_, offset_ + static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_binary(Kind::Add, lhs, term());
            else if (accept('-')) lhs = make_binary(Kind::Sub, lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_binary(Kind::Mul, lhs, unary());
            else if (accept('/')) lhs = make_binary(Kind::Div, lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_unary(Kind::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make_binary(Kind::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return make_const(value);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);
        if (name == "t") return make_var(Variable::t);
        if (name == "x1") return make_var(Variable::x1);
        if (name == "x2") return make_var(Variable::x2);
        if (name == "pi") return make_const(std::numbers::pi);
        Kind k;
        if (name == "sin") k = Kind::Sin;
        else if (name == "cos") k = Kind::Cos;
        else if (name == "exp") k = Kind::Exp;
        else if (name == "sqrt") k = Kind::Sqrt;
        else if (name == "abs") k = Kind::Abs;
        else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make_unary(k, arg);
    }

    std::string_view text_;
    int line_;
    int offset_;
    std::size_t pos_ = 0;
};

// Postfix opcodes: 0 push constant, 1..3 push variable, otherwise 16 + Kind.
constexpr int kPushConst = 0;
constexpr int kPushVar = 1;
constexpr int kApply = 16;

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {
    compile();
}

Expression Expression::parse(std::string_view text, int line, int column_offset) {
    std::size_t b = 0, e = text.size();
    while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
    while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t')) --e;
    Parser parser(text.substr(b, e - b), line, column_offset + static_cast<int>(b));
    NodePtr root = parser.parse();
    return Expression(std::move(root), std::string(text.substr(b, e - b)));
}

Expression Expression::constant(double value) {
    NodePtr n = make_const(value);
    return Expression(n, to_text(n));
}

void Expression::compile() {
    code_.clear();
    std::size_t depth = 0;
    stack_depth_ = 0;
    auto emit = [&](auto&& self, const NodePtr& n) -> void {
        if (n->kind == Kind::Const) {
            code_.push_back({kPushConst, n->value});
            stack_depth_ = std::max(stack_depth_, ++depth);
            return;
        }
        if (n->kind == Kind::Var) {
            code_.push_back({kPushVar + static_cast<int>(n->var), 0.0});
            stack_depth_ = std::max(stack_depth_, ++depth);
            return;
        }
        self(self, n->a);
        if (is_binary(n->kind)) {
            self(self, n->b);
            --depth;
        }
        code_.push_back({kApply + static_cast<int>(n->kind), 0.0});
    };
    emit(emit, root_);
}

double Expression::operator()(double t, double x1, double x2) const {
    constexpr std::size_t kInline = 32;
    std::array<double, kInline> small{};
    std::vector<double> big;
    double* stack = small.data();
    if (stack_depth_ > kInline) {
        big.resize(stack_depth_);
        stack = big.data();
    }
    std::size_t top = 0;
    const double vars[3] = {t, x1, x2};
    for (const Op& op : code_) {
        if (op.code == kPushConst) {
            stack[top++] = op.value;
        } else if (op.code < kApply) {
            stack[top++] = vars[op.code - kPushVar];
        } else {
            const Kind k = static_cast<Kind>(op.code - kApply);
            if (is_binary(k)) {
                --top;
                stack[top - 1] = apply(k, stack[top - 1], stack[top]);
            } else {
                stack[top - 1] = apply(k, stack[top - 1], 0.0);
            }
        }
    }
    return stack[0];
}

Expression Expression::derivative(Variable var) const {
    NodePtr d = differentiate(root_, var);
    return Expression(d, to_text(d));
}

std::optional<double> Expression::constant_value() const {
    if (root_->kind == Kind::Const) return root_->value;
    return std::nullopt;
}

bool Expression::depends_on(Variable var) const { return depends(root_, var); }

}  // namespace vwflow
