#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vwflow {

/// Syntax error in scenario text; line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

enum class Variable { t, x1, x2 };

/// Closed-form scalar expression in (t, x1, x2).
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numbers,
/// the variables t x1 x2, the constant pi and the functions sin cos exp sqrt abs.
/// Parsed once into a tree, then flattened to postfix code for evaluation.
class Expression {
public:
    /// Throws ParseError; `line` and `column_offset` locate `text` inside a larger document.
    static Expression parse(std::string_view text, int line = 1, int column_offset = 0);
    static Expression constant(double value);

    [[nodiscard]] double operator()(double t, double x1, double x2) const;

    /// Symbolic partial derivative, constant folded.
    [[nodiscard]] Expression derivative(Variable var) const;

    [[nodiscard]] std::optional<double> constant_value() const;
    [[nodiscard]] bool depends_on(Variable var) const;
    [[nodiscard]] const std::string& source() const { return source_; }

    friend bool operator==(const Expression& a, const Expression& b) { return a.source_ == b.source_; }

    struct Node;

private:
    struct Op {
        int code;
        double value;
    };

    Expression(std::shared_ptr<const Node> root, std::string source);
    void compile();

    std::shared_ptr<const Node> root_;
    std::string source_;
    std::vector<Op> code_;
    std::size_t stack_depth_ = 0;
};

}  // namespace vwflow
