#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "percas/domain.hpp"

namespace percas {

// Small infix expression language for forcing/IC/BC functions.
// Grammar: + - * / ^ (right assoc), unary minus, parentheses,
// variables x and t, constant pi, functions sin cos exp sigmoid.
class Expression {
  public:
    Expression() : root_(std::make_shared<Node>()) {}  // constant 0

    static Expression parse(const std::string& text) {
        Parser p(text);
        Expression e;
        e.root_ = p.parse_expr();
        p.expect_end();
        e.text_ = text;
        return e;
    }
    static Expression constant(real c) {
        Expression e;
        e.root_->kind = Kind::number;
        e.root_->value = c;
        e.text_ = std::to_string(c);
        return e;
    }

    real operator()(real x, real t) const { return eval(*root_, x, t); }
    const std::string& text() const { return text_; }

  private:
    enum class Kind { number, var_x, var_t, add, sub, mul, div, pow, neg, sin, cos, exp, sigmoid };

    struct Node {
        Kind kind = Kind::number;
        real value = 0.0;
        std::shared_ptr<Node> a, b;
    };
    using NodePtr = std::shared_ptr<Node>;

    static real eval(const Node& n, real x, real t) {
        switch (n.kind) {
            case Kind::number: return n.value;
            case Kind::var_x: return x;
            case Kind::var_t: return t;
            case Kind::add: return eval(*n.a, x, t) + eval(*n.b, x, t);
            case Kind::sub: return eval(*n.a, x, t) - eval(*n.b, x, t);
            case Kind::mul: return eval(*n.a, x, t) * eval(*n.b, x, t);
            case Kind::div: return eval(*n.a, x, t) / eval(*n.b, x, t);
            case Kind::pow: return std::pow(eval(*n.a, x, t), eval(*n.b, x, t));
            case Kind::neg: return -eval(*n.a, x, t);
            case Kind::sin: return std::sin(eval(*n.a, x, t));
            case Kind::cos: return std::cos(eval(*n.a, x, t));
            case Kind::exp: return std::exp(eval(*n.a, x, t));
            case Kind::sigmoid: return 1.0 / (1.0 + std::exp(-eval(*n.a, x, t)));
        }
        return 0.0;
    }

    class Parser {
      public:
        explicit Parser(const std::string& s) : s_(s) {}

        NodePtr parse_expr() {  // additive
            NodePtr lhs = parse_term();
            for (;;) {
                skip_ws();
                if (peek() == '+' || peek() == '-') {
                    char op = get();
                    NodePtr rhs = parse_term();
                    lhs = make(op == '+' ? Kind::add : Kind::sub, lhs, rhs);
                } else {
                    return lhs;
                }
            }
        }
        void expect_end() {
            skip_ws();
            if (pos_ < s_.size())
                throw std::invalid_argument("expression: trailing input at '" + s_.substr(pos_) + "'");
        }

      private:
        NodePtr parse_term() {  // multiplicative
            NodePtr lhs = parse_unary();
            for (;;) {
                skip_ws();
                if (peek() == '*' || peek() == '/') {
                    char op = get();
                    NodePtr rhs = parse_unary();
                    lhs = make(op == '*' ? Kind::mul : Kind::div, lhs, rhs);
                } else {
                    return lhs;
                }
            }
        }
        NodePtr parse_unary() {
            skip_ws();
            if (peek() == '-') {
                get();
                return make(Kind::neg, parse_unary(), nullptr);
            }
            if (peek() == '+') get();
            return parse_power();
        }
        NodePtr parse_power() {
            NodePtr base = parse_atom();
            skip_ws();
            if (peek() == '^') {
                get();
                return make(Kind::pow, base, parse_unary());  // right assoc
            }
            return base;
        }
        NodePtr parse_atom() {
            skip_ws();
            char c = peek();
            if (c == '(') {
                get();
                NodePtr e = parse_expr();
                skip_ws();
                if (get() != ')') throw std::invalid_argument("expression: missing ')'");
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
            throw std::invalid_argument(std::string("expression: unexpected character '") + c + "'");
        }
        NodePtr parse_number() {
            std::size_t end = pos_;
            while (end < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                    s_[end] == 'e' || s_[end] == 'E' ||
                    ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                     (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
                ++end;
            NodePtr n = std::make_shared<Node>();
            n->kind = Kind::number;
            n->value = std::stod(s_.substr(pos_, end - pos_));
            pos_ = end;
            return n;
        }
        NodePtr parse_ident() {
            std::size_t end = pos_;
            while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
            std::string name = s_.substr(pos_, end - pos_);
            pos_ = end;
            if (name == "x") return make_leaf(Kind::var_x);
            if (name == "t") return make_leaf(Kind::var_t);
            if (name == "pi") {
                NodePtr n = std::make_shared<Node>();
                n->kind = Kind::number;
                n->value = real(M_PI);
                return n;
            }
            Kind k;
            if (name == "sin") k = Kind::sin;
            else if (name == "cos") k = Kind::cos;
            else if (name == "exp") k = Kind::exp;
            else if (name == "sigmoid") k = Kind::sigmoid;
            else throw std::invalid_argument("expression: unknown identifier '" + name + "'");
            skip_ws();
            if (get() != '(') throw std::invalid_argument("expression: '" + name + "' needs '('");
            NodePtr arg = parse_expr();
            skip_ws();
            if (get() != ')') throw std::invalid_argument("expression: missing ')' after " + name);
            return make(k, arg, nullptr);
        }

        static NodePtr make(Kind k, NodePtr a, NodePtr b) {
            NodePtr n = std::make_shared<Node>();
            n->kind = k;
            n->a = std::move(a);
            n->b = std::move(b);
            return n;
        }
        static NodePtr make_leaf(Kind k) {
            NodePtr n = std::make_shared<Node>();
            n->kind = k;
            return n;
        }
        void skip_ws() {
            while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }
        char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
        char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }

        const std::string& s_;
        std::size_t pos_ = 0;
    };

    NodePtr root_;
    std::string text_ = "0";
};

// Scalar function of (x, t); conditions use only one of the two variables.
using ScalarField = std::function<real(real, real)>;

}  // namespace percas
