#include "sparsenorm/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "sparsenorm/errors.hpp"

namespace sparsenorm {

namespace {

class Parser {
public:
    Parser(const std::string& text, const std::map<std::string, double>& vars) : text_(text), vars_(vars) {}

    double parse() {
        const double v = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression \"" + text_ + "\": " + msg);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double expression() {
        double v = term();
        for (;;) {
            if (accept('+'))
                v += term();
            else if (accept('-'))
                v -= term();
            else
                return v;
        }
    }

    double term() {
        double v = unary();
        for (;;) {
            if (accept('*')) {
                v *= unary();
            } else if (accept('/')) {
                const double d = unary();
                if (d == 0.0) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    double power() {
        const double base = primary();
        if (accept('^')) return std::pow(base, unary());  // right associative
        return base;
    }

    double primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end");
        const char c = text_[pos_];
        if (accept('(')) {
            const double v = expression();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            const double v = std::stod(text_.substr(pos_), &used);
            pos_ += used;
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (accept('(')) return call(name);
            auto it = vars_.find(name);
            if (it == vars_.end()) fail("unknown variable '" + name + "'");
            return it->second;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    double call(const std::string& name) {
        std::vector<double> args;
        if (!accept(')')) {
            do {
                args.push_back(expression());
            } while (accept(','));
            if (!accept(')')) fail("missing ')' after arguments of " + name);
        }
        auto unary_fn = [&](double (*fn)(double)) {
            if (args.size() != 1) fail(name + " takes one argument");
            return fn(args[0]);
        };
        if (name == "floor") return unary_fn(std::floor);
        if (name == "ceil") return unary_fn(std::ceil);
        if (name == "round") return unary_fn(std::round);
        if (name == "sqrt") return unary_fn(std::sqrt);
        if (name == "log") return unary_fn(std::log);
        if (name == "exp") return unary_fn(std::exp);
        if (name == "abs") return unary_fn(std::fabs);
        if (name == "min" || name == "max") {
            if (args.size() != 2) fail(name + " takes two arguments");
            return name == "min" ? std::min(args[0], args[1]) : std::max(args[0], args[1]);
        }
        fail("unknown function '" + name + "'");
    }

    const std::string& text_;
    const std::map<std::string, double>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(const std::string& text, const std::map<std::string, double>& vars) {
    const double v = Parser(text, vars).parse();
    if (!std::isfinite(v)) throw ConfigError("expression \"" + text + "\" is not finite");
    return v;
}

}  // namespace sparsenorm
