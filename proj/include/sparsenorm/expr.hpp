#pragma once

#include <map>
#include <string>

namespace sparsenorm {

/// Evaluates small arithmetic rules such as "n/2" or "floor(sqrt(p))".
/// Grammar: numbers, variables, + - * / ^, parentheses, unary minus and the
/// functions floor, ceil, round, sqrt, log, exp, abs, min, max.
/// Throws ConfigError on syntax errors or unknown names.
double evaluate_expression(const std::string& text, const std::map<std::string, double>& vars);

}  // namespace sparsenorm
