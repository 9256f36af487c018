#pragma once

#include <functional>
#include <string>

namespace parec {

/// Compile a one-variable arithmetic expression in `s` into a callable.
/// Supports + - * / ^ (right associative), parentheses, numeric literals, and
/// abs, sqrt, sin, cos, tan, exp, log, tanh. Throws std::invalid_argument
/// naming the offending position on parse errors.
std::function<double(double)> compile_expression(const std::string& text);

}  // namespace parec
