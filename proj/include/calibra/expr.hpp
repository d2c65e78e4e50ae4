#pragma once

#include <functional>
#include <string>

namespace calibra {

/// Parses an arithmetic expression in the identifiers u, v with operators
/// + - * / ^ and the functions sin, cos, cosh, sinh, exp, sqrt.
/// Throws calibra::Error (name "ParseError") on malformed input.
std::function<double(double, double)> parse_expression(const std::string& text);

}  // namespace calibra
