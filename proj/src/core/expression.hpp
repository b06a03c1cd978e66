#pragma once

#include "core/function.hpp"

#include <memory>
#include <string>
#include <vector>

namespace attrikit {

// Parses the CLI's small expression grammar (attrikit-expr/1):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?
//   unary  := ('-'|'+')* primary
//   primary:= number | variable | name '(' expr ')' | '(' expr ')'
// Functions: sin, cos, exp, relu. Variables are given by name.
FuncPtr parse_expression(const std::string& text, const std::vector<std::string>& variables);

// Convenience for d-dimensional functions over variables x1..xd.
FuncPtr parse_expression(const std::string& text, int dim);

}  // namespace attrikit
