#pragma once

#include <string>
#include <string_view>

#include "conpredict/minicc/ast.hpp"

namespace conpredict::minicc {

/// Parses and resolves MiniCC source. Throws ParseError carrying line/column
/// diagnostics for syntax errors, unresolved names, duplicate declarations,
/// type mismatches, misuse of builtins and unreachable statements.
SourceUnit parse(std::string_view source_text);

SourceUnit parse_file(const std::string& path);

/// Canonical source rendering. parse(print(u)) is structurally identical to u.
std::string print(const SourceUnit& unit);
std::string print(const Stmt& stmt, int indent = 0);
std::string print(const Expr& expr);

}  // namespace conpredict::minicc
