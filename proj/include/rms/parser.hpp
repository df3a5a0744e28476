#pragma once

#include <span>
#include <string>

#include "rms/ast.hpp"
#include "rms/lexer.hpp"

namespace rms {

SourceUnit parse(std::span<const Token> tokens, const std::string& path = "<input>");

/// tokenize + parse.
SourceUnit parse_source(std::string_view text, const std::string& path = "<input>");

}  // namespace rms
