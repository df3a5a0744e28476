#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rms/source.hpp"

namespace rms {

enum class TokenKind {
  kIdent,
  kString,
  kKeyword,
  kAt,
  kLBrace,
  kRBrace,
  kLParen,
  kRParen,
  kSemi,
  kColon,
  kComma,
  kDot,
  kAssign,
  kStar,
  kEof,
};

struct Token {
  TokenKind kind = TokenKind::kEof;
  std::string text;  // identifier/keyword spelling, or the unquoted string literal
  SourcePos pos;

  [[nodiscard]] bool is_keyword(std::string_view kw) const {
    return kind == TokenKind::kKeyword && text == kw;
  }
};

/// Renders a token the way diagnostics and tests spell it: `kw:class`,
/// `ident:A`, `str:"close"`, `lbrace`, ...
std::string to_string(const Token& tok);

/// Splits `text` into tokens, dropping whitespace and comments. The trailing
/// kEof token is included.
std::vector<Token> tokenize(std::string_view text, const std::string& file = "<input>");

}  // namespace rms
