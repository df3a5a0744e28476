#include "rms/lexer.hpp"

#include <array>
#include <cctype>

namespace rms {

FrontendError::FrontendError(FrontendStage stage, std::string file, SourcePos pos, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message),
      stage_(stage),
      file_(std::move(file)),
      pos_(pos),
      detail_(message) {}

namespace {

constexpr std::array<std::string_view, 16> kKeywords = {
    "class", "extends", "final", "static", "abstract", "void", "throws", "var",
    "this",  "super",   "return", "if",   "else",     "while", "new",   "null",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

}  // namespace

std::string to_string(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::kIdent: return "ident:" + tok.text;
    case TokenKind::kString: return "str:\"" + tok.text + "\"";
    case TokenKind::kKeyword: return "kw:" + tok.text;
    case TokenKind::kAt: return "at";
    case TokenKind::kLBrace: return "lbrace";
    case TokenKind::kRBrace: return "rbrace";
    case TokenKind::kLParen: return "lparen";
    case TokenKind::kRParen: return "rparen";
    case TokenKind::kSemi: return "semi";
    case TokenKind::kColon: return "colon";
    case TokenKind::kComma: return "comma";
    case TokenKind::kDot: return "dot";
    case TokenKind::kAssign: return "assign";
    case TokenKind::kStar: return "star";
    case TokenKind::kEof: return "eof";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view text, const std::string& file) {
  std::vector<Token> out;
  std::size_t i = 0;
  SourcePos pos;

  auto advance = [&](std::size_t n = 1) {
    for (; n > 0 && i < text.size(); --n, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance();
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance();
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      SourcePos start = pos;
      advance(2);
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) advance();
      if (i + 1 >= text.size()) throw LexError(file, start, "unterminated comment");
      advance(2);
      continue;
    }

    Token tok;
    tok.pos = pos;
    if (is_ident_start(c)) {
      std::size_t start = i;
      while (i < text.size() && is_ident_char(text[i])) advance();
      tok.text = std::string(text.substr(start, i - start));
      bool kw = false;
      for (auto k : kKeywords) kw = kw || k == tok.text;
      tok.kind = kw ? TokenKind::kKeyword : TokenKind::kIdent;
      out.push_back(std::move(tok));
      continue;
    }
    if (c == '"') {
      advance();
      std::size_t start = i;
      while (i < text.size() && text[i] != '"' && text[i] != '\n') advance();
      if (i >= text.size() || text[i] != '"') throw LexError(file, tok.pos, "unterminated string literal");
      tok.kind = TokenKind::kString;
      tok.text = std::string(text.substr(start, i - start));
      advance();
      out.push_back(std::move(tok));
      continue;
    }

    switch (c) {
      case '@': tok.kind = TokenKind::kAt; break;
      case '{': tok.kind = TokenKind::kLBrace; break;
      case '}': tok.kind = TokenKind::kRBrace; break;
      case '(': tok.kind = TokenKind::kLParen; break;
      case ')': tok.kind = TokenKind::kRParen; break;
      case ';': tok.kind = TokenKind::kSemi; break;
      case ':': tok.kind = TokenKind::kColon; break;
      case ',': tok.kind = TokenKind::kComma; break;
      case '.': tok.kind = TokenKind::kDot; break;
      case '=': tok.kind = TokenKind::kAssign; break;
      case '*': tok.kind = TokenKind::kStar; break;
      default: {
        std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + std::to_string(static_cast<unsigned char>(c));
        throw LexError(file, pos, "illegal character '" + shown + "'");
      }
    }
    tok.text = std::string(1, c);
    advance();
    out.push_back(std::move(tok));
  }
  out.push_back(Token{TokenKind::kEof, "", pos});
  return out;
}

}  // namespace rms
