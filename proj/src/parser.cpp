#include "rms/parser.hpp"

namespace rms {

namespace {

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::string path) : toks_(tokens), path_(std::move(path)) {
    if (toks_.empty() || toks_.back().kind != TokenKind::kEof) throw ParseError(path_, {}, "token stream not terminated");
  }

  SourceUnit unit() {
    SourceUnit u;
    u.path = path_;
    while (peek().kind != TokenKind::kEof) u.classes.push_back(class_decl());
    return u;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t at = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[at];
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at(TokenKind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool at_kw(std::string_view kw, std::size_t ahead = 0) const { return peek(ahead).is_keyword(kw); }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(path_, peek().pos, "expected " + expected + ", found " + to_string(peek()));
  }
  const Token& expect(TokenKind k, const char* what) {
    if (!at(k)) fail(what);
    return next();
  }
  void expect_kw(std::string_view kw) {
    if (!at_kw(kw)) fail("'" + std::string(kw) + "'");
    next();
  }
  std::string ident(const char* what = "identifier") { return expect(TokenKind::kIdent, what).text; }

  std::vector<Annotation> annotations() {
    std::vector<Annotation> out;
    while (at(TokenKind::kAt)) {
      Annotation a;
      a.pos = next().pos;
      const Token& name = expect(TokenKind::kIdent, "annotation name");
      if (name.text == "MustCall") {
        a.kind = AnnotKind::kMustCall;
        expect(TokenKind::kLParen, "'('");
        if (!at(TokenKind::kRParen)) a.methods = strings();
        expect(TokenKind::kRParen, "')'");
      } else if (name.text == "Calls") {
        a.kind = AnnotKind::kCalls;
        expect(TokenKind::kLParen, "'('");
        a.exprs = strings();
        expect(TokenKind::kSemi, "';'");
        a.methods = strings();
        expect(TokenKind::kRParen, "')'");
      } else if (name.text == "Owning") {
        a.kind = AnnotKind::kOwning;
      } else if (name.text == "NotOwning") {
        a.kind = AnnotKind::kNotOwning;
      } else if (name.text == "ResourceAlias") {
        a.kind = AnnotKind::kResourceAlias;
      } else {
        throw ParseError(path_, name.pos, "unknown annotation @" + name.text);
      }
      out.push_back(std::move(a));
    }
    return out;
  }

  std::vector<std::string> strings() {
    std::vector<std::string> out{expect(TokenKind::kString, "string literal").text};
    while (at(TokenKind::kComma)) {
      next();
      out.push_back(expect(TokenKind::kString, "string literal").text);
    }
    return out;
  }

  ClassDecl class_decl() {
    ClassDecl c;
    c.annots = annotations();
    c.pos = peek().pos;
    expect_kw("class");
    c.name = ident("class name");
    if (at_kw("extends")) {
      next();
      c.superclass = ident("superclass name");
    }
    expect(TokenKind::kLBrace, "'{'");
    while (!at(TokenKind::kRBrace)) {
      if (at(TokenKind::kEof)) fail("'}'");
      member(c);
    }
    next();
    return c;
  }

  void member(ClassDecl& c) {
    auto annots = annotations();
    SourcePos pos = peek().pos;
    if (at_kw("final") || (at(TokenKind::kIdent) && at(TokenKind::kColon, 1))) {
      FieldDecl f;
      f.annots = std::move(annots);
      f.pos = pos;
      if (at_kw("final")) {
        next();
        f.is_final = true;
      }
      f.name = ident("field name");
      expect(TokenKind::kColon, "':'");
      f.type_name = ident("field type");
      expect(TokenKind::kSemi, "';'");
      c.fields.push_back(std::move(f));
      return;
    }

    MethodDecl m;
    m.annots = std::move(annots);
    m.pos = pos;
    if (at(TokenKind::kIdent) && peek().text == c.name && at(TokenKind::kLParen, 1)) {
      m.kind = MethodKind::kConstructor;
      m.name = next().text;
    } else {
      if (at_kw("static")) {
        next();
        m.kind = MethodKind::kStatic;
      } else if (at_kw("abstract")) {
        next();
        m.kind = MethodKind::kAbstract;
      }
      if (at_kw("void")) {
        next();
      } else if (at(TokenKind::kIdent)) {
        m.return_type = next().text;
      } else {
        fail("return type, field or constructor");
      }
      m.name = ident("method name");
    }
    expect(TokenKind::kLParen, "'('");
    if (!at(TokenKind::kRParen)) {
      m.params.push_back(param());
      while (at(TokenKind::kComma)) {
        next();
        m.params.push_back(param());
      }
    }
    expect(TokenKind::kRParen, "')'");
    if (at_kw("throws")) {
      next();
      m.may_throw = true;
    }
    if (at(TokenKind::kSemi)) {
      next();
    } else {
      m.body = block();
    }
    if (m.kind == MethodKind::kConstructor) {
      c.constructors.push_back(std::move(m));
    } else {
      c.methods.push_back(std::move(m));
    }
  }

  ParamDecl param() {
    ParamDecl p;
    p.annots = annotations();
    p.pos = peek().pos;
    p.name = ident("parameter name");
    expect(TokenKind::kColon, "':'");
    p.type_name = ident("parameter type");
    return p;
  }

  Block block() {
    expect(TokenKind::kLBrace, "'{'");
    Block b;
    while (!at(TokenKind::kRBrace)) {
      if (at(TokenKind::kEof)) fail("'}'");
      b.push_back(stmt());
    }
    next();
    return b;
  }

  Operand operand() {
    if (at_kw("this")) {
      next();
      expect(TokenKind::kDot, "'.'");
      return Operand::this_field(ident("field name"));
    }
    return Operand::var(ident("variable name"));
  }

  std::vector<Operand> args() {
    expect(TokenKind::kLParen, "'('");
    std::vector<Operand> out;
    if (!at(TokenKind::kRParen)) {
      out.push_back(operand());
      while (at(TokenKind::kComma)) {
        next();
        out.push_back(operand());
      }
    }
    expect(TokenKind::kRParen, "')'");
    return out;
  }

  // Called with the cursor on the method-name identifier.
  CallExpr finish_call(ReceiverKind kind, std::string receiver) {
    CallExpr call;
    call.receiver_kind = kind;
    call.receiver = std::move(receiver);
    call.method = ident("method name");
    call.args = args();
    return call;
  }

  void condition() {
    expect(TokenKind::kLParen, "'('");
    expect(TokenKind::kStar, "'*'");
    expect(TokenKind::kRParen, "')'");
  }

  Rhs rhs() {
    if (at_kw("new")) {
      next();
      NewExpr n;
      n.class_name = ident("class name");
      n.args = args();
      return n;
    }
    if (at_kw("null")) {
      next();
      return NullExpr{};
    }
    if (at_kw("this")) {
      // this.f | this.f.m(..) | this.m(..)
      if (!at(TokenKind::kDot, 1) || !at(TokenKind::kIdent, 2)) {
        next();
        fail("'.' and a name after 'this'");
      }
      if (at(TokenKind::kLParen, 3)) {
        next();
        next();
        return finish_call(ReceiverKind::kImplicitThis, "");
      }
      if (at(TokenKind::kDot, 3)) {
        next();
        next();
        std::string f = next().text;
        next();
        return finish_call(ReceiverKind::kThisField, f);
      }
      return ReadExpr{operand()};
    }
    if (at(TokenKind::kIdent) && at(TokenKind::kLParen, 1)) return finish_call(ReceiverKind::kImplicitThis, "");
    if (at(TokenKind::kIdent) && at(TokenKind::kDot, 1)) {
      std::string recv = next().text;
      next();
      return finish_call(ReceiverKind::kVariable, recv);
    }
    if (at(TokenKind::kIdent)) return ReadExpr{Operand::var(next().text)};
    fail("expression");
  }

  Stmt stmt() {
    Stmt s;
    s.id = StmtId(next_id_++);
    s.pos = peek().pos;
    if (at_kw("var")) {
      next();
      AssignStmt a;
      a.declares = true;
      a.var = ident("variable name");
      expect(TokenKind::kAssign, "'='");
      a.rhs = rhs();
      expect(TokenKind::kSemi, "';'");
      s.form = std::move(a);
    } else if (at_kw("return")) {
      next();
      ReturnStmt r;
      if (!at(TokenKind::kSemi)) {
        Rhs e = rhs();
        if (auto* read = std::get_if<ReadExpr>(&e)) {
          r.value = std::move(read->source);
        } else if (std::holds_alternative<NullExpr>(e)) {
          fail("variable, allocation or call after 'return'");
        } else {
          r.expr = std::move(e);
        }
      }
      expect(TokenKind::kSemi, "';'");
      s.form = std::move(r);
    } else if (at_kw("if")) {
      next();
      condition();
      IfStmt i;
      i.then_block = block();
      if (at_kw("else")) {
        next();
        i.has_else = true;
        i.else_block = block();
      }
      s.form = std::move(i);
    } else if (at_kw("while")) {
      next();
      condition();
      s.form = WhileStmt{block()};
    } else if ((at_kw("this") || at_kw("super")) && at(TokenKind::kLParen, 1)) {
      CtorCallStmt c;
      c.is_super = next().text == "super";
      c.args = args();
      expect(TokenKind::kSemi, "';'");
      s.form = std::move(c);
    } else if (at_kw("this") && at(TokenKind::kDot, 1) && at(TokenKind::kIdent, 2) && at(TokenKind::kAssign, 3)) {
      next();
      next();
      FieldWriteStmt w;
      w.field = next().text;
      next();
      if (at_kw("null")) {
        next();
      } else {
        w.value = ident("variable name or 'null'");
      }
      expect(TokenKind::kSemi, "';'");
      s.form = std::move(w);
    } else if (at(TokenKind::kIdent) && at(TokenKind::kAssign, 1)) {
      AssignStmt a;
      a.var = next().text;
      next();
      a.rhs = rhs();
      expect(TokenKind::kSemi, "';'");
      s.form = std::move(a);
    } else {
      Rhs r = rhs();
      auto* call = std::get_if<CallExpr>(&r);
      if (call == nullptr) throw ParseError(path_, s.pos, "expected statement; only calls may stand alone");
      expect(TokenKind::kSemi, "';'");
      s.form = CallStmt{std::move(*call)};
    }
    return s;
  }

  std::span<const Token> toks_;
  std::string path_;
  std::size_t pos_ = 0;
  int next_id_ = 0;
};

}  // namespace

SourceUnit parse(std::span<const Token> tokens, const std::string& path) { return Parser(tokens, path).unit(); }

SourceUnit parse_source(std::string_view text, const std::string& path) {
  auto tokens = tokenize(text, path);
  return parse(tokens, path);
}

}  // namespace rms
