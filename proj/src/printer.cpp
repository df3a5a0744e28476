#include "rms/printer.hpp"

#include <sstream>

namespace rms {

namespace {

std::string quoted_list(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += "\"" + xs[i] + "\"";
  }
  return out;
}

std::string args_text(const std::vector<Operand>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) out += ", ";
    out += args[i].key();
  }
  return out + ")";
}

std::string call_text(const CallExpr& c) {
  std::string recv;
  switch (c.receiver_kind) {
    case ReceiverKind::kVariable: recv = c.receiver + "."; break;
    case ReceiverKind::kThisField: recv = "this." + c.receiver + "."; break;
    case ReceiverKind::kImplicitThis: break;
    case ReceiverKind::kStatic: recv = c.receiver.empty() ? "" : c.receiver + "."; break;
  }
  return recv + c.method + args_text(c.args);
}

std::string rhs_text(const Rhs& rhs) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, NewExpr>) {
          return "new " + r.class_name + args_text(r.args);
        } else if constexpr (std::is_same_v<T, CallExpr>) {
          return call_text(r);
        } else if constexpr (std::is_same_v<T, ReadExpr>) {
          return r.source.key();
        } else {
          return "null";
        }
      },
      rhs);
}

std::string annots_inline(const std::vector<Annotation>& annots) {
  std::string out;
  for (const auto& a : annots) out += print_annotation(a) + " ";
  return out;
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (const auto* i = s.as<IfStmt>()) {
    os << pad << "if (*) {\n" << print_block(i->then_block, indent + 1) << pad << "}";
    if (i->has_else) os << " else {\n" << print_block(i->else_block, indent + 1) << pad << "}";
    os << "\n";
  } else if (const auto* w = s.as<WhileStmt>()) {
    os << pad << "while (*) {\n" << print_block(w->body, indent + 1) << pad << "}\n";
  } else {
    os << pad << print_stmt_line(s) << "\n";
  }
}

}  // namespace

std::string print_annotation(const Annotation& a) {
  switch (a.kind) {
    case AnnotKind::kMustCall: return "@MustCall(" + quoted_list(a.methods) + ")";
    case AnnotKind::kCalls: return "@Calls(" + quoted_list(a.exprs) + "; " + quoted_list(a.methods) + ")";
    default: return "@" + std::string(to_string(a.kind));
  }
}

std::string print_stmt_line(const Stmt& s) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, AssignStmt>) {
          return (f.declares ? "var " : "") + f.var + " = " + rhs_text(f.rhs) + ";";
        } else if constexpr (std::is_same_v<T, FieldWriteStmt>) {
          return "this." + f.field + " = " + f.value.value_or("null") + ";";
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          return call_text(f.call) + ";";
        } else if constexpr (std::is_same_v<T, ReturnStmt>) {
          if (f.expr) return "return " + rhs_text(*f.expr) + ";";
          return f.value ? "return " + f.value->key() + ";" : std::string("return;");
        } else if constexpr (std::is_same_v<T, CtorCallStmt>) {
          return (f.is_super ? "super" : "this") + args_text(f.args) + ";";
        } else if constexpr (std::is_same_v<T, IfStmt>) {
          return f.has_else ? "if (*) {...} else {...}" : "if (*) {...}";
        } else {
          return "while (*) {...}";
        }
      },
      s.form);
}

std::string print_block(const Block& block, int indent) {
  std::ostringstream os;
  for (const auto& s : block) print_stmt(os, s, indent);
  return os.str();
}

std::string print_unit(const SourceUnit& unit) {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : unit.classes) {
    if (!first) os << "\n";
    first = false;
    for (const auto& a : c.annots) os << print_annotation(a) << "\n";
    os << "class " << c.name;
    if (c.superclass) os << " extends " << *c.superclass;
    os << " {\n";
    for (const auto& f : c.fields) {
      os << "  " << annots_inline(f.annots) << (f.is_final ? "final " : "") << f.name << ": " << f.type_name << ";\n";
    }
    auto method = [&](const MethodDecl& m) {
      os << "  " << annots_inline(m.annots);
      if (m.kind == MethodKind::kStatic) os << "static ";
      if (m.kind == MethodKind::kAbstract) os << "abstract ";
      if (m.kind != MethodKind::kConstructor) os << m.return_type.value_or("void") << " ";
      os << m.name << "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i > 0) os << ", ";
        os << annots_inline(m.params[i].annots) << m.params[i].name << ": " << m.params[i].type_name;
      }
      os << ")";
      if (m.may_throw) os << " throws";
      if (m.body) {
        os << " {\n" << print_block(*m.body, 2) << "  }\n";
      } else {
        os << ";\n";
      }
    };
    for (const auto& m : c.constructors) method(m);
    for (const auto& m : c.methods) method(m);
    os << "}\n";
  }
  return os.str();
}

}  // namespace rms
