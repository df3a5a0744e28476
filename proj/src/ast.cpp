#include "rms/ast.hpp"

namespace rms {

std::string_view to_string(AnnotKind kind) {
  switch (kind) {
    case AnnotKind::kMustCall: return "MustCall";
    case AnnotKind::kOwning: return "Owning";
    case AnnotKind::kNotOwning: return "NotOwning";
    case AnnotKind::kCalls: return "Calls";
    case AnnotKind::kResourceAlias: return "ResourceAlias";
  }
  return "?";
}

std::string CallExpr::receiver_key() const {
  switch (receiver_kind) {
    case ReceiverKind::kVariable: return receiver;
    case ReceiverKind::kThisField: return "this." + receiver;
    case ReceiverKind::kImplicitThis: return "this";
    case ReceiverKind::kStatic: return "";
  }
  return "";
}

const CallExpr* call_of(const Stmt& stmt) {
  if (const auto* c = stmt.as<CallStmt>()) return &c->call;
  if (const auto* a = stmt.as<AssignStmt>()) return std::get_if<CallExpr>(&a->rhs);
  return nullptr;
}

const NewExpr* new_of(const Stmt& stmt) {
  if (const auto* a = stmt.as<AssignStmt>()) return std::get_if<NewExpr>(&a->rhs);
  return nullptr;
}

}  // namespace rms
