#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rms/source.hpp"

namespace rms {

enum class AnnotKind { kMustCall, kOwning, kNotOwning, kCalls, kResourceAlias };

std::string_view to_string(AnnotKind kind);

/// A source-level annotation. `@Calls` keeps its field expressions in the
/// surface form `this.f`.
struct Annotation {
  AnnotKind kind = AnnotKind::kOwning;
  std::vector<std::string> exprs;
  std::vector<std::string> methods;
  SourcePos pos;
};

/// A name that can appear as an argument, receiver, returned value or
/// right-hand side read: either a local/parameter or a field of `this`.
struct Operand {
  bool is_field = false;
  std::string name;
  FieldId field;  // set by the resolver when is_field

  /// Canonical name used by facts and alias sets: `x` or `this.f`.
  [[nodiscard]] std::string key() const { return is_field ? "this." + name : name; }

  static Operand var(std::string n) { return Operand{false, std::move(n), {}}; }
  static Operand this_field(std::string n) { return Operand{true, std::move(n), {}}; }
};

enum class ReceiverKind {
  kVariable,      // x.m(..)
  kThisField,     // this.f.m(..)
  kImplicitThis,  // m(..) resolving to an instance method
  kStatic,        // C.m(..) or m(..) resolving to a static method
};

struct CallExpr {
  ReceiverKind receiver_kind = ReceiverKind::kImplicitThis;
  std::string receiver;  // variable, field or class name; empty for implicit calls
  std::string method;
  std::vector<Operand> args;
  MethodId target;
  FieldId receiver_field;

  /// Receiver as a fact-level name: `x`, `this.f`, `this`, or empty for static calls.
  [[nodiscard]] std::string receiver_key() const;
};

struct NewExpr {
  std::string class_name;
  std::vector<Operand> args;
  ClassId cls;
  MethodId ctor;
};

struct ReadExpr {
  Operand source;
};

struct NullExpr {};

using Rhs = std::variant<NewExpr, CallExpr, ReadExpr, NullExpr>;

struct Stmt;
using Block = std::vector<Stmt>;

/// `var x = rhs;` (declares) or `x = rhs;`
struct AssignStmt {
  std::string var;
  bool declares = false;
  Rhs rhs;
};

/// `this.f = v;` or `this.f = null;`
struct FieldWriteStmt {
  std::string field;
  std::optional<std::string> value;
  FieldId resolved;
};

struct CallStmt {
  CallExpr call;
};

struct ReturnStmt {
  std::optional<Operand> value;
  /// `return new C(..);` or `return call(..);` as written; normalize hoists
  /// it into a local, so later stages only see `value`.
  std::optional<Rhs> expr;
};

/// `this(args);` or `super(args);`
struct CtorCallStmt {
  bool is_super = false;
  std::vector<Operand> args;
  MethodId target;
};

struct IfStmt {
  Block then_block;
  Block else_block;
  bool has_else = false;
};

struct WhileStmt {
  Block body;
};

struct Stmt {
  StmtId id;
  SourcePos pos;
  std::variant<AssignStmt, FieldWriteStmt, CallStmt, ReturnStmt, CtorCallStmt, IfStmt, WhileStmt> form;

  template <class T>
  [[nodiscard]] const T* as() const {
    return std::get_if<T>(&form);
  }
  template <class T>
  [[nodiscard]] T* as() {
    return std::get_if<T>(&form);
  }
};

/// The call performed by a statement, if any (call statements and
/// assignments whose right side is a call).
const CallExpr* call_of(const Stmt& stmt);
const NewExpr* new_of(const Stmt& stmt);

struct ParamDecl {
  std::vector<Annotation> annots;
  std::string name;
  std::string type_name;
  SourcePos pos;
};

enum class MethodKind { kConstructor, kInstance, kStatic, kAbstract };

struct MethodDecl {
  std::vector<Annotation> annots;
  MethodKind kind = MethodKind::kInstance;
  std::string name;
  std::optional<std::string> return_type;  // nullopt for void and constructors
  std::vector<ParamDecl> params;
  bool may_throw = false;
  std::optional<Block> body;
  SourcePos pos;
};

struct FieldDecl {
  std::vector<Annotation> annots;
  bool is_final = false;
  std::string name;
  std::string type_name;
  SourcePos pos;
};

struct ClassDecl {
  std::vector<Annotation> annots;
  std::string name;
  std::optional<std::string> superclass;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> constructors;
  std::vector<MethodDecl> methods;
  SourcePos pos;
};

struct SourceUnit {
  std::string path;
  std::vector<ClassDecl> classes;
  bool is_stub = false;
};

}  // namespace rms
