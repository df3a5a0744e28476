#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rms/ast.hpp"

namespace rms {

struct ClassInfo {
  ClassId id;
  std::string name;
  std::optional<ClassId> superclass;
  std::vector<FieldId> fields;
  std::vector<MethodId> constructors;
  std::vector<MethodId> methods;
  std::vector<Annotation> annots;
  SourcePos pos;
  int unit = 0;
  bool is_stub = false;
};

struct FieldInfo {
  FieldId id;
  ClassId owner;
  std::string name;
  ClassId type;
  bool is_final = false;
  std::vector<Annotation> annots;
  SourcePos pos;
};

struct ParamInfo {
  std::string name;
  ClassId type;
  std::vector<Annotation> annots;
  SourcePos pos;
};

struct MethodInfo {
  MethodId id;
  ClassId owner;
  std::string name;
  MethodKind kind = MethodKind::kInstance;
  std::vector<ParamInfo> params;
  std::optional<ClassId> return_type;
  bool may_throw = false;
  bool implicit = false;  // synthesized default constructor
  std::optional<Block> body;
  std::vector<Annotation> method_annots;  // @Calls
  std::vector<Annotation> return_annots;  // @Owning/@NotOwning/@ResourceAlias on the result
  SourcePos pos;
  /// Declared locals; nullopt type for locals only ever assigned `null`.
  std::map<std::string, std::optional<ClassId>> locals;

  [[nodiscard]] bool is_constructor() const { return kind == MethodKind::kConstructor; }
  [[nodiscard]] bool is_static() const { return kind == MethodKind::kStatic; }
  [[nodiscard]] bool has_receiver() const {
    return kind == MethodKind::kInstance || kind == MethodKind::kAbstract || kind == MethodKind::kConstructor;
  }
  [[nodiscard]] std::optional<int> param_index(std::string_view n) const;
};

/// A resolved program: flat tables indexed by the strong ids. Copyable; method
/// bodies live inside `methods`, so anything holding `const Stmt*` (e.g. a
/// Cfg) must not outlive the Program it was built from.
struct Program {
  std::vector<std::string> files;
  std::vector<bool> stub_files;
  std::vector<ClassInfo> classes;
  std::vector<FieldInfo> fields;
  std::vector<MethodInfo> methods;

  [[nodiscard]] const ClassInfo& cls(ClassId id) const { return classes[id.index()]; }
  [[nodiscard]] const FieldInfo& field(FieldId id) const { return fields[id.index()]; }
  [[nodiscard]] const MethodInfo& method(MethodId id) const { return methods[id.index()]; }
  [[nodiscard]] MethodInfo& method(MethodId id) { return methods[id.index()]; }

  [[nodiscard]] std::optional<ClassId> find_class(std::string_view name) const;
  /// Field visible as `this.name` from class `from` (searches superclasses).
  [[nodiscard]] std::optional<FieldId> lookup_field(ClassId from, std::string_view name) const;
  /// Non-constructor method visible from `from` (searches superclasses).
  [[nodiscard]] std::optional<MethodId> lookup_method(ClassId from, std::string_view name) const;
  [[nodiscard]] std::optional<MethodId> find_constructor(ClassId cls, std::size_t arity) const;
  /// Nearest method in a proper superclass of m's class with the same name.
  [[nodiscard]] std::optional<MethodId> overridden(MethodId m) const;
  [[nodiscard]] bool is_subclass(ClassId sub, ClassId super) const;

  [[nodiscard]] const std::string& file_of(ClassId c) const { return files[static_cast<std::size_t>(cls(c).unit)]; }
  [[nodiscard]] const std::string& file_of(MethodId m) const { return file_of(method(m).owner); }

  /// `C.m`, `C.<init>`, or `C.<init>/N` when a class has several constructors.
  [[nodiscard]] std::string qualified_name(MethodId m) const;
  [[nodiscard]] std::string qualified_name(FieldId f) const;

  /// Static type of a local, parameter or `this.f` name inside `m`.
  [[nodiscard]] std::optional<ClassId> type_of(MethodId m, std::string_view key) const;

  /// Every statement of every body in preorder, with its method.
  [[nodiscard]] std::vector<std::pair<MethodId, const Stmt*>> statements() const;
  [[nodiscard]] std::size_t statement_count() const;
};

/// Assigns statement ids 0..n-1 in (method id, preorder) order.
void renumber_statements(Program& program);

/// Visits statements of a block in preorder (nested blocks included).
template <class Fn>
void for_each_stmt(const Block& block, Fn&& fn) {
  for (const Stmt& s : block) {
    fn(s);
    if (const auto* i = s.as<IfStmt>()) {
      for_each_stmt(i->then_block, fn);
      for_each_stmt(i->else_block, fn);
    } else if (const auto* w = s.as<WhileStmt>()) {
      for_each_stmt(w->body, fn);
    }
  }
}

template <class Fn>
void for_each_stmt_mut(Block& block, Fn&& fn) {
  for (Stmt& s : block) {
    fn(s);
    if (auto* i = s.as<IfStmt>()) {
      for_each_stmt_mut(i->then_block, fn);
      for_each_stmt_mut(i->else_block, fn);
    } else if (auto* w = s.as<WhileStmt>()) {
      for_each_stmt_mut(w->body, fn);
    }
  }
}

}  // namespace rms
