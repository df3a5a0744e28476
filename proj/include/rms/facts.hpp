#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rms/cfg.hpp"
#include "rms/program.hpp"

namespace rms {

/// Invokes(s, m, n, r, p): statement s in m calls n with receiver r and
/// arguments p. Receiver is `this`, `x`, `this.f`, or empty (static calls,
/// allocations and this()/super() delegation).
struct InvokesFact {
  StmtId stmt;
  MethodId caller;
  MethodId callee;
  std::string callee_name;
  std::string receiver;
  std::vector<std::string> args;
};

/// WritesField(s, m, f, v); v is nullopt for `this.f = null`.
struct WritesFieldFact {
  StmtId stmt;
  MethodId method;
  FieldId field;
  std::optional<std::string> value;
};

struct ReturnsFact {
  StmtId stmt;
  MethodId method;
  std::string value;  // `x` or `this.f`
};

struct ThisOrSuperCallFact {
  StmtId stmt;
  MethodId ctor;
  MethodId target;
  std::vector<std::string> args;
};

enum class SiteKind { kClass, kField, kMethod, kParam, kReturn };

struct DeclaredAnnot {
  SiteKind site = SiteKind::kClass;
  int owner = -1;  // ClassId / FieldId / MethodId value
  int index = 0;   // parameter index for kParam
  Annotation annot;
};

/// Immutable ground-fact base extracted from a normalized program.
class FactBase {
 public:
  struct ParamTypeFact {
    MethodId method;
    int index = 0;
    ClassId type;
  };

  [[nodiscard]] std::vector<FieldId> query_field(ClassId c) const;
  [[nodiscard]] std::vector<MethodId> query_method(ClassId c) const;
  [[nodiscard]] std::vector<MethodId> query_abstract_method(ClassId c) const;
  [[nodiscard]] std::vector<MethodId> query_constructor(ClassId c) const;
  [[nodiscard]] std::optional<ClassId> query_field_type(FieldId f) const;
  [[nodiscard]] std::optional<ClassId> query_return_type(MethodId m) const;
  [[nodiscard]] std::vector<ParamTypeFact> query_param_type(MethodId m) const;
  [[nodiscard]] std::span<const InvokesFact> query_invokes(MethodId m) const;
  [[nodiscard]] std::span<const WritesFieldFact> query_writes_field(MethodId m) const;
  [[nodiscard]] std::span<const ReturnsFact> query_returns(MethodId m) const;
  [[nodiscard]] std::span<const ThisOrSuperCallFact> query_this_or_super_call(MethodId m) const;
  [[nodiscard]] const std::vector<DeclaredAnnot>& declared() const { return declared_; }

  [[nodiscard]] const std::vector<std::pair<FieldId, ClassId>>& all_fields() const { return fields_; }
  [[nodiscard]] const std::vector<std::pair<MethodId, ClassId>>& all_methods() const { return methods_; }
  [[nodiscard]] const std::vector<std::pair<MethodId, ClassId>>& all_abstract_methods() const { return abstract_methods_; }
  [[nodiscard]] const std::vector<std::pair<MethodId, ClassId>>& all_constructors() const { return constructors_; }
  [[nodiscard]] std::vector<InvokesFact> all_invokes() const;
  [[nodiscard]] std::vector<WritesFieldFact> all_writes_field() const;
  [[nodiscard]] std::vector<ReturnsFact> all_returns() const;
  [[nodiscard]] std::vector<ThisOrSuperCallFact> all_this_or_super_calls() const;

  /// Total number of tuples across every relation.
  [[nodiscard]] std::size_t size() const;

 private:
  friend FactBase extract_facts(const Program& program, const CfgSet& cfgs);

  std::vector<std::pair<FieldId, ClassId>> fields_;
  std::vector<std::pair<MethodId, ClassId>> methods_;
  std::vector<std::pair<MethodId, ClassId>> abstract_methods_;
  std::vector<std::pair<MethodId, ClassId>> constructors_;
  std::map<FieldId, ClassId> field_types_;
  std::map<MethodId, ClassId> return_types_;
  std::map<MethodId, std::vector<ParamTypeFact>> param_types_;
  std::map<MethodId, std::vector<InvokesFact>> invokes_;
  std::map<MethodId, std::vector<WritesFieldFact>> writes_;
  std::map<MethodId, std::vector<ReturnsFact>> returns_;
  std::map<MethodId, std::vector<ThisOrSuperCallFact>> delegations_;
  std::vector<DeclaredAnnot> declared_;
};

FactBase extract_facts(const Program& program, const CfgSet& cfgs);

/// Sorted tab-separated dump, one `# Relation` section per relation.
std::string dump_facts(const Program& program, const FactBase& facts);

}  // namespace rms
