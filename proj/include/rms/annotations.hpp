#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rms/facts.hpp"
#include "rms/program.hpp"

namespace rms {

/// Where an annotation came from: 0 = declared (source or sidecar),
/// otherwise the number of the inference rule that first derived it.
struct Provenance {
  int rule = 0;

  [[nodiscard]] bool declared() const { return rule == 0; }
  static Provenance declared_here() { return {0}; }
  static Provenance from_rule(int r) { return {r}; }
  auto operator<=>(const Provenance&) const = default;
};

/// One annotation fact in canonical form. Resource-alias pairs are two
/// records (param + return).
struct AnnotRecord {
  SiteKind site = SiteKind::kClass;
  int owner = -1;
  int index = 0;  // parameter index for kParam
  AnnotKind kind = AnnotKind::kOwning;
  std::vector<std::string> methods;  // @MustCall set (sorted) or the single @Calls method
  int field = -1;                    // @Calls field

  auto operator<=>(const AnnotRecord&) const = default;
};

struct CallsEntry {
  FieldId field;
  std::string method;

  auto operator<=>(const CallsEntry&) const = default;
};

/// Monotone store of declared and inferred annotations. Defaults are not
/// stored: a parameter without @Owning is not owning, a return without
/// @NotOwning is owning.
class AnnotationStore {
 public:
  /// Adds a record. Returns false when already present or when it would
  /// contradict an existing annotation (Owning vs NotOwning, a second class
  /// @MustCall, a second @ResourceAlias parameter).
  bool add(const AnnotRecord& record, Provenance prov);

  bool add_class_must_call(ClassId c, std::set<std::string> methods, Provenance prov);
  bool add_field_owning(FieldId f, Provenance prov);
  bool add_calls(MethodId m, FieldId f, const std::string& method, Provenance prov);
  bool add_param_owning(MethodId m, int index, Provenance prov);
  bool add_return_not_owning(MethodId m, Provenance prov);
  /// Adds both halves of a (param, return) @ResourceAlias pair.
  bool add_resource_alias_pair(MethodId m, int index, Provenance prov);

  [[nodiscard]] const std::set<std::string>* own_must_call(ClassId c) const;
  [[nodiscard]] bool field_owning(FieldId f) const;
  [[nodiscard]] bool field_not_owning(FieldId f) const;
  [[nodiscard]] const std::set<CallsEntry>& calls(MethodId m) const;
  [[nodiscard]] bool has_calls(MethodId m, FieldId f, const std::string& method) const;
  [[nodiscard]] bool param_owning(MethodId m, int index) const;
  [[nodiscard]] bool param_not_owning(MethodId m, int index) const;
  [[nodiscard]] std::optional<int> resource_alias_param(MethodId m) const;
  [[nodiscard]] bool return_not_owning(MethodId m) const;
  [[nodiscard]] bool return_owning_declared(MethodId m) const;
  [[nodiscard]] bool return_resource_alias(MethodId m) const;

  [[nodiscard]] bool contains(const AnnotRecord& record) const { return records_.contains(record); }
  [[nodiscard]] const std::map<AnnotRecord, Provenance>& records() const { return records_; }
  [[nodiscard]] std::size_t size() const { return records_.size(); }

  bool operator==(const AnnotationStore& other) const;

 private:
  bool insert(const AnnotRecord& record, Provenance prov);

  std::map<AnnotRecord, Provenance> records_;
  std::map<ClassId, std::set<std::string>> must_call_;
  std::map<MethodId, std::set<CallsEntry>> calls_;
};

/// Effective @MustCall of a class: its own annotation, else the nearest
/// annotated superclass's. nullopt when no class in the chain is annotated.
std::optional<std::set<std::string>> effective_must_call(const Program& program, const AnnotationStore& store,
                                                          ClassId c);

/// Non-empty effective @MustCall, or an empty set.
std::set<std::string> obligation_of(const Program& program, const AnnotationStore& store, ClassId c);

/// FieldDisposal(f, m): methods in the @MustCall of f's type.
std::set<std::string> field_disposal(const Program& program, const AnnotationStore& store, FieldId f);

/// Fields declared in c that carry @Owning.
std::vector<FieldId> owning_fields(const Program& program, const AnnotationStore& store, ClassId c);

/// Converts source annotations into store records. Throws ResolveError on
/// contradictions between declared annotations.
AnnotationStore declared_store(const Program& program, const FactBase& facts);

}  // namespace rms
