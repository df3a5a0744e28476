#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rms/annotations.hpp"
#include "rms/cfg.hpp"

namespace rms {

/// Equivalence partition of names (`x`, `this.f`) into resource-alias
/// classes. Names not mentioned are singletons.
class AliasPartition {
 public:
  [[nodiscard]] bool same(const std::string& a, const std::string& b) const;
  /// Moves `name` into its own singleton class.
  void isolate(const std::string& name);
  /// Moves `name` into the class of `target` (no-op when equal).
  void join(const std::string& name, const std::string& target);
  /// Names sharing a class with `name`, including itself.
  [[nodiscard]] std::vector<std::string> class_of(const std::string& name) const;
  /// Non-singleton classes, each sorted, in sorted order.
  [[nodiscard]] std::vector<std::vector<std::string>> groups() const;

  /// Partition intersection: two names share a class iff they do in both.
  static AliasPartition meet(const AliasPartition& a, const AliasPartition& b);

  bool operator==(const AliasPartition& other) const { return groups() == other.groups(); }

 private:
  void compact();

  std::map<std::string, int> class_;
  int next_ = 0;
};

/// Resource-alias partitions at the entry of every reachable node.
class AliasState {
 public:
  [[nodiscard]] const AliasPartition& before(NodeId node) const;
  /// ResourceAlias(s, p, r): p and r share a class immediately before s.
  [[nodiscard]] bool is_resource_alias(StmtId s, const std::string& p, const std::string& r) const;
  [[nodiscard]] std::vector<std::string> aliases_before(StmtId s, const std::string& name) const;

 private:
  friend AliasState compute_resource_aliases(const Program&, const Cfg&, const AnnotationStore&);

  const Cfg* cfg_ = nullptr;
  std::vector<AliasPartition> in_;
};

/// Forward must-alias dataflow extended with @ResourceAlias calls.
AliasState compute_resource_aliases(const Program& program, const Cfg& cfg, const AnnotationStore& store);

/// Applies the alias effect of one statement (normal successor edge).
void alias_transfer(const Program& program, const AnnotationStore& store, const Stmt& stmt, AliasPartition& part);

using AliasSet = std::map<MethodId, AliasState>;
AliasSet compute_all_aliases(const Program& program, const CfgSet& cfgs, const AnnotationStore& store);

std::string dump_aliases(const Program& program, const Cfg& cfg, const AliasState& state);

}  // namespace rms
