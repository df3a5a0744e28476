#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rms/program.hpp"

namespace rms {

enum class EdgeKind { kNormal, kExceptional };

using NodeId = int;

struct CfgEdge {
  NodeId from = 0;
  NodeId to = 0;
  EdgeKind kind = EdgeKind::kNormal;

  auto operator<=>(const CfgEdge&) const = default;
};

struct CfgNode {
  const Stmt* stmt = nullptr;  // null for entry and the two exits
  std::vector<CfgEdge> succs;
  std::vector<CfgEdge> preds;
};

/// Per-method control-flow graph. One node per reachable statement; `if`
/// and `while` statements get a branch / loop-header node. Statements after
/// a `return` are unreachable and get no node.
class Cfg {
 public:
  static constexpr NodeId kEntry = 0;
  static constexpr NodeId kNormalExit = 1;
  static constexpr NodeId kExceptionalExit = 2;

  [[nodiscard]] MethodId method() const { return method_; }
  [[nodiscard]] const std::vector<CfgNode>& nodes() const { return nodes_; }
  [[nodiscard]] const CfgNode& node(NodeId n) const { return nodes_[static_cast<std::size_t>(n)]; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] std::optional<NodeId> node_of(StmtId s) const;
  [[nodiscard]] std::vector<CfgEdge> edges() const;

 private:
  friend Cfg build_cfg(const Program& program, MethodId method);
  friend class CfgBuilder;

  MethodId method_;
  std::vector<CfgNode> nodes_;
  std::map<StmtId, NodeId> by_stmt_;
};

using CfgSet = std::map<MethodId, Cfg>;

/// Whether executing `stmt` calls a `throws`-marked method or constructor.
bool may_throw(const Program& program, const Stmt& stmt);

Cfg build_cfg(const Program& program, MethodId method);
CfgSet build_all_cfgs(const Program& program);

enum class NullWrites {
  kCount,   // `this.f = null` is an assignment
  kIgnore,  // nulling out a field after disposal is tolerated
};

/// True iff no path from a successor of `s` to either exit writes `this.f`.
bool not_written_after(const Cfg& cfg, FieldId field, StmtId s, NullWrites nulls = NullWrites::kCount);

/// True iff every path from entry to the normal exit passes through a
/// statement satisfying `pred`. Paths ending at the exceptional exit are not
/// normal paths. Evaluated as a backward greatest-fixed-point dataflow.
bool forall_normal_paths_exists(const Cfg& cfg, const std::function<bool(const Stmt&)>& pred);

/// Human-readable dump: nodes with statement text, edges labelled N/E.
std::string dump_cfg(const Program& program, const Cfg& cfg);

}  // namespace rms
