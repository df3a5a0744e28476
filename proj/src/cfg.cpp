#include "rms/cfg.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "rms/printer.hpp"

namespace rms {

std::optional<NodeId> Cfg::node_of(StmtId s) const {
  auto it = by_stmt_.find(s);
  if (it == by_stmt_.end()) return std::nullopt;
  return it->second;
}

std::vector<CfgEdge> Cfg::edges() const {
  std::vector<CfgEdge> out;
  for (const auto& n : nodes_) out.insert(out.end(), n.succs.begin(), n.succs.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool may_throw(const Program& program, const Stmt& stmt) {
  if (const auto* c = call_of(stmt)) return program.method(c->target).may_throw;
  if (const auto* n = new_of(stmt)) return program.method(n->ctor).may_throw;
  if (const auto* d = stmt.as<CtorCallStmt>()) return program.method(d->target).may_throw;
  return false;
}

class CfgBuilder {
 public:
  CfgBuilder(const Program& program, Cfg& cfg) : program_(program), cfg_(cfg) {}

  void build(const Block& body) {
    cfg_.nodes_.resize(3);
    auto frontier = block(body, {Cfg::kEntry});
    for (NodeId n : frontier) edge(n, Cfg::kNormalExit, EdgeKind::kNormal);
  }

 private:
  NodeId add(const Stmt& s) {
    auto id = static_cast<NodeId>(cfg_.nodes_.size());
    cfg_.nodes_.push_back(CfgNode{&s, {}, {}});
    cfg_.by_stmt_[s.id] = id;
    return id;
  }

  void edge(NodeId from, NodeId to, EdgeKind kind) {
    CfgEdge e{from, to, kind};
    auto& succs = cfg_.nodes_[static_cast<std::size_t>(from)].succs;
    if (std::find(succs.begin(), succs.end(), e) != succs.end()) return;
    succs.push_back(e);
    cfg_.nodes_[static_cast<std::size_t>(to)].preds.push_back(e);
  }

  // Returns the nodes that fall through to whatever follows the block.
  std::vector<NodeId> block(const Block& b, std::vector<NodeId> frontier) {
    for (const Stmt& s : b) {
      if (frontier.empty()) break;  // unreachable tail
      frontier = stmt(s, frontier);
    }
    return frontier;
  }

  std::vector<NodeId> stmt(const Stmt& s, const std::vector<NodeId>& frontier) {
    NodeId n = add(s);
    for (NodeId p : frontier) edge(p, n, EdgeKind::kNormal);
    if (const auto* i = s.as<IfStmt>()) {
      auto out = block(i->then_block, {n});
      auto other = block(i->else_block, {n});
      out.insert(out.end(), other.begin(), other.end());
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    if (const auto* w = s.as<WhileStmt>()) {
      for (NodeId back : block(w->body, {n})) edge(back, n, EdgeKind::kNormal);
      return {n};
    }
    if (may_throw(program_, s)) edge(n, Cfg::kExceptionalExit, EdgeKind::kExceptional);
    if (s.as<ReturnStmt>() != nullptr) {
      edge(n, Cfg::kNormalExit, EdgeKind::kNormal);
      return {};
    }
    return {n};
  }

  const Program& program_;
  Cfg& cfg_;
};

Cfg build_cfg(const Program& program, MethodId method) {
  Cfg cfg;
  cfg.method_ = method;
  const auto& body = program.method(method).body;
  CfgBuilder builder(program, cfg);
  static const Block kEmpty;
  builder.build(body ? *body : kEmpty);  // both operands lvalues: no copy
  return cfg;
}

CfgSet build_all_cfgs(const Program& program) {
  CfgSet out;
  for (const auto& m : program.methods) {
    if (m.body) out.emplace(m.id, build_cfg(program, m.id));
  }
  return out;
}

bool not_written_after(const Cfg& cfg, FieldId field, StmtId s, NullWrites nulls) {
  auto start = cfg.node_of(s);
  if (!start) return true;
  std::vector<bool> seen(cfg.size(), false);
  std::deque<NodeId> work;
  for (const auto& e : cfg.node(*start).succs) work.push_back(e.to);
  while (!work.empty()) {
    NodeId n = work.front();
    work.pop_front();
    if (seen[static_cast<std::size_t>(n)]) continue;
    seen[static_cast<std::size_t>(n)] = true;
    const Stmt* st = cfg.node(n).stmt;
    if (st != nullptr) {
      if (const auto* w = st->as<FieldWriteStmt>()) {
        bool counts = w->value.has_value() || nulls == NullWrites::kCount;
        if (w->resolved == field && counts) return false;
      }
    }
    for (const auto& e : cfg.node(n).succs) work.push_back(e.to);
  }
  return true;
}

bool forall_normal_paths_exists(const Cfg& cfg, const std::function<bool(const Stmt&)>& pred) {
  // Greatest fixed point of: holds(n) = pred(n) || all successors hold.
  std::vector<bool> holds(cfg.size(), true);
  std::vector<bool> sat(cfg.size(), false);
  holds[Cfg::kNormalExit] = false;
  for (std::size_t n = 3; n < cfg.size(); ++n) sat[n] = pred(*cfg.node(static_cast<NodeId>(n)).stmt);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t n = cfg.size(); n-- > 0;) {
      if (n == Cfg::kNormalExit || n == Cfg::kExceptionalExit || !holds[n] || sat[n]) continue;
      for (const auto& e : cfg.node(static_cast<NodeId>(n)).succs) {
        if (!holds[static_cast<std::size_t>(e.to)]) {
          holds[n] = false;
          changed = true;
          break;
        }
      }
    }
  }
  return holds[Cfg::kEntry];
}

std::string dump_cfg(const Program& program, const Cfg& cfg) {
  std::ostringstream os;
  os << "cfg " << program.qualified_name(cfg.method()) << "\n";
  for (std::size_t n = 0; n < cfg.size(); ++n) {
    os << "  n" << n << " ";
    if (n == Cfg::kEntry) {
      os << "entry";
    } else if (n == Cfg::kNormalExit) {
      os << "exit";
    } else if (n == Cfg::kExceptionalExit) {
      os << "exceptional-exit";
    } else {
      const Stmt& s = *cfg.node(static_cast<NodeId>(n)).stmt;
      os << "[s" << s.id.value << " line " << s.pos.line << "] " << print_stmt_line(s);
    }
    os << "\n";
  }
  for (const auto& e : cfg.edges()) {
    os << "  n" << e.from << " -> n" << e.to << " " << (e.kind == EdgeKind::kNormal ? "N" : "E") << "\n";
  }
  return os.str();
}

}  // namespace rms
