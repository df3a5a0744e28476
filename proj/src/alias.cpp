#include "rms/alias.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "rms/printer.hpp"

namespace rms {

bool AliasPartition::same(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  auto ia = class_.find(a);
  auto ib = class_.find(b);
  return ia != class_.end() && ib != class_.end() && ia->second == ib->second;
}

void AliasPartition::isolate(const std::string& name) {
  class_.erase(name);
  compact();
}

void AliasPartition::join(const std::string& name, const std::string& target) {
  if (same(name, target)) return;
  class_.erase(name);
  auto it = class_.find(target);
  int id = it != class_.end() ? it->second : (class_[target] = next_++);
  class_[name] = id;
  compact();
}

std::vector<std::string> AliasPartition::class_of(const std::string& name) const {
  auto it = class_.find(name);
  if (it == class_.end()) return {name};
  std::vector<std::string> out;
  for (const auto& [n, id] : class_) {
    if (id == it->second) out.push_back(n);
  }
  return out;
}

std::vector<std::vector<std::string>> AliasPartition::groups() const {
  std::map<int, std::vector<std::string>> by_id;
  for (const auto& [n, id] : class_) by_id[id].push_back(n);
  std::vector<std::vector<std::string>> out;
  for (auto& [_, g] : by_id) {
    if (g.size() > 1) out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void AliasPartition::compact() {
  std::map<int, int> count;
  for (const auto& [_, id] : class_) ++count[id];
  for (auto it = class_.begin(); it != class_.end();) {
    it = count[it->second] < 2 ? class_.erase(it) : std::next(it);
  }
}

AliasPartition AliasPartition::meet(const AliasPartition& a, const AliasPartition& b) {
  AliasPartition out;
  std::map<std::pair<int, int>, int> ids;
  for (const auto& [n, ia] : a.class_) {
    auto ib = b.class_.find(n);
    if (ib == b.class_.end()) continue;
    auto key = std::make_pair(ia, ib->second);
    auto [it, fresh] = ids.emplace(key, out.next_);
    if (fresh) ++out.next_;
    out.class_[n] = it->second;
  }
  out.compact();
  return out;
}

const AliasPartition& AliasState::before(NodeId node) const { return in_[static_cast<std::size_t>(node)]; }

bool AliasState::is_resource_alias(StmtId s, const std::string& p, const std::string& r) const {
  if (p == r) return true;
  auto n = cfg_->node_of(s);
  if (!n) return false;
  return before(*n).same(p, r);
}

std::vector<std::string> AliasState::aliases_before(StmtId s, const std::string& name) const {
  auto n = cfg_->node_of(s);
  if (!n) return {name};
  return before(*n).class_of(name);
}

void alias_transfer(const Program& program, const AnnotationStore& store, const Stmt& stmt, AliasPartition& part) {
  if (const auto* w = stmt.as<FieldWriteStmt>()) {
    std::string f = "this." + w->field;
    if (w->value) {
      part.join(f, *w->value);
    } else {
      part.isolate(f);
    }
    return;
  }
  const auto* a = stmt.as<AssignStmt>();
  if (a == nullptr) return;
  const std::string& x = a->var;
  const std::vector<Operand>* args = nullptr;
  MethodId target;
  if (const auto* r = std::get_if<ReadExpr>(&a->rhs)) {
    part.join(x, r->source.key());
    return;
  }
  if (const auto* n = std::get_if<NewExpr>(&a->rhs)) {
    args = &n->args;
    target = n->ctor;
  } else if (const auto* c = std::get_if<CallExpr>(&a->rhs)) {
    args = &c->args;
    target = c->target;
  }
  if (args != nullptr && store.return_resource_alias(target)) {
    if (auto i = store.resource_alias_param(target)) {
      const std::string src = (*args)[static_cast<std::size_t>(*i)].key();
      if (src != x) {
        part.isolate(x);
        part.join(x, src);
      }
      return;
    }
  }
  part.isolate(x);
}

AliasState compute_resource_aliases(const Program& program, const Cfg& cfg, const AnnotationStore& store) {
  std::vector<std::optional<AliasPartition>> in(cfg.size());
  in[Cfg::kEntry] = AliasPartition{};
  std::deque<NodeId> work{Cfg::kEntry};
  std::vector<bool> queued(cfg.size(), false);
  queued[Cfg::kEntry] = true;
  while (!work.empty()) {
    NodeId n = work.front();
    work.pop_front();
    queued[static_cast<std::size_t>(n)] = false;
    const CfgNode& node = cfg.node(n);
    AliasPartition normal = *in[static_cast<std::size_t>(n)];
    if (node.stmt != nullptr) alias_transfer(program, store, *node.stmt, normal);
    for (const auto& e : node.succs) {
      const AliasPartition& out = e.kind == EdgeKind::kNormal ? normal : *in[static_cast<std::size_t>(n)];
      auto& slot = in[static_cast<std::size_t>(e.to)];
      AliasPartition merged = slot ? AliasPartition::meet(*slot, out) : out;
      if (!slot || !(merged == *slot)) {
        slot = std::move(merged);
        if (!queued[static_cast<std::size_t>(e.to)]) {
          queued[static_cast<std::size_t>(e.to)] = true;
          work.push_back(e.to);
        }
      }
    }
  }
  AliasState st;
  st.cfg_ = &cfg;
  st.in_.reserve(cfg.size());
  for (auto& p : in) st.in_.push_back(p.value_or(AliasPartition{}));
  return st;
}

AliasSet compute_all_aliases(const Program& program, const CfgSet& cfgs, const AnnotationStore& store) {
  AliasSet out;
  for (const auto& [m, cfg] : cfgs) out.emplace(m, compute_resource_aliases(program, cfg, store));
  return out;
}

std::string dump_aliases(const Program& program, const Cfg& cfg, const AliasState& state) {
  std::ostringstream os;
  os << "aliases " << program.qualified_name(cfg.method()) << "\n";
  for (std::size_t n = 3; n < cfg.size(); ++n) {
    const Stmt& s = *cfg.node(static_cast<NodeId>(n)).stmt;
    os << "  [s" << s.id.value << "] " << print_stmt_line(s) << "  ";
    auto groups = state.before(static_cast<NodeId>(n)).groups();
    if (groups.empty()) os << "{}";
    for (const auto& g : groups) {
      os << "{";
      for (std::size_t i = 0; i < g.size(); ++i) os << (i ? ", " : "") << g[i];
      os << "}";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace rms
