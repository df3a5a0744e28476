#include "oracle/leak_oracle.hpp"

#include <map>

namespace rms::oracle {

namespace {

struct Resource {
  bool obligated = false;
  bool done = false;
  int line = 0;
};

class Sim {
 public:
  Sim(const Program& p, const AnnotationStore& store, MethodId m) : p_(p), store_(store), m_(m) {}

  std::vector<Leak> run(const Path& path) {
    const auto& mi = p_.method(m_);
    for (std::size_t i = 0; i < mi.params.size(); ++i) {
      bool owned = store_.param_owning(m_, static_cast<int>(i)) && !obligation(mi.params[i].type).empty();
      env_[mi.params[i].name] = fresh(owned, mi.pos.line);
    }
    for (const auto& step : path.steps) exec(*step.stmt, step.threw);
    std::vector<Leak> out;
    for (const auto& r : res_) {
      if (r.obligated && !r.done) out.push_back({m_, r.line, path.normal});
    }
    return out;
  }

 private:
  std::set<std::string> obligation(ClassId c) const {
    for (std::optional<ClassId> k = c; k; k = p_.cls(*k).superclass) {
      if (const auto* mc = store_.own_must_call(*k)) return *mc;
    }
    return {};
  }

  int fresh(bool obligated, int line) {
    res_.push_back({obligated, false, line});
    return static_cast<int>(res_.size()) - 1;
  }

  int value(const std::string& name) {
    auto it = env_.find(name);
    if (it != env_.end()) return it->second;
    // Fields and never-assigned names hold something nobody here must close.
    return env_[name] = fresh(false, 0);
  }

  void finish(int r) {
    if (r >= 0) res_[static_cast<std::size_t>(r)].done = true;
  }

  static std::string key(const Operand& o) { return o.is_field ? "this." + o.name : o.name; }

  // Argument effects; returns the resource of the @ResourceAlias argument.
  std::optional<int> args(MethodId callee, const std::vector<Operand>& as, bool threw) {
    std::optional<int> alias;
    auto k = store_.return_resource_alias(callee) ? store_.resource_alias_param(callee) : std::nullopt;
    bool ctor = p_.method(callee).is_constructor();
    for (std::size_t j = 0; j < as.size(); ++j) {
      int v = value(key(as[j]));
      if (k && *k == static_cast<int>(j)) {
        alias = v;
      } else if (store_.param_owning(callee, static_cast<int>(j)) && (!threw || !ctor)) {
        finish(v);
      }
    }
    return alias;
  }

  void call(const CallExpr& c, bool threw) {
    std::string recv;
    switch (c.receiver_kind) {
      case ReceiverKind::kVariable: recv = c.receiver; break;
      case ReceiverKind::kThisField: recv = "this." + c.receiver; break;
      default: break;
    }
    if (!recv.empty()) {
      auto t = p_.type_of(m_, recv);
      if (t && obligation(*t).contains(c.method)) finish(value(recv));
    }
    if (c.receiver_kind == ReceiverKind::kImplicitThis && !threw) {
      for (const auto& e : store_.calls(c.target)) {
        if (obligation(p_.field(e.field).type).contains(e.method)) finish(value("this." + p_.field(e.field).name));
      }
    }
  }

  void exec(const Stmt& s, bool threw) {
    if (const auto* a = s.as<AssignStmt>()) {
      if (const auto* r = std::get_if<ReadExpr>(&a->rhs)) {
        env_[a->var] = value(key(r->source));
      } else if (std::holds_alternative<NullExpr>(a->rhs)) {
        env_[a->var] = -1;
      } else if (const auto* n = std::get_if<NewExpr>(&a->rhs)) {
        auto alias = args(n->ctor, n->args, threw);
        if (threw) return;
        env_[a->var] = alias ? *alias : fresh(!obligation(n->cls).empty(), s.pos.line);
      } else if (const auto* c = std::get_if<CallExpr>(&a->rhs)) {
        call(*c, threw);
        auto alias = args(c->target, c->args, threw);
        if (threw) return;
        const auto& callee = p_.method(c->target);
        bool owned = !obligation(*callee.return_type).empty() && !store_.return_not_owning(c->target);
        env_[a->var] = alias ? *alias : fresh(owned, s.pos.line);
      }
    } else if (const auto* c = s.as<CallStmt>()) {
      call(c->call, threw);
      args(c->call.target, c->call.args, threw);
    } else if (const auto* d = s.as<CtorCallStmt>()) {
      args(d->target, d->args, threw);
    } else if (const auto* w = s.as<FieldWriteStmt>()) {
      int v = w->value ? value(*w->value) : -1;
      if (v >= 0 && store_.field_owning(w->resolved)) finish(v);
      env_["this." + w->field] = v;
    } else if (const auto* r = s.as<ReturnStmt>()) {
      const auto& mi = p_.method(m_);
      if (r->value && mi.return_type && !store_.return_not_owning(m_)) finish(value(key(*r->value)));
    }
  }

  const Program& p_;
  const AnnotationStore& store_;
  MethodId m_;
  std::map<std::string, int> env_;
  std::vector<Resource> res_;
};

}  // namespace

std::vector<Leak> find_leaks(const Program& program, const AnnotationStore& store, MethodId m, int unroll) {
  std::vector<Leak> out;
  for (const auto& path : enumerate_paths(program, m, unroll)) {
    auto leaks = Sim(program, store, m).run(path);
    out.insert(out.end(), leaks.begin(), leaks.end());
  }
  return out;
}

std::vector<Leak> find_all_leaks(const Program& program, const AnnotationStore& store, int unroll) {
  std::vector<Leak> out;
  for (const auto& mi : program.methods) {
    if (!mi.body) continue;
    auto leaks = find_leaks(program, store, mi.id, unroll);
    out.insert(out.end(), leaks.begin(), leaks.end());
  }
  return out;
}

}  // namespace rms::oracle
