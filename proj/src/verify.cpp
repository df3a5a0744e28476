#include "rms/verify.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <json.hpp>

#include "rms/infer.hpp"
#include "rms/printer.hpp"

namespace rms {

std::string_view to_string(WarningCode code) {
  switch (code) {
    case WarningCode::kRequiredMethodNotCalled: return "required.method.not.called";
    case WarningCode::kCallsNotVerified: return "calls.not.verified";
    case WarningCode::kOwningFieldNotCovered: return "owning.field.not.covered";
    case WarningCode::kResourceAliasNotVerified: return "resource.alias.not.verified";
    case WarningCode::kOwningFieldOverwritten: return "owning.field.overwritten";
    case WarningCode::kOverrideInconsistent: return "override.inconsistent";
    case WarningCode::kNonOwningFieldAssignment: return "non.owning.field.assignment";
  }
  return "?";
}

bool warning_less(const Warning& a, const Warning& b) {
  return std::make_tuple(std::cref(a.file), a.line, to_string(a.code), std::cref(a.message)) <
         std::make_tuple(std::cref(b.file), b.line, to_string(b.code), std::cref(b.message));
}

void sort_warnings(std::vector<Warning>& warnings) {
  std::sort(warnings.begin(), warnings.end(), warning_less);
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
}

std::string format_warning(const Warning& w) {
  return w.file + ":" + std::to_string(w.line) + ": " + std::string(to_string(w.code)) + ": " + w.message;
}

std::string format_warning_json(const Warning& w) {
  nlohmann::json j;
  j["file"] = w.file;
  j["line"] = w.line;
  j["code"] = to_string(w.code);
  j["message"] = w.message;
  j["obligation"] = w.obligation ? nlohmann::json(*w.obligation) : nlohmann::json(nullptr);
  return j.dump();
}

namespace {

std::string join(const std::set<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

// ---- obligation dataflow ----

// One tracked obligation: the names currently known to refer to it and the
// statement (or negative parameter slot) that created it.
struct Pair {
  int source = 0;
  std::set<std::string> names;

  auto operator<=>(const Pair&) const = default;
};

using State = std::set<Pair>;

struct SourceInfo {
  int line = 0;
  std::string what;
  std::set<std::string> methods;
};

class ObligationChecker {
 public:
  ObligationChecker(const VerifyContext& ctx, MethodId m)
      : ctx_(ctx), p_(ctx.program), m_(m), mi_(p_.method(m)), cfg_(ctx.cfgs.at(m)) {}

  std::vector<Warning> run() {
    std::vector<std::optional<State>> in(cfg_.size());
    in[Cfg::kEntry] = entry_state();
    std::deque<NodeId> work{Cfg::kEntry};
    while (!work.empty()) {
      NodeId n = work.front();
      work.pop_front();
      auto [normal, exceptional] = transfer(n, *in[static_cast<std::size_t>(n)], nullptr);
      for (const auto& e : cfg_.node(n).succs) {
        const State& out = e.kind == EdgeKind::kNormal ? normal : exceptional;
        auto& slot = in[static_cast<std::size_t>(e.to)];
        State merged = slot.value_or(State{});
        std::size_t before = slot ? merged.size() : 0;
        merged.insert(out.begin(), out.end());
        if (!slot || merged.size() != before) {
          slot = std::move(merged);
          if (std::find(work.begin(), work.end(), e.to) == work.end()) work.push_back(e.to);
        }
      }
    }

    std::vector<Warning> out;
    for (std::size_t n = 0; n < cfg_.size(); ++n) {
      if (!in[n]) continue;
      if (n == Cfg::kNormalExit || n == Cfg::kExceptionalExit) {
        for (const auto& pair : *in[n]) leak(pair.source, out);
      } else {
        transfer(static_cast<NodeId>(n), *in[n], &out);
      }
    }
    return out;
  }

 private:
  State entry_state() {
    State s;
    for (std::size_t i = 0; i < mi_.params.size(); ++i) {
      if (!ctx_.store.param_owning(m_, static_cast<int>(i))) continue;
      auto methods = obligation_of(p_, ctx_.store, mi_.params[i].type);
      if (methods.empty()) continue;
      int source = -1 - static_cast<int>(i);
      sources_[source] = {mi_.pos.line, "@Owning parameter '" + mi_.params[i].name + "'", methods};
      s.insert(Pair{source, {mi_.params[i].name}});
    }
    return s;
  }

  void leak(int source, std::vector<Warning>& out) const {
    const SourceInfo& info = sources_.at(source);
    Warning w;
    w.code = WarningCode::kRequiredMethodNotCalled;
    w.file = p_.file_of(m_);
    w.line = info.line;
    w.message = info.what + " may leak: " + join(info.methods) + " not called on every path";
    w.obligation = std::vector<std::string>(info.methods.begin(), info.methods.end());
    out.push_back(std::move(w));
  }

  // Removes `name` from every pair; pairs left without names leak.
  void kill(State& s, const std::string& name, std::vector<Warning>* out) const {
    State next;
    for (Pair pair : s) {
      if (pair.names.erase(name) > 0 && pair.names.empty()) {
        if (out != nullptr) leak(pair.source, *out);
        continue;
      }
      next.insert(std::move(pair));
    }
    s = std::move(next);
  }

  static void discharge(State& s, const std::string& name) {
    std::erase_if(s, [&](const Pair& pair) { return pair.names.contains(name); });
  }

  static bool tracked(const State& s, const std::string& name) {
    return std::any_of(s.begin(), s.end(), [&](const Pair& p) { return p.names.contains(name); });
  }

  static void add_name(State& s, const std::string& to, const std::string& name) {
    State next;
    for (Pair pair : s) {
      if (pair.names.contains(to)) pair.names.insert(name);
      next.insert(std::move(pair));
    }
    s = std::move(next);
  }

  std::set<std::string> obligation_of_name(const std::string& name) const {
    auto t = p_.type_of(m_, name);
    if (!t) return {};
    return obligation_of(p_, ctx_.store, *t);
  }

  // Arguments handed to `callee`: Owning parameters take the obligation
  // over. A method owns its argument even when it throws; a constructor
  // that throws never took it. The @ResourceAlias argument is returned.
  std::optional<std::string> pass_args(State& normal, State& exceptional, MethodId callee,
                                       const std::vector<Operand>& args) const {
    std::optional<std::string> alias_arg;
    bool ctor = p_.method(callee).is_constructor();
    auto ra = ctx_.store.return_resource_alias(callee) ? ctx_.store.resource_alias_param(callee) : std::nullopt;
    for (std::size_t j = 0; j < args.size(); ++j) {
      if (ra && *ra == static_cast<int>(j)) {
        alias_arg = args[j].key();
      } else if (ctx_.store.param_owning(callee, static_cast<int>(j))) {
        discharge(normal, args[j].key());
        if (!ctor) discharge(exceptional, args[j].key());
      }
    }
    return alias_arg;
  }

  void call_effects(State& normal, State& exceptional, const CallExpr& call) const {
    std::string recv = call.receiver_key();
    if (!recv.empty() && recv != "this" && obligation_of_name(recv).contains(call.method)) {
      discharge(normal, recv);
      discharge(exceptional, recv);
    }
    if (recv == "this") {
      // A this-call whose @Calls covers a field tracked in some pair.
      for (const auto& e : ctx_.store.calls(call.target)) {
        std::string f = "this." + p_.field(e.field).name;
        if (field_disposal(p_, ctx_.store, e.field).contains(e.method)) discharge(normal, f);
      }
    }
  }

  // Result binding for `x = new C(..)` / `x = m(..)`.
  void bind_result(State& normal, const Stmt& s, const std::string& x, ClassId type, MethodId callee,
                   const std::optional<std::string>& alias_arg, std::vector<Warning>* out) {
    bool result_owned = !ctx_.store.return_not_owning(callee);
    bool arg_tracked = alias_arg && *alias_arg != x && tracked(normal, *alias_arg);
    if (alias_arg && *alias_arg == x) return;  // x keeps naming the same resource
    kill(normal, x, out);
    auto methods = obligation_of(p_, ctx_.store, type);
    if (arg_tracked) {
      add_name(normal, *alias_arg, x);
      return;
    }
    if (methods.empty() || !result_owned) return;
    sources_[s.id.value] = {s.pos.line, "resource from '" + print_stmt_line(s) + "'", methods};
    Pair pair{s.id.value, {x}};
    if (alias_arg) pair.names.insert(*alias_arg);
    normal.insert(std::move(pair));
  }

  std::pair<State, State> transfer(NodeId n, const State& in, std::vector<Warning>* out) {
    State normal = in;
    State exceptional = in;
    const Stmt* sp = cfg_.node(n).stmt;
    if (sp == nullptr) return {normal, exceptional};
    const Stmt& s = *sp;

    if (const auto* a = s.as<AssignStmt>()) {
      const std::string& x = a->var;
      if (const auto* r = std::get_if<ReadExpr>(&a->rhs)) {
        std::string src = r->source.key();
        if (src != x) {
          kill(normal, x, out);
          if (!r->source.is_field) add_name(normal, src, x);
        }
      } else if (std::holds_alternative<NullExpr>(a->rhs)) {
        kill(normal, x, out);
      } else if (const auto* ne = std::get_if<NewExpr>(&a->rhs)) {
        auto alias_arg = pass_args(normal, exceptional, ne->ctor, ne->args);
        bind_result(normal, s, x, ne->cls, ne->ctor, alias_arg, out);
      } else if (const auto* c = std::get_if<CallExpr>(&a->rhs)) {
        call_effects(normal, exceptional, *c);
        auto alias_arg = pass_args(normal, exceptional, c->target, c->args);
        bind_result(normal, s, x, *p_.method(c->target).return_type, c->target, alias_arg, out);
      }
    } else if (const auto* c = s.as<CallStmt>()) {
      call_effects(normal, exceptional, c->call);
      pass_args(normal, exceptional, c->call.target, c->call.args);
    } else if (const auto* d = s.as<CtorCallStmt>()) {
      pass_args(normal, exceptional, d->target, d->args);
    } else if (const auto* w = s.as<FieldWriteStmt>()) {
      std::string f = "this." + w->field;
      kill(normal, f, out);
      if (w->value && tracked(normal, *w->value)) {
        if (!ctx_.store.field_owning(w->resolved) && out != nullptr) {
          Warning warn;
          warn.code = WarningCode::kNonOwningFieldAssignment;
          warn.file = p_.file_of(m_);
          warn.line = s.pos.line;
          warn.message = "resource assigned to non-@Owning field " + p_.qualified_name(w->resolved);
          out->push_back(std::move(warn));
        }
        discharge(normal, *w->value);
      }
    } else if (const auto* r = s.as<ReturnStmt>()) {
      if (r->value && mi_.return_type && !ctx_.store.return_not_owning(m_)) discharge(normal, r->value->key());
    }
    return {normal, exceptional};
  }

  const VerifyContext& ctx_;
  const Program& p_;
  MethodId m_;
  const MethodInfo& mi_;
  const Cfg& cfg_;
  std::map<int, SourceInfo> sources_;
};

// ---- @Calls must-analysis ----

class CallsChecker {
 public:
  CallsChecker(const VerifyContext& ctx, MethodId m)
      : ctx_(ctx), p_(ctx.program), m_(m), cfg_(ctx.cfgs.at(m)), aliases_(ctx.aliases.at(m)) {}

  std::optional<Warning> run() {
    const auto& required = ctx_.store.calls(m_);
    if (required.empty()) return std::nullopt;
    using Sat = std::set<CallsEntry>;
    std::vector<std::optional<Sat>> in(cfg_.size());
    in[Cfg::kEntry] = Sat{};
    std::deque<NodeId> work{Cfg::kEntry};
    while (!work.empty()) {
      NodeId n = work.front();
      work.pop_front();
      auto [normal, exceptional] = transfer(n, *in[static_cast<std::size_t>(n)]);
      for (const auto& e : cfg_.node(n).succs) {
        const Sat& out = e.kind == EdgeKind::kNormal ? normal : exceptional;
        auto& slot = in[static_cast<std::size_t>(e.to)];
        Sat merged;
        if (slot) {
          std::set_intersection(slot->begin(), slot->end(), out.begin(), out.end(),
                                std::inserter(merged, merged.end()));
        } else {
          merged = out;
        }
        if (!slot || merged != *slot) {
          slot = std::move(merged);
          if (std::find(work.begin(), work.end(), e.to) == work.end()) work.push_back(e.to);
        }
      }
    }

    // Earliest violation: a throwing statement whose exceptional edge leaves
    // something unsatisfied, or the normal exit.
    std::optional<int> line;
    std::set<std::string> missing;
    auto note = [&](const Sat& have, std::optional<int> at) {
      std::set<std::string> miss;
      for (const auto& e : required) {
        if (!have.contains(e)) miss.insert("this." + p_.field(e.field).name + "." + e.method + "()");
      }
      if (miss.empty()) return;
      int l = at.value_or(p_.method(m_).pos.line);
      if (!line || l < *line) {
        line = l;
        missing = miss;
      }
    };
    for (std::size_t n = 3; n < cfg_.size(); ++n) {
      if (!in[n]) continue;
      for (const auto& e : cfg_.node(static_cast<NodeId>(n)).succs) {
        if (e.kind != EdgeKind::kExceptional) continue;
        note(transfer(static_cast<NodeId>(n), *in[n]).second, cfg_.node(static_cast<NodeId>(n)).stmt->pos.line);
      }
    }
    if (in[Cfg::kNormalExit]) note(*in[Cfg::kNormalExit], std::nullopt);
    if (!line) return std::nullopt;
    Warning w;
    w.code = WarningCode::kCallsNotVerified;
    w.file = p_.file_of(m_);
    w.line = *line;
    w.message = "@Calls on " + p_.qualified_name(m_) + " not guaranteed: " + join(missing) + " may be skipped";
    return w;
  }

 private:
  std::pair<std::set<CallsEntry>, std::set<CallsEntry>> transfer(NodeId n, const std::set<CallsEntry>& in) const {
    auto normal = in;
    auto exceptional = in;
    const Stmt* s = cfg_.node(n).stmt;
    if (s == nullptr) return {normal, exceptional};
    const auto& mi = p_.method(m_);
    auto field_of = [&](const std::string& key) -> std::optional<FieldId> {
      for (FieldId f : all_fields(mi.owner)) {
        std::string fk = "this." + p_.field(f).name;
        if (aliases_.is_resource_alias(s->id, fk, key)) return f;
      }
      return std::nullopt;
    };
    auto pass = [&](MethodId callee, const std::vector<Operand>& args) {
      for (std::size_t j = 0; j < args.size(); ++j) {
        if (!ctx_.store.param_owning(callee, static_cast<int>(j))) continue;
        if (auto f = field_of(args[j].key())) {
          for (const auto& md : field_disposal(p_, ctx_.store, *f)) {
            normal.insert({*f, md});
            if (!p_.method(callee).is_constructor()) exceptional.insert({*f, md});
          }
        }
      }
    };
    if (const auto* c = call_of(*s)) {
      std::string recv = c->receiver_key();
      if (recv == "this") {
        for (const auto& e : ctx_.store.calls(c->target)) normal.insert(e);
      } else if (!recv.empty()) {
        if (auto f = field_of(recv)) {
          normal.insert({*f, c->method});
          exceptional.insert({*f, c->method});
        }
      }
      pass(c->target, c->args);
    } else if (const auto* ne = new_of(*s)) {
      pass(ne->ctor, ne->args);
    } else if (const auto* d = s->as<CtorCallStmt>()) {
      pass(d->target, d->args);
    }
    if (const auto* w = s->as<FieldWriteStmt>(); w != nullptr && w->value) {
      std::erase_if(normal, [&](const CallsEntry& e) { return e.field == w->resolved; });
    }
    return {normal, exceptional};
  }

  std::vector<FieldId> all_fields(ClassId c) const {
    std::vector<FieldId> out;
    for (std::optional<ClassId> k = c; k; k = p_.cls(*k).superclass) {
      out.insert(out.end(), p_.cls(*k).fields.begin(), p_.cls(*k).fields.end());
    }
    return out;
  }

  const VerifyContext& ctx_;
  const Program& p_;
  MethodId m_;
  const Cfg& cfg_;
  const AliasState& aliases_;
};

}  // namespace

std::vector<Warning> check_method_obligations(const VerifyContext& ctx, MethodId method) {
  if (!ctx.cfgs.contains(method)) return {};
  return ObligationChecker(ctx, method).run();
}

std::optional<Warning> check_calls_annotation(const VerifyContext& ctx, MethodId method) {
  if (!ctx.cfgs.contains(method)) return std::nullopt;
  return CallsChecker(ctx, method).run();
}

std::vector<Warning> check_owning_fields(const VerifyContext& ctx, ClassId cls) {
  const Program& p = ctx.program;
  std::vector<Warning> out;
  auto must_call = effective_must_call(p, ctx.store, cls);
  for (FieldId f : owning_fields(p, ctx.store, cls)) {
    auto fd = field_disposal(p, ctx.store, f);
    if (fd.empty()) continue;
    bool covered = false;
    for (const auto& name : must_call.value_or(std::set<std::string>{})) {
      auto m = p.lookup_method(cls, name);
      if (!m) continue;
      bool all = std::all_of(fd.begin(), fd.end(), [&](const std::string& md) { return ctx.store.has_calls(*m, f, md); });
      covered = covered || all;
    }
    if (!covered) {
      Warning w;
      w.code = WarningCode::kOwningFieldNotCovered;
      w.file = p.file_of(cls);
      w.line = p.field(f).pos.line;
      w.message = "@Owning field " + p.qualified_name(f) + " is not released by any @MustCall method of " +
                  p.cls(cls).name + " (needs " + join(fd) + ")";
      w.obligation = std::vector<std::string>(fd.begin(), fd.end());
      out.push_back(std::move(w));
    }
  }
  for (MethodId m : p.cls(cls).methods) {
    const auto& mi = p.method(m);
    if (!mi.body) continue;
    for_each_stmt(*mi.body, [&](const Stmt& s) {
      const auto* w = s.as<FieldWriteStmt>();
      if (w == nullptr || !w->value || !ctx.store.field_owning(w->resolved)) return;
      Warning warn;
      warn.code = WarningCode::kOwningFieldOverwritten;
      warn.file = p.file_of(m);
      warn.line = s.pos.line;
      warn.message = "@Owning field " + p.qualified_name(w->resolved) + " overwritten outside a constructor";
      out.push_back(std::move(warn));
    });
  }
  return out;
}

std::optional<Warning> check_resource_alias_annotation(const VerifyContext& ctx, MethodId method) {
  const Program& p = ctx.program;
  auto idx = ctx.store.resource_alias_param(method);
  if (!idx || !ctx.store.return_resource_alias(method) || !ctx.cfgs.contains(method)) return std::nullopt;
  const Cfg& cfg = ctx.cfgs.at(method);
  const AliasState& al = ctx.aliases.at(method);
  const MethodInfo& mi = p.method(method);
  bool ok = false;
  if (mi.is_constructor()) {
    ok = owning_fields(p, ctx.store, mi.owner).size() == 1 &&
         always_written_to_owning_field(p, cfg, al, ctx.store, *idx);
    const std::string& param = mi.params[static_cast<std::size_t>(*idx)].name;
    ok = ok || forall_normal_paths_exists(cfg, [&](const Stmt& s) {
           const auto* d = s.as<CtorCallStmt>();
           if (d == nullptr) return false;
           auto j = ctx.store.resource_alias_param(d->target);
           return j && ctx.store.return_resource_alias(d->target) &&
                  al.is_resource_alias(s.id, param, d->args[static_cast<std::size_t>(*j)].key());
         });
  } else {
    ok = mi.return_type && always_returns_alias_of(p, cfg, al, *idx);
  }
  if (ok) return std::nullopt;
  Warning w;
  w.code = WarningCode::kResourceAliasNotVerified;
  w.file = p.file_of(method);
  w.line = mi.pos.line;
  w.message = "@ResourceAlias pair on " + p.qualified_name(method) + " (parameter '" +
              mi.params[static_cast<std::size_t>(*idx)].name + "') cannot be verified";
  return w;
}

std::vector<Warning> check_override_consistency(const Program& program, const AnnotationStore& store) {
  std::vector<Warning> out;
  for (const auto& mi : program.methods) {
    auto base = program.overridden(mi.id);
    if (!base) continue;
    auto warn = [&](const std::string& why) {
      Warning w;
      w.code = WarningCode::kOverrideInconsistent;
      w.file = program.file_of(mi.id);
      w.line = mi.pos.line;
      w.message = program.qualified_name(mi.id) + " overrides " + program.qualified_name(*base) + " but " + why;
      out.push_back(std::move(w));
    };
    const auto& sub_calls = store.calls(mi.id);
    for (const auto& e : store.calls(*base)) {
      if (!sub_calls.contains(e)) {
        warn("does not guarantee " + program.qualified_name(e.field) + "." + e.method + "() (@Calls)");
      }
    }
    for (std::size_t i = 0; i < mi.params.size(); ++i) {
      auto idx = static_cast<int>(i);
      if (store.param_owning(*base, idx) && !store.param_owning(mi.id, idx)) {
        warn("parameter '" + mi.params[i].name + "' is not @Owning");
      }
    }
    if (store.return_not_owning(*base) && !store.return_not_owning(mi.id)) warn("its result is not @NotOwning");
  }
  return out;
}

std::vector<Warning> verify_program(const Program& program, const CfgSet& cfgs, const AnnotationStore& store) {
  AliasSet aliases = compute_all_aliases(program, cfgs, store);
  VerifyContext ctx{program, cfgs, store, aliases};
  std::vector<Warning> out;
  for (const auto& [m, _] : cfgs) {
    auto w = check_method_obligations(ctx, m);
    out.insert(out.end(), w.begin(), w.end());
    if (auto c = check_calls_annotation(ctx, m)) out.push_back(*c);
    if (auto r = check_resource_alias_annotation(ctx, m)) out.push_back(*r);
  }
  for (const auto& c : program.classes) {
    auto w = check_owning_fields(ctx, c.id);
    out.insert(out.end(), w.begin(), w.end());
  }
  auto o = check_override_consistency(program, store);
  out.insert(out.end(), o.begin(), o.end());
  sort_warnings(out);
  return out;
}

}  // namespace rms
