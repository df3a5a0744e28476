#include "rms/infer.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <tuple>

namespace rms {

namespace {

std::optional<FieldId> field_of_key(const Program& program, MethodId m, const std::string& key) {
  if (!key.starts_with("this.")) return std::nullopt;
  return program.lookup_field(program.method(m).owner, key.substr(5));
}

std::optional<int> param_of_key(const Program& program, MethodId m, const std::string& key) {
  return program.method(m).param_index(key);
}

AnnotRecord calls_record(MethodId m, FieldId f, const std::string& name) {
  AnnotRecord r;
  r.site = SiteKind::kMethod;
  r.owner = m.value;
  r.kind = AnnotKind::kCalls;
  r.field = f.value;
  r.methods = {name};
  return r;
}

AnnotRecord param_record(MethodId m, int index, AnnotKind kind) {
  AnnotRecord r;
  r.site = SiteKind::kParam;
  r.owner = m.value;
  r.index = index;
  r.kind = kind;
  return r;
}

AnnotRecord return_record(MethodId m, AnnotKind kind) {
  AnnotRecord r;
  r.site = SiteKind::kReturn;
  r.owner = m.value;
  r.kind = kind;
  return r;
}

// Classes C depends on: types of C's own fields and C's superclass.
std::vector<ClassId> direct_dependencies(const Program& program, ClassId c) {
  std::set<ClassId> deps;
  for (FieldId f : program.cls(c).fields) deps.insert(program.field(f).type);
  if (auto s = program.cls(c).superclass) deps.insert(*s);
  deps.erase(c);
  return {deps.begin(), deps.end()};
}

bool depends_transitively(const Program& program, ClassId from, const std::set<ClassId>& targets) {
  std::set<ClassId> seen{from};
  std::vector<ClassId> stack{from};
  while (!stack.empty()) {
    ClassId c = stack.back();
    stack.pop_back();
    for (ClassId d : direct_dependencies(program, c)) {
      if (targets.contains(d)) return true;
      if (seen.insert(d).second) stack.push_back(d);
    }
  }
  return false;
}

}  // namespace

std::vector<ClassId> class_dependency_order(const Program& program) {
  std::size_t n = program.classes.size();
  std::vector<std::set<ClassId>> pending(n);     // dependencies not yet emitted
  std::vector<std::vector<ClassId>> users(n);    // reverse edges
  for (const auto& c : program.classes) {
    for (ClassId d : direct_dependencies(program, c.id)) {
      pending[c.id.index()].insert(d);
      users[d.index()].push_back(c.id);
    }
  }
  auto by_name = [&](ClassId a, ClassId b) { return program.cls(a).name > program.cls(b).name; };
  std::priority_queue<ClassId, std::vector<ClassId>, decltype(by_name)> ready(by_name);
  std::vector<bool> done(n, false);
  for (const auto& c : program.classes) {
    if (pending[c.id.index()].empty()) ready.push(c.id);
  }
  std::vector<ClassId> order;
  auto emit = [&](ClassId c) {
    done[c.index()] = true;
    order.push_back(c);
    for (ClassId u : users[c.index()]) {
      auto& p = pending[u.index()];
      if (p.erase(c) > 0 && p.empty() && !done[u.index()]) ready.push(u);
    }
  };
  while (order.size() < n) {
    if (ready.empty()) {
      // Cycle: release the lexicographically smallest remaining class.
      std::optional<ClassId> pick;
      for (const auto& c : program.classes) {
        if (!done[c.id.index()] && (!pick || c.name < program.cls(*pick).name)) pick = c.id;
      }
      pending[pick->index()].clear();
      ready.push(*pick);
    }
    ClassId c = ready.top();
    ready.pop();
    if (!done[c.index()]) emit(c);
  }
  return order;
}

MethodId pick_disposal_method(const Program& program, std::vector<MethodId> candidates) {
  static constexpr std::array<std::string_view, 6> kPreferred = {"close", "dispose", "shutdown",
                                                                  "stop",  "release", "cleanup"};
  auto rank = [](const std::string& name) {
    auto it = std::find(kPreferred.begin(), kPreferred.end(), name);
    return static_cast<std::size_t>(it - kPreferred.begin());
  };
  return *std::min_element(candidates.begin(), candidates.end(), [&](MethodId a, MethodId b) {
    const auto& na = program.method(a).name;
    const auto& nb = program.method(b).name;
    return std::make_pair(rank(na), na) < std::make_pair(rank(nb), nb);
  });
}

bool always_written_to_owning_field(const Program& program, const Cfg& cfg, const AliasState& aliases,
                                    const AnnotationStore& store, int index) {
  const auto& p = program.method(cfg.method()).params[static_cast<std::size_t>(index)].name;
  return forall_normal_paths_exists(cfg, [&](const Stmt& s) {
    const auto* w = s.as<FieldWriteStmt>();
    return w != nullptr && w->value && store.field_owning(w->resolved) &&
           aliases.is_resource_alias(s.id, p, *w->value) &&
           not_written_after(cfg, w->resolved, s.id, NullWrites::kIgnore);
  });
}

bool always_returns_alias_of(const Program& program, const Cfg& cfg, const AliasState& aliases, int index) {
  const auto& p = program.method(cfg.method()).params[static_cast<std::size_t>(index)].name;
  return forall_normal_paths_exists(cfg, [&](const Stmt& s) {
    const auto* r = s.as<ReturnStmt>();
    return r != nullptr && r->value && aliases.is_resource_alias(s.id, p, r->value->key());
  });
}

// Rules 4, 5, 6.
std::vector<RuleAddition> infer_calls(const Program& program, const CfgSet& cfgs, const FactBase& facts,
                                      const AnnotationStore& store) {
  std::vector<RuleAddition> out;
  for (const auto& [m, cfg] : cfgs) {
    const MethodInfo& mi = program.method(m);
    if (mi.is_constructor() || !mi.has_receiver()) continue;
    for (const auto& inv : facts.query_invokes(m)) {
      // Rule 4: m_fd invoked directly on this.f.
      if (auto f = field_of_key(program, m, inv.receiver)) {
        auto fd = field_disposal(program, store, *f);
        if (fd.contains(inv.callee_name) && not_written_after(cfg, *f, inv.stmt, NullWrites::kIgnore)) {
          out.push_back({calls_record(m, *f, inv.callee_name), 4});
        }
      }
      // Rule 5: a this-call to a method that already guarantees the disposal.
      if (inv.receiver == "this") {
        for (const auto& e : store.calls(inv.callee)) {
          if (field_disposal(program, store, e.field).contains(e.method) &&
              not_written_after(cfg, e.field, inv.stmt, NullWrites::kIgnore)) {
            out.push_back({calls_record(m, e.field, e.method), 5});
          }
        }
      }
      // Rule 6: this.f passed to an @Owning parameter.
      for (std::size_t j = 0; j < inv.args.size(); ++j) {
        auto f = field_of_key(program, m, inv.args[j]);
        if (!f || !store.param_owning(inv.callee, static_cast<int>(j))) continue;
        if (!not_written_after(cfg, *f, inv.stmt, NullWrites::kIgnore)) continue;
        ClassId ptype = program.method(inv.callee).params[j].type;
        for (const auto& name : obligation_of(program, store, ptype)) out.push_back({calls_record(m, *f, name), 6});
      }
    }
  }
  return out;
}

// Rules 7, 8.
std::vector<RuleAddition> infer_owning_params_phase1(const Program& program, const FactBase& facts,
                                                     const AnnotationStore& store) {
  std::vector<RuleAddition> out;
  for (const auto& mi : program.methods) {
    for (const auto& inv : facts.query_invokes(mi.id)) {
      if (auto i = param_of_key(program, mi.id, inv.receiver)) {
        auto mpd = obligation_of(program, store, mi.params[static_cast<std::size_t>(*i)].type);
        if (mpd.contains(inv.callee_name)) out.push_back({param_record(mi.id, *i, AnnotKind::kOwning), 7});
      }
      for (std::size_t j = 0; j < inv.args.size(); ++j) {
        auto i = param_of_key(program, mi.id, inv.args[j]);
        if (i && store.param_owning(inv.callee, static_cast<int>(j))) {
          out.push_back({param_record(mi.id, *i, AnnotKind::kOwning), 8});
        }
      }
    }
  }
  return out;
}

// Rule 2.
std::vector<RuleAddition> infer_owning_fields(const Program& program, const FactBase& facts,
                                              const AnnotationStore& store) {
  std::vector<RuleAddition> out;
  for (const auto& [f, c] : facts.all_fields()) {
    auto fd = field_disposal(program, store, f);
    if (fd.empty()) continue;
    bool covered = false;
    for (MethodId m : facts.query_method(c)) {
      for (const auto& e : store.calls(m)) covered = covered || (e.field == f && fd.contains(e.method));
    }
    if (covered) {
      AnnotRecord r;
      r.site = SiteKind::kField;
      r.owner = f.value;
      r.kind = AnnotKind::kOwning;
      out.push_back({r, 2});
    }
  }
  return out;
}

// Rule 1, one step in class order. A class is deferred when it depends on a
// class annotated earlier in the same step, so its fields are re-examined
// against the new @MustCall first.
std::vector<RuleAddition> infer_class_must_call(const Program& program, const FactBase& facts,
                                                const AnnotationStore& store, const std::vector<ClassId>& order) {
  std::vector<RuleAddition> out;
  std::set<ClassId> annotated;
  for (ClassId c : order) {
    if (effective_must_call(program, store, c)) continue;
    std::set<CallsEntry> required;
    for (FieldId f : owning_fields(program, store, c)) {
      for (const auto& name : field_disposal(program, store, f)) required.insert({f, name});
    }
    if (required.empty()) continue;
    std::vector<MethodId> candidates;
    for (MethodId m : facts.query_method(c)) {
      const MethodInfo& mi = program.method(m);
      if (mi.kind != MethodKind::kInstance || !mi.body) continue;
      const auto& calls = store.calls(m);
      if (std::includes(calls.begin(), calls.end(), required.begin(), required.end())) candidates.push_back(m);
    }
    if (candidates.empty() || depends_transitively(program, c, annotated)) continue;
    MethodId pick = pick_disposal_method(program, candidates);
    AnnotRecord r;
    r.site = SiteKind::kClass;
    r.owner = c.value;
    r.kind = AnnotKind::kMustCall;
    r.methods = {program.method(pick).name};
    out.push_back({r, 1});
    annotated.insert(c);
  }
  return out;
}

// Rules 10, 11, 12 (rule 9 via always_written_to_owning_field).
std::vector<RuleAddition> infer_owning_params_phase2(const Program& program, const CfgSet& cfgs,
                                                     const FactBase& facts, const AliasSet& aliases,
                                                     const AnnotationStore& store) {
  std::vector<RuleAddition> out;
  for (const auto& [m, cfg] : cfgs) {
    const MethodInfo& mi = program.method(m);
    const AliasState& al = aliases.at(m);
    for (std::size_t i = 0; i < mi.params.size(); ++i) {
      const std::string& p = mi.params[i].name;
      auto idx = static_cast<int>(i);
      auto mpd = obligation_of(program, store, mi.params[i].type);
      for (const auto& inv : facts.query_invokes(m)) {
        for (std::size_t j = 0; j < inv.args.size(); ++j) {
          if (store.param_owning(inv.callee, static_cast<int>(j)) && al.is_resource_alias(inv.stmt, p, inv.args[j])) {
            out.push_back({param_record(m, idx, AnnotKind::kOwning), 10});
          }
        }
        if (!inv.receiver.empty() && mpd.contains(inv.callee_name) && al.is_resource_alias(inv.stmt, p, inv.receiver)) {
          out.push_back({param_record(m, idx, AnnotKind::kOwning), 12});
        }
      }
      if (mi.is_constructor() && owning_fields(program, store, mi.owner).size() > 1 &&
          always_written_to_owning_field(program, cfg, al, store, idx)) {
        out.push_back({param_record(m, idx, AnnotKind::kOwning), 11});
      }
    }
  }
  return out;
}

// Rules 13, 14, 15.
std::vector<RuleAddition> infer_resource_alias(const Program& program, const CfgSet& cfgs, const FactBase& facts,
                                               const AliasSet& aliases, const AnnotationStore& store) {
  std::vector<RuleAddition> out;
  auto pair = [&](MethodId m, int i, int rule) {
    out.push_back({param_record(m, i, AnnotKind::kResourceAlias), rule});
    out.push_back({return_record(m, AnnotKind::kResourceAlias), rule});
  };
  for (const auto& [m, cfg] : cfgs) {
    const MethodInfo& mi = program.method(m);
    const AliasState& al = aliases.at(m);
    for (std::size_t i = 0; i < mi.params.size(); ++i) {
      auto idx = static_cast<int>(i);
      const std::string& p = mi.params[i].name;
      if (mi.is_constructor()) {
        if (owning_fields(program, store, mi.owner).size() == 1 &&
            always_written_to_owning_field(program, cfg, al, store, idx)) {
          pair(m, idx, 13);
        }
        for (const auto& d : facts.query_this_or_super_call(m)) {
          auto target_param = store.resource_alias_param(d.target);
          if (!target_param || !store.return_resource_alias(d.target)) continue;
          if (al.is_resource_alias(d.stmt, p, d.args[static_cast<std::size_t>(*target_param)])) pair(m, idx, 14);
        }
      } else if (mi.return_type && always_returns_alias_of(program, cfg, al, idx)) {
        pair(m, idx, 15);
      }
    }
  }
  return out;
}

// Rule 16.
std::vector<RuleAddition> infer_not_owning_return(const Program& program, const FactBase& facts,
                                                  const AliasSet& aliases, const AnnotationStore& store) {
  std::vector<RuleAddition> out;
  for (const auto& [m, al] : aliases) {
    const MethodInfo& mi = program.method(m);
    if (mi.is_constructor()) continue;
    auto t = facts.query_return_type(m);
    if (!t || obligation_of(program, store, *t).empty()) continue;
    for (const auto& ret : facts.query_returns(m)) {
      for (FieldId f : facts.query_field(mi.owner)) {
        if (al.is_resource_alias(ret.stmt, "this." + program.field(f).name, ret.value)) {
          out.push_back({return_record(m, AnnotKind::kNotOwning), 16});
        }
      }
    }
  }
  return out;
}

namespace {

class Engine {
 public:
  Engine(const Program& program, const CfgSet& cfgs, const FactBase& facts, AnnotationStore seed,
         const InferOptions& options)
      : program_(program), cfgs_(cfgs), facts_(facts), options_(options) {
    result_.store = std::move(seed);
    order_ = class_dependency_order(program);
  }

  InferenceResult run() {
    bool phase2_added = false;
    do {
      phase1();
      phase2_added = phase2();
    } while (phase2_added);
    return std::move(result_);
  }

 private:
  // Merges one round's additions; returns how many landed.
  std::size_t merge(std::vector<RuleAddition> adds) {
    if (++result_.rounds > options_.max_rounds) {
      throw InferenceDiverged("inference did not reach a fixed point within " + std::to_string(options_.max_rounds) +
                              " rounds");
    }
    std::sort(adds.begin(), adds.end(), [](const RuleAddition& a, const RuleAddition& b) {
      return std::tie(a.record, a.rule) < std::tie(b.record, b.rule);
    });
    std::size_t landed = 0;
    for (std::size_t i = 0; i < adds.size(); ++i) {
      const auto& a = adds[i];
      if (a.record.kind == AnnotKind::kResourceAlias) {
        if (a.record.site != SiteKind::kParam) continue;  // the return half travels with its param
        AnnotRecord ret = a.record;
        ret.site = SiteKind::kReturn;
        ret.index = 0;
        bool had_param = result_.store.contains(a.record);
        bool had_ret = result_.store.contains(ret);
        if (result_.store.add_resource_alias_pair(MethodId(a.record.owner), a.record.index,
                                                  Provenance::from_rule(a.rule))) {
          if (!had_param) log(a.record, a.rule);
          if (!had_ret) log(ret, a.rule);
          ++landed;
          alias_dirty_ = true;
        }
        continue;
      }
      if (result_.store.add(a.record, Provenance::from_rule(a.rule))) {
        log(a.record, a.rule);
        ++landed;
      }
    }
    result_.size_per_round.push_back(result_.store.size());
    return landed;
  }

  void log(const AnnotRecord& r, int rule) { result_.events.push_back({result_.rounds, r, rule}); }

  void phase1() {
    for (;;) {
      for (;;) {
        const AnnotationStore snap = result_.store;
        std::vector<RuleAddition> adds = infer_owning_fields(program_, facts_, snap);
        append(adds, infer_calls(program_, cfgs_, facts_, snap));
        append(adds, infer_owning_params_phase1(program_, facts_, snap));
        if (merge(std::move(adds)) == 0) break;
      }
      if (merge(infer_class_must_call(program_, facts_, result_.store, order_)) == 0) break;
    }
  }

  bool phase2() {
    bool any = false;
    alias_dirty_ = true;
    for (;;) {
      if (alias_dirty_) {
        aliases_ = compute_all_aliases(program_, cfgs_, result_.store);
        alias_dirty_ = false;
      }
      const AnnotationStore snap = result_.store;
      std::vector<RuleAddition> adds = infer_owning_params_phase2(program_, cfgs_, facts_, aliases_, snap);
      append(adds, infer_resource_alias(program_, cfgs_, facts_, aliases_, snap));
      append(adds, infer_not_owning_return(program_, facts_, aliases_, snap));
      if (merge(std::move(adds)) == 0) return any;
      any = true;
    }
  }

  static void append(std::vector<RuleAddition>& to, std::vector<RuleAddition> from) {
    to.insert(to.end(), std::make_move_iterator(from.begin()), std::make_move_iterator(from.end()));
  }

  const Program& program_;
  const CfgSet& cfgs_;
  const FactBase& facts_;
  InferOptions options_;
  InferenceResult result_;
  std::vector<ClassId> order_;
  AliasSet aliases_;
  bool alias_dirty_ = true;
};

}  // namespace

InferenceResult run_inference(const Program& program, const CfgSet& cfgs, const FactBase& facts,
                              AnnotationStore seed, const InferOptions& options) {
  return Engine(program, cfgs, facts, std::move(seed), options).run();
}

}  // namespace rms
