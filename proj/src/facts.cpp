#include "rms/facts.hpp"

#include <sstream>

#include "rms/printer.hpp"

namespace rms {

namespace {

template <class T>
std::span<const T> lookup(const std::map<MethodId, std::vector<T>>& m, MethodId k) {
  auto it = m.find(k);
  if (it == m.end()) return {};
  return it->second;
}

template <class T>
std::vector<T> flatten(const std::map<MethodId, std::vector<T>>& m) {
  std::vector<T> out;
  for (const auto& [_, v] : m) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<std::string> keys(const std::vector<Operand>& ops) {
  std::vector<std::string> out;
  for (const auto& o : ops) out.push_back(o.key());
  return out;
}

}  // namespace

std::vector<FieldId> FactBase::query_field(ClassId c) const {
  std::vector<FieldId> out;
  for (const auto& [f, cls] : fields_) {
    if (cls == c) out.push_back(f);
  }
  return out;
}

namespace {
std::vector<MethodId> by_class(const std::vector<std::pair<MethodId, ClassId>>& rel, ClassId c) {
  std::vector<MethodId> out;
  for (const auto& [m, cls] : rel) {
    if (cls == c) out.push_back(m);
  }
  return out;
}
}  // namespace

std::vector<MethodId> FactBase::query_method(ClassId c) const { return by_class(methods_, c); }
std::vector<MethodId> FactBase::query_abstract_method(ClassId c) const { return by_class(abstract_methods_, c); }
std::vector<MethodId> FactBase::query_constructor(ClassId c) const { return by_class(constructors_, c); }

std::optional<ClassId> FactBase::query_field_type(FieldId f) const {
  auto it = field_types_.find(f);
  if (it == field_types_.end()) return std::nullopt;
  return it->second;
}

std::optional<ClassId> FactBase::query_return_type(MethodId m) const {
  auto it = return_types_.find(m);
  if (it == return_types_.end()) return std::nullopt;
  return it->second;
}

std::vector<FactBase::ParamTypeFact> FactBase::query_param_type(MethodId m) const {
  auto it = param_types_.find(m);
  if (it == param_types_.end()) return {};
  return it->second;
}

std::span<const InvokesFact> FactBase::query_invokes(MethodId m) const { return lookup(invokes_, m); }
std::span<const WritesFieldFact> FactBase::query_writes_field(MethodId m) const { return lookup(writes_, m); }
std::span<const ReturnsFact> FactBase::query_returns(MethodId m) const { return lookup(returns_, m); }
std::span<const ThisOrSuperCallFact> FactBase::query_this_or_super_call(MethodId m) const {
  return lookup(delegations_, m);
}

std::vector<InvokesFact> FactBase::all_invokes() const { return flatten(invokes_); }
std::vector<WritesFieldFact> FactBase::all_writes_field() const { return flatten(writes_); }
std::vector<ReturnsFact> FactBase::all_returns() const { return flatten(returns_); }
std::vector<ThisOrSuperCallFact> FactBase::all_this_or_super_calls() const { return flatten(delegations_); }

std::size_t FactBase::size() const {
  std::size_t n = fields_.size() + methods_.size() + abstract_methods_.size() + constructors_.size() +
                  field_types_.size() + return_types_.size() + declared_.size();
  for (const auto& [_, v] : param_types_) n += v.size();
  for (const auto& [_, v] : invokes_) n += v.size();
  for (const auto& [_, v] : writes_) n += v.size();
  for (const auto& [_, v] : returns_) n += v.size();
  for (const auto& [_, v] : delegations_) n += v.size();
  return n;
}

FactBase extract_facts(const Program& program, const CfgSet& cfgs) {
  FactBase fb;
  for (const auto& c : program.classes) {
    for (const auto& a : c.annots) fb.declared_.push_back({SiteKind::kClass, c.id.value, 0, a});
  }
  for (const auto& f : program.fields) {
    fb.fields_.emplace_back(f.id, f.owner);
    fb.field_types_[f.id] = f.type;
    for (const auto& a : f.annots) fb.declared_.push_back({SiteKind::kField, f.id.value, 0, a});
  }
  for (const auto& m : program.methods) {
    if (m.is_constructor()) {
      fb.constructors_.emplace_back(m.id, m.owner);
    } else {
      fb.methods_.emplace_back(m.id, m.owner);
      if (m.kind == MethodKind::kAbstract) fb.abstract_methods_.emplace_back(m.id, m.owner);
    }
    if (m.return_type) fb.return_types_[m.id] = *m.return_type;
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      fb.param_types_[m.id].push_back({m.id, static_cast<int>(i), m.params[i].type});
      for (const auto& a : m.params[i].annots) {
        fb.declared_.push_back({SiteKind::kParam, m.id.value, static_cast<int>(i), a});
      }
    }
    for (const auto& a : m.method_annots) fb.declared_.push_back({SiteKind::kMethod, m.id.value, 0, a});
    for (const auto& a : m.return_annots) fb.declared_.push_back({SiteKind::kReturn, m.id.value, 0, a});

    auto cfg = cfgs.find(m.id);
    if (!m.body || cfg == cfgs.end()) continue;
    for_each_stmt(*m.body, [&](const Stmt& s) {
      if (!cfg->second.node_of(s.id)) return;  // unreachable
      if (const auto* c = call_of(s)) {
        fb.invokes_[m.id].push_back({s.id, m.id, c->target, c->method, c->receiver_key(), keys(c->args)});
      } else if (const auto* n = new_of(s)) {
        fb.invokes_[m.id].push_back({s.id, m.id, n->ctor, "<init>", "", keys(n->args)});
      } else if (const auto* w = s.as<FieldWriteStmt>()) {
        fb.writes_[m.id].push_back({s.id, m.id, w->resolved, w->value});
      } else if (const auto* r = s.as<ReturnStmt>()) {
        if (r->value) fb.returns_[m.id].push_back({s.id, m.id, r->value->key()});
      } else if (const auto* d = s.as<CtorCallStmt>()) {
        fb.delegations_[m.id].push_back({s.id, m.id, d->target, keys(d->args)});
        fb.invokes_[m.id].push_back({s.id, m.id, d->target, "<init>", "", keys(d->args)});
      }
    });
  }
  return fb;
}

std::string dump_facts(const Program& program, const FactBase& facts) {
  auto cls = [&](ClassId c) { return program.cls(c).name; };
  auto meth = [&](MethodId m) { return program.qualified_name(m); };
  auto fld = [&](FieldId f) { return program.qualified_name(f); };
  auto sid = [](StmtId s) { return "s" + std::to_string(s.value); };
  auto list = [](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
    return out.empty() ? std::string("-") : out;
  };
  auto or_dash = [](const std::string& s) { return s.empty() ? std::string("-") : s; };

  std::ostringstream os;
  os << "# Field\n";
  for (const auto& [f, c] : facts.all_fields()) os << fld(f) << "\t" << cls(c) << "\n";
  os << "# Method\n";
  for (const auto& [m, c] : facts.all_methods()) os << meth(m) << "\t" << cls(c) << "\n";
  os << "# AbstractMethod\n";
  for (const auto& [m, c] : facts.all_abstract_methods()) os << meth(m) << "\t" << cls(c) << "\n";
  os << "# Constructor\n";
  for (const auto& [m, c] : facts.all_constructors()) os << meth(m) << "\t" << cls(c) << "\n";
  os << "# FieldType\n";
  for (const auto& [f, _] : facts.all_fields()) os << fld(f) << "\t" << cls(*facts.query_field_type(f)) << "\n";
  os << "# ReturnType\n";
  for (const auto& m : program.methods) {
    if (auto t = facts.query_return_type(m.id)) os << meth(m.id) << "\t" << cls(*t) << "\n";
  }
  os << "# ParamType\n";
  for (const auto& m : program.methods) {
    for (const auto& p : facts.query_param_type(m.id)) {
      os << meth(m.id) << "#" << (p.index + 1) << "\t" << cls(p.type) << "\n";
    }
  }
  os << "# Invokes\n";
  for (const auto& f : facts.all_invokes()) {
    os << sid(f.stmt) << "\t" << meth(f.caller) << "\t" << meth(f.callee) << "\t" << or_dash(f.receiver) << "\t"
       << list(f.args) << "\n";
  }
  os << "# WritesField\n";
  for (const auto& f : facts.all_writes_field()) {
    os << sid(f.stmt) << "\t" << meth(f.method) << "\t" << fld(f.field) << "\t" << f.value.value_or("null") << "\n";
  }
  os << "# Returns\n";
  for (const auto& f : facts.all_returns()) os << sid(f.stmt) << "\t" << meth(f.method) << "\t" << f.value << "\n";
  os << "# ThisOrSuperCall\n";
  for (const auto& f : facts.all_this_or_super_calls()) {
    os << sid(f.stmt) << "\t" << meth(f.ctor) << "\t" << meth(f.target) << "\t" << list(f.args) << "\n";
  }
  os << "# DeclaredAnnot\n";
  for (const auto& d : facts.declared()) {
    switch (d.site) {
      case SiteKind::kClass: os << "class " << cls(ClassId(d.owner)); break;
      case SiteKind::kField: os << "field " << fld(FieldId(d.owner)); break;
      case SiteKind::kMethod: os << "method " << meth(MethodId(d.owner)); break;
      case SiteKind::kParam: os << "param " << meth(MethodId(d.owner)) << "#" << (d.index + 1); break;
      case SiteKind::kReturn: os << "return " << meth(MethodId(d.owner)); break;
    }
    os << "\t" << print_annotation(d.annot) << "\n";
  }
  return os.str();
}

}  // namespace rms
