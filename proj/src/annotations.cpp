#include "rms/annotations.hpp"

#include <algorithm>

namespace rms {

namespace {

AnnotRecord make(SiteKind site, int owner, AnnotKind kind, int index = 0) {
  AnnotRecord r;
  r.site = site;
  r.owner = owner;
  r.kind = kind;
  r.index = index;
  return r;
}

}  // namespace

bool AnnotationStore::insert(const AnnotRecord& r, Provenance prov) {
  if (records_.contains(r)) return false;
  auto present = [&](AnnotKind k, int index = 0) { return records_.contains(make(r.site, r.owner, k, index)); };
  switch (r.site) {
    case SiteKind::kClass:
      if (r.kind != AnnotKind::kMustCall || must_call_.contains(ClassId(r.owner))) return false;
      must_call_[ClassId(r.owner)] = std::set<std::string>(r.methods.begin(), r.methods.end());
      break;
    case SiteKind::kField:
      if (r.kind == AnnotKind::kOwning && present(AnnotKind::kNotOwning)) return false;
      if (r.kind == AnnotKind::kNotOwning && present(AnnotKind::kOwning)) return false;
      if (r.kind != AnnotKind::kOwning && r.kind != AnnotKind::kNotOwning) return false;
      break;
    case SiteKind::kMethod:
      if (r.kind != AnnotKind::kCalls || r.methods.size() != 1 || r.field < 0) return false;
      calls_[MethodId(r.owner)].insert(CallsEntry{FieldId(r.field), r.methods.front()});
      break;
    case SiteKind::kParam:
      if (r.kind == AnnotKind::kOwning && present(AnnotKind::kNotOwning, r.index)) return false;
      if (r.kind == AnnotKind::kNotOwning &&
          (present(AnnotKind::kOwning, r.index) || present(AnnotKind::kResourceAlias, r.index))) {
        return false;
      }
      if (r.kind == AnnotKind::kResourceAlias) {
        if (present(AnnotKind::kNotOwning, r.index)) return false;
        auto existing = resource_alias_param(MethodId(r.owner));
        if (existing && *existing != r.index) return false;
      }
      if (r.kind == AnnotKind::kMustCall || r.kind == AnnotKind::kCalls) return false;
      break;
    case SiteKind::kReturn:
      if (r.kind == AnnotKind::kOwning && present(AnnotKind::kNotOwning)) return false;
      if (r.kind == AnnotKind::kNotOwning && (present(AnnotKind::kOwning) || present(AnnotKind::kResourceAlias))) {
        return false;
      }
      if (r.kind == AnnotKind::kResourceAlias && present(AnnotKind::kNotOwning)) return false;
      if (r.kind == AnnotKind::kMustCall || r.kind == AnnotKind::kCalls) return false;
      break;
  }
  records_.emplace(r, prov);
  return true;
}

bool AnnotationStore::add(const AnnotRecord& record, Provenance prov) {
  AnnotRecord r = record;
  if (r.site == SiteKind::kClass) {
    std::sort(r.methods.begin(), r.methods.end());
    r.methods.erase(std::unique(r.methods.begin(), r.methods.end()), r.methods.end());
  }
  return insert(r, prov);
}

bool AnnotationStore::add_class_must_call(ClassId c, std::set<std::string> methods, Provenance prov) {
  AnnotRecord r = make(SiteKind::kClass, c.value, AnnotKind::kMustCall);
  r.methods.assign(methods.begin(), methods.end());
  return insert(r, prov);
}

bool AnnotationStore::add_field_owning(FieldId f, Provenance prov) {
  return insert(make(SiteKind::kField, f.value, AnnotKind::kOwning), prov);
}

bool AnnotationStore::add_calls(MethodId m, FieldId f, const std::string& method, Provenance prov) {
  AnnotRecord r = make(SiteKind::kMethod, m.value, AnnotKind::kCalls);
  r.field = f.value;
  r.methods = {method};
  return insert(r, prov);
}

bool AnnotationStore::add_param_owning(MethodId m, int index, Provenance prov) {
  return insert(make(SiteKind::kParam, m.value, AnnotKind::kOwning, index), prov);
}

bool AnnotationStore::add_return_not_owning(MethodId m, Provenance prov) {
  return insert(make(SiteKind::kReturn, m.value, AnnotKind::kNotOwning), prov);
}

bool AnnotationStore::add_resource_alias_pair(MethodId m, int index, Provenance prov) {
  AnnotRecord param = make(SiteKind::kParam, m.value, AnnotKind::kResourceAlias, index);
  AnnotRecord ret = make(SiteKind::kReturn, m.value, AnnotKind::kResourceAlias);
  if (contains(param) && contains(ret)) return false;
  // Check both halves before committing either.
  AnnotationStore probe;
  probe.records_ = records_;
  if (!contains(param) && !probe.insert(param, prov)) return false;
  if (!contains(ret) && !probe.insert(ret, prov)) return false;
  if (!contains(param)) insert(param, prov);
  if (!contains(ret)) insert(ret, prov);
  return true;
}

const std::set<std::string>* AnnotationStore::own_must_call(ClassId c) const {
  auto it = must_call_.find(c);
  return it == must_call_.end() ? nullptr : &it->second;
}

bool AnnotationStore::field_owning(FieldId f) const { return contains(make(SiteKind::kField, f.value, AnnotKind::kOwning)); }
bool AnnotationStore::field_not_owning(FieldId f) const {
  return contains(make(SiteKind::kField, f.value, AnnotKind::kNotOwning));
}

const std::set<CallsEntry>& AnnotationStore::calls(MethodId m) const {
  static const std::set<CallsEntry> kEmpty;
  auto it = calls_.find(m);
  return it == calls_.end() ? kEmpty : it->second;
}

bool AnnotationStore::has_calls(MethodId m, FieldId f, const std::string& method) const {
  return calls(m).contains(CallsEntry{f, method});
}

bool AnnotationStore::param_owning(MethodId m, int index) const {
  return contains(make(SiteKind::kParam, m.value, AnnotKind::kOwning, index));
}
bool AnnotationStore::param_not_owning(MethodId m, int index) const {
  return contains(make(SiteKind::kParam, m.value, AnnotKind::kNotOwning, index));
}

std::optional<int> AnnotationStore::resource_alias_param(MethodId m) const {
  auto lo = records_.lower_bound(make(SiteKind::kParam, m.value, AnnotKind::kMustCall, 0));
  for (auto it = lo; it != records_.end() && it->first.site == SiteKind::kParam && it->first.owner == m.value; ++it) {
    if (it->first.kind == AnnotKind::kResourceAlias) return it->first.index;
  }
  return std::nullopt;
}

bool AnnotationStore::return_not_owning(MethodId m) const {
  return contains(make(SiteKind::kReturn, m.value, AnnotKind::kNotOwning));
}
bool AnnotationStore::return_owning_declared(MethodId m) const {
  return contains(make(SiteKind::kReturn, m.value, AnnotKind::kOwning));
}
bool AnnotationStore::return_resource_alias(MethodId m) const {
  return contains(make(SiteKind::kReturn, m.value, AnnotKind::kResourceAlias));
}

bool AnnotationStore::operator==(const AnnotationStore& other) const {
  if (records_.size() != other.records_.size()) return false;
  return std::equal(records_.begin(), records_.end(), other.records_.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; });
}

std::optional<std::set<std::string>> effective_must_call(const Program& program, const AnnotationStore& store,
                                                          ClassId c) {
  for (std::optional<ClassId> k = c; k; k = program.cls(*k).superclass) {
    if (const auto* mc = store.own_must_call(*k)) return *mc;
  }
  return std::nullopt;
}

std::set<std::string> obligation_of(const Program& program, const AnnotationStore& store, ClassId c) {
  return effective_must_call(program, store, c).value_or(std::set<std::string>{});
}

std::set<std::string> field_disposal(const Program& program, const AnnotationStore& store, FieldId f) {
  return obligation_of(program, store, program.field(f).type);
}

std::vector<FieldId> owning_fields(const Program& program, const AnnotationStore& store, ClassId c) {
  std::vector<FieldId> out;
  for (FieldId f : program.cls(c).fields) {
    if (store.field_owning(f)) out.push_back(f);
  }
  return out;
}

AnnotationStore declared_store(const Program& program, const FactBase& facts) {
  AnnotationStore store;
  for (const auto& d : facts.declared()) {
    const Annotation& a = d.annot;
    ClassId cls;
    switch (d.site) {
      case SiteKind::kClass: cls = ClassId(d.owner); break;
      case SiteKind::kField: cls = program.field(FieldId(d.owner)).owner; break;
      default: cls = program.method(MethodId(d.owner)).owner; break;
    }
    auto conflict = [&]() {
      throw ResolveError(program.file_of(cls), a.pos, "@" + std::string(to_string(a.kind)) + " contradicts another annotation");
    };
    if (a.kind == AnnotKind::kCalls) {
      MethodId m(d.owner);
      for (const auto& e : a.exprs) {
        auto f = program.lookup_field(program.method(m).owner, e.substr(5));
        for (const auto& name : a.methods) store.add_calls(m, *f, name, Provenance::declared_here());
      }
      continue;
    }
    AnnotRecord r;
    r.site = d.site;
    r.owner = d.owner;
    r.index = d.index;
    r.kind = a.kind;
    if (a.kind == AnnotKind::kMustCall) r.methods = a.methods;
    if (!store.add(r, Provenance::declared_here()) && !store.contains(r)) conflict();
  }
  return store;
}

}  // namespace rms
