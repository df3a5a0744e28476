#include "rms/program.hpp"

namespace rms {

std::optional<int> MethodInfo::param_index(std::string_view n) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == n) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<ClassId> Program::find_class(std::string_view name) const {
  for (const auto& c : classes) {
    if (c.name == name) return c.id;
  }
  return std::nullopt;
}

std::optional<FieldId> Program::lookup_field(ClassId from, std::string_view name) const {
  for (std::optional<ClassId> c = from; c; c = cls(*c).superclass) {
    for (FieldId f : cls(*c).fields) {
      if (field(f).name == name) return f;
    }
  }
  return std::nullopt;
}

std::optional<MethodId> Program::lookup_method(ClassId from, std::string_view name) const {
  for (std::optional<ClassId> c = from; c; c = cls(*c).superclass) {
    for (MethodId m : cls(*c).methods) {
      if (method(m).name == name) return m;
    }
  }
  return std::nullopt;
}

std::optional<MethodId> Program::find_constructor(ClassId c, std::size_t arity) const {
  for (MethodId m : cls(c).constructors) {
    if (method(m).params.size() == arity) return m;
  }
  return std::nullopt;
}

std::optional<MethodId> Program::overridden(MethodId m) const {
  const MethodInfo& mi = method(m);
  if (mi.is_constructor() || mi.is_static()) return std::nullopt;
  auto super = cls(mi.owner).superclass;
  if (!super) return std::nullopt;
  auto found = lookup_method(*super, mi.name);
  if (found && !method(*found).is_static()) return found;
  return std::nullopt;
}

bool Program::is_subclass(ClassId sub, ClassId super) const {
  for (std::optional<ClassId> c = sub; c; c = cls(*c).superclass) {
    if (*c == super) return true;
  }
  return false;
}

std::string Program::qualified_name(MethodId m) const {
  const MethodInfo& mi = method(m);
  const ClassInfo& c = cls(mi.owner);
  if (!mi.is_constructor()) return c.name + "." + mi.name;
  if (c.constructors.size() == 1) return c.name + ".<init>";
  return c.name + ".<init>/" + std::to_string(mi.params.size());
}

std::string Program::qualified_name(FieldId f) const { return cls(field(f).owner).name + "." + field(f).name; }

std::optional<ClassId> Program::type_of(MethodId m, std::string_view key) const {
  const MethodInfo& mi = method(m);
  if (key == "this") return mi.has_receiver() ? std::optional<ClassId>(mi.owner) : std::nullopt;
  if (key.starts_with("this.")) {
    auto f = lookup_field(mi.owner, key.substr(5));
    if (!f) return std::nullopt;
    return field(*f).type;
  }
  if (auto i = mi.param_index(key)) return mi.params[static_cast<std::size_t>(*i)].type;
  auto it = mi.locals.find(std::string(key));
  if (it != mi.locals.end()) return it->second;
  return std::nullopt;
}

std::vector<std::pair<MethodId, const Stmt*>> Program::statements() const {
  std::vector<std::pair<MethodId, const Stmt*>> out;
  for (const auto& m : methods) {
    if (!m.body) continue;
    for_each_stmt(*m.body, [&](const Stmt& s) { out.emplace_back(m.id, &s); });
  }
  return out;
}

std::size_t Program::statement_count() const {
  std::size_t n = 0;
  for (const auto& m : methods) {
    if (m.body) for_each_stmt(*m.body, [&](const Stmt&) { ++n; });
  }
  return n;
}

void renumber_statements(Program& program) {
  int next = 0;
  for (auto& m : program.methods) {
    if (m.body) for_each_stmt_mut(*m.body, [&](Stmt& s) { s.id = StmtId(next++); });
  }
}

}  // namespace rms
