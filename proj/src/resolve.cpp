#include "rms/resolve.hpp"

#include <map>
#include <set>

namespace rms {

namespace {

// nullopt = the null type, assignable to every class.
using VType = std::optional<ClassId>;

class Resolver {
 public:
  Program run(std::vector<SourceUnit> units) {
    declare_classes(units);
    link_superclasses();
    for (std::size_t ui = 0; ui < units.size(); ++ui) {
      for (auto& cd : units[ui].classes) declare_members(cd);
    }
    check_overrides();
    for (auto& m : p_.methods) {
      if (m.body) {
        cur_ = &m;
        resolve_block(*m.body);
      }
    }
    renumber_statements(p_);
    return std::move(p_);
  }

 private:
  [[noreturn]] void fail(ClassId c, SourcePos pos, const std::string& msg) const {
    throw ResolveError(p_.file_of(c), pos, msg);
  }
  [[noreturn]] void fail(SourcePos pos, const std::string& msg) const { fail(cur_->owner, pos, msg); }

  ClassId type_named(ClassId ctx, const std::string& name, SourcePos pos) const {
    auto c = p_.find_class(name);
    if (!c) fail(ctx, pos, "unknown type '" + name + "'");
    return *c;
  }

  void declare_classes(const std::vector<SourceUnit>& units) {
    for (std::size_t ui = 0; ui < units.size(); ++ui) {
      p_.files.push_back(units[ui].path);
      p_.stub_files.push_back(units[ui].is_stub);
      for (const auto& cd : units[ui].classes) {
        if (auto prev = p_.find_class(cd.name)) {
          throw ResolveError(units[ui].path, cd.pos, "duplicate class '" + cd.name + "'");
        }
        ClassInfo ci;
        ci.id = ClassId(static_cast<int>(p_.classes.size()));
        ci.name = cd.name;
        ci.pos = cd.pos;
        ci.unit = static_cast<int>(ui);
        ci.is_stub = units[ui].is_stub;
        p_.classes.push_back(std::move(ci));
      }
    }
    std::size_t k = 0;
    for (const auto& u : units) {
      for (const auto& cd : u.classes) {
        ClassInfo& ci = p_.classes[k++];
        check_class_annots(ci.id, cd.annots);
        ci.annots = cd.annots;
        if (cd.superclass) ci.superclass = type_named(ci.id, *cd.superclass, cd.pos);
      }
    }
  }

  void link_superclasses() {
    for (const auto& c : p_.classes) {
      std::set<ClassId> seen{c.id};
      for (auto s = c.superclass; s; s = p_.cls(*s).superclass) {
        if (!seen.insert(*s).second) fail(c.id, c.pos, "cyclic inheritance involving '" + c.name + "'");
      }
    }
  }

  void check_class_annots(ClassId c, const std::vector<Annotation>& annots) const {
    int must_call = 0;
    for (const auto& a : annots) {
      if (a.kind != AnnotKind::kMustCall) {
        fail(c, a.pos, "@" + std::string(to_string(a.kind)) + " is not allowed on a class");
      }
      if (++must_call > 1) fail(c, a.pos, "at most one @MustCall annotation per class");
    }
  }

  // Shared placement checks for a set of annotations on one site.
  void check_site(ClassId c, const std::vector<Annotation>& annots, std::set<AnnotKind> allowed,
                  const std::string& site) const {
    std::set<AnnotKind> seen;
    for (const auto& a : annots) {
      if (!allowed.contains(a.kind)) {
        fail(c, a.pos, "@" + std::string(to_string(a.kind)) + " is not allowed on " + site);
      }
      if (!seen.insert(a.kind).second) fail(c, a.pos, "duplicate @" + std::string(to_string(a.kind)));
    }
    if (seen.contains(AnnotKind::kOwning) && seen.contains(AnnotKind::kNotOwning)) {
      fail(c, annots.front().pos, "@Owning and @NotOwning on the same " + site);
    }
    if (seen.contains(AnnotKind::kNotOwning) && seen.contains(AnnotKind::kResourceAlias)) {
      fail(c, annots.front().pos, "@NotOwning and @ResourceAlias on the same " + site);
    }
  }

  static bool has(const std::vector<Annotation>& annots, AnnotKind k) {
    for (const auto& a : annots) {
      if (a.kind == k) return true;
    }
    return false;
  }

  void declare_members(ClassDecl& cd) {
    ClassId c = *p_.find_class(cd.name);
    for (auto& fd : cd.fields) {
      for (FieldId other : p_.cls(c).fields) {
        if (p_.field(other).name == fd.name) fail(c, fd.pos, "duplicate field '" + fd.name + "'");
      }
      check_site(c, fd.annots, {AnnotKind::kOwning, AnnotKind::kNotOwning}, "a field");
      FieldInfo fi;
      fi.id = FieldId(static_cast<int>(p_.fields.size()));
      fi.owner = c;
      fi.name = fd.name;
      fi.type = type_named(c, fd.type_name, fd.pos);
      fi.is_final = fd.is_final;
      fi.annots = fd.annots;
      fi.pos = fd.pos;
      p_.classes[c.index()].fields.push_back(fi.id);
      p_.fields.push_back(std::move(fi));
    }

    if (cd.constructors.empty()) {
      MethodInfo mi;
      mi.id = MethodId(static_cast<int>(p_.methods.size()));
      mi.owner = c;
      mi.name = cd.name;
      mi.kind = MethodKind::kConstructor;
      mi.implicit = true;
      mi.pos = cd.pos;
      p_.classes[c.index()].constructors.push_back(mi.id);
      p_.methods.push_back(std::move(mi));
    }
    for (auto& md : cd.constructors) {
      for (MethodId other : p_.cls(c).constructors) {
        if (p_.method(other).params.size() == md.params.size()) {
          fail(c, md.pos, "duplicate constructor of '" + cd.name + "' with " + std::to_string(md.params.size()) +
                              " parameter(s)");
        }
      }
      MethodId id = declare_method(c, md);
      p_.classes[c.index()].constructors.push_back(id);
    }
    for (auto& md : cd.methods) {
      for (MethodId other : p_.cls(c).methods) {
        if (p_.method(other).name == md.name) fail(c, md.pos, "duplicate method '" + md.name + "'");
      }
      MethodId id = declare_method(c, md);
      p_.classes[c.index()].methods.push_back(id);
    }
  }

  MethodId declare_method(ClassId c, MethodDecl& md) {
    MethodInfo mi;
    mi.id = MethodId(static_cast<int>(p_.methods.size()));
    mi.owner = c;
    mi.name = md.name;
    mi.kind = md.kind;
    mi.may_throw = md.may_throw;
    mi.pos = md.pos;
    if (md.kind == MethodKind::kAbstract && md.body) fail(c, md.pos, "abstract method '" + md.name + "' has a body");
    if (md.return_type) mi.return_type = type_named(c, *md.return_type, md.pos);

    for (auto& a : md.annots) {
      if (a.kind == AnnotKind::kMustCall) fail(c, a.pos, "@MustCall is only allowed on classes");
      if (a.kind == AnnotKind::kCalls) {
        if (md.kind == MethodKind::kStatic) fail(c, a.pos, "@Calls on a static method");
        mi.method_annots.push_back(a);
      } else {
        mi.return_annots.push_back(a);
      }
    }
    if (md.kind == MethodKind::kConstructor) {
      check_site(c, mi.return_annots, {AnnotKind::kResourceAlias}, "a constructor result");
    } else {
      check_site(c, mi.return_annots, {AnnotKind::kOwning, AnnotKind::kNotOwning, AnnotKind::kResourceAlias},
                 "a method return");
      if (!mi.return_type && !mi.return_annots.empty()) {
        fail(c, mi.return_annots.front().pos, "void method '" + md.name + "' cannot annotate its result");
      }
    }

    std::set<std::string> names;
    int alias_params = 0;
    for (auto& pd : md.params) {
      if (!names.insert(pd.name).second) fail(c, pd.pos, "duplicate parameter '" + pd.name + "'");
      check_site(c, pd.annots, {AnnotKind::kOwning, AnnotKind::kNotOwning, AnnotKind::kResourceAlias}, "a parameter");
      if (has(pd.annots, AnnotKind::kResourceAlias)) ++alias_params;
      mi.params.push_back(ParamInfo{pd.name, type_named(c, pd.type_name, pd.pos), pd.annots, pd.pos});
    }
    bool alias_return = has(mi.return_annots, AnnotKind::kResourceAlias);
    if (alias_params > 1) fail(c, md.pos, "at most one @ResourceAlias parameter per method");
    if ((alias_params == 1) != alias_return) {
      fail(c, md.pos, "@ResourceAlias must annotate both a parameter and the result of '" + md.name + "'");
    }

    mi.body = std::move(md.body);
    p_.methods.push_back(std::move(mi));
    return p_.methods.back().id;
  }

  void check_overrides() const {
    for (const auto& m : p_.methods) {
      for (const auto& a : m.method_annots) {
        for (const auto& e : a.exprs) {
          if (!e.starts_with("this.") || !p_.lookup_field(m.owner, e.substr(5))) {
            fail(m.owner, a.pos, "@Calls field expression '" + e + "' does not name a field of this");
          }
        }
      }
      if (m.is_constructor()) continue;
      auto super = p_.cls(m.owner).superclass;
      if (!super) continue;
      auto base = p_.lookup_method(*super, m.name);
      if (!base) continue;
      const MethodInfo& b = p_.method(*base);
      if (m.is_static() || b.is_static()) {
        fail(m.owner, m.pos, "'" + m.name + "' clashes with inherited method " + p_.qualified_name(*base));
      }
      if (b.params.size() != m.params.size()) {
        fail(m.owner, m.pos, "'" + m.name + "' overrides " + p_.qualified_name(*base) + " with a different arity");
      }
    }
  }

  // ---- bodies ----

  bool is_param(const std::string& n) const { return cur_->param_index(n).has_value(); }
  bool is_local(const std::string& n) const { return cur_->locals.contains(n); }

  bool compatible(VType src, ClassId dst) const { return !src || p_.is_subclass(*src, dst); }

  std::string type_name(VType t) const { return t ? p_.cls(*t).name : "null"; }

  void require_this(SourcePos pos) const {
    if (!cur_->has_receiver()) fail(pos, "'this' used in static method '" + cur_->name + "'");
  }

  VType operand_type(Operand& op, SourcePos pos) {
    if (op.is_field) {
      require_this(pos);
      auto f = p_.lookup_field(cur_->owner, op.name);
      if (!f) fail(pos, "unknown field '" + op.name + "'");
      op.field = *f;
      return p_.field(*f).type;
    }
    if (auto i = cur_->param_index(op.name)) return cur_->params[static_cast<std::size_t>(*i)].type;
    auto it = cur_->locals.find(op.name);
    if (it == cur_->locals.end()) fail(pos, "unknown variable '" + op.name + "'");
    return it->second;
  }

  void check_args(std::vector<Operand>& args, MethodId target, SourcePos pos) {
    const MethodInfo& t = p_.method(target);
    if (args.size() != t.params.size()) {
      fail(pos, p_.qualified_name(target) + " expects " + std::to_string(t.params.size()) + " argument(s), got " +
                    std::to_string(args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      VType at = operand_type(args[i], pos);
      if (!compatible(at, t.params[i].type)) {
        fail(pos, "argument '" + args[i].key() + "' of type " + type_name(at) + " is not a " +
                      p_.cls(t.params[i].type).name);
      }
    }
  }

  ClassId known_type(const std::string& var, SourcePos pos) {
    Operand op = Operand::var(var);
    VType t = operand_type(op, pos);
    if (!t) fail(pos, "type of '" + var + "' is unknown here (only null assigned so far)");
    return *t;
  }

  MethodId method_on(ClassId cls, const std::string& name, SourcePos pos) const {
    auto m = p_.lookup_method(cls, name);
    if (!m) fail(pos, "class '" + p_.cls(cls).name + "' has no method '" + name + "'");
    return *m;
  }

  void resolve_call(CallExpr& call, SourcePos pos) {
    MethodId target;
    switch (call.receiver_kind) {
      case ReceiverKind::kVariable:
        if (is_param(call.receiver) || is_local(call.receiver)) {
          target = method_on(known_type(call.receiver, pos), call.method, pos);
          if (p_.method(target).is_static()) fail(pos, "static method '" + call.method + "' called on an instance");
        } else if (auto cls = p_.find_class(call.receiver)) {
          target = method_on(*cls, call.method, pos);
          if (!p_.method(target).is_static()) {
            fail(pos, "instance method '" + call.method + "' called without a receiver");
          }
          call.receiver_kind = ReceiverKind::kStatic;
        } else {
          fail(pos, "unknown variable or class '" + call.receiver + "'");
        }
        break;
      case ReceiverKind::kThisField: {
        require_this(pos);
        auto f = p_.lookup_field(cur_->owner, call.receiver);
        if (!f) fail(pos, "unknown field '" + call.receiver + "'");
        call.receiver_field = *f;
        target = method_on(p_.field(*f).type, call.method, pos);
        if (p_.method(target).is_static()) fail(pos, "static method '" + call.method + "' called on an instance");
        break;
      }
      case ReceiverKind::kImplicitThis:
        target = method_on(cur_->owner, call.method, pos);
        if (p_.method(target).is_static()) {
          call.receiver_kind = ReceiverKind::kStatic;
        } else {
          require_this(pos);
        }
        break;
      case ReceiverKind::kStatic:
        if (call.receiver.empty()) {
          target = method_on(cur_->owner, call.method, pos);
        } else {
          target = method_on(type_named(cur_->owner, call.receiver, pos), call.method, pos);
        }
        if (!p_.method(target).is_static()) fail(pos, "instance method '" + call.method + "' called without a receiver");
        break;
    }
    call.target = target;
    check_args(call.args, target, pos);
  }

  VType rhs_type(Rhs& rhs, SourcePos pos) {
    if (auto* n = std::get_if<NewExpr>(&rhs)) {
      n->cls = type_named(cur_->owner, n->class_name, pos);
      auto ctor = p_.find_constructor(n->cls, n->args.size());
      if (!ctor) {
        fail(pos, "no constructor of '" + n->class_name + "' takes " + std::to_string(n->args.size()) + " argument(s)");
      }
      n->ctor = *ctor;
      check_args(n->args, *ctor, pos);
      return n->cls;
    }
    if (auto* c = std::get_if<CallExpr>(&rhs)) {
      resolve_call(*c, pos);
      const auto& ret = p_.method(c->target).return_type;
      if (!ret) fail(pos, "void method '" + c->method + "' used as a value");
      return *ret;
    }
    if (auto* r = std::get_if<ReadExpr>(&rhs)) return operand_type(r->source, pos);
    return std::nullopt;
  }

  void resolve_block(Block& block) {
    for (Stmt& s : block) resolve_stmt(s);
  }

  void resolve_stmt(Stmt& s) {
    if (auto* a = s.as<AssignStmt>()) {
      VType t = rhs_type(a->rhs, s.pos);
      if (a->declares) {
        if (is_param(a->var) || is_local(a->var)) fail(s.pos, "redeclaration of '" + a->var + "'");
        cur_->locals[a->var] = t;
        return;
      }
      if (is_param(a->var)) fail(s.pos, "parameter '" + a->var + "' is final");
      auto it = cur_->locals.find(a->var);
      if (it == cur_->locals.end()) fail(s.pos, "assignment to undeclared variable '" + a->var + "'");
      if (!it->second) {
        it->second = t;
      } else if (!compatible(t, *it->second)) {
        fail(s.pos, "cannot assign " + type_name(t) + " to '" + a->var + "' of type " + type_name(it->second));
      }
    } else if (auto* w = s.as<FieldWriteStmt>()) {
      require_this(s.pos);
      auto f = p_.lookup_field(cur_->owner, w->field);
      if (!f) fail(s.pos, "unknown field '" + w->field + "'");
      w->resolved = *f;
      const FieldInfo& fi = p_.field(*f);
      if (fi.is_final && (!cur_->is_constructor() || fi.owner != cur_->owner)) {
        fail(s.pos, "final field '" + w->field + "' assigned outside a constructor of its class");
      }
      if (w->value) {
        Operand op = Operand::var(*w->value);
        VType t = operand_type(op, s.pos);
        if (!compatible(t, fi.type)) {
          fail(s.pos, "cannot assign " + type_name(t) + " to field '" + w->field + "' of type " + p_.cls(fi.type).name);
        }
      }
    } else if (auto* c = s.as<CallStmt>()) {
      resolve_call(c->call, s.pos);
    } else if (auto* r = s.as<ReturnStmt>()) {
      const auto& ret = cur_->return_type;
      bool has_value = r->value || r->expr;
      if (has_value && !ret) fail(s.pos, "'" + cur_->name + "' cannot return a value");
      if (!has_value && ret) fail(s.pos, "'" + cur_->name + "' must return a value");
      if (has_value) {
        VType t = r->expr ? rhs_type(*r->expr, s.pos) : operand_type(*r->value, s.pos);
        if (!compatible(t, *ret)) fail(s.pos, "cannot return " + type_name(t) + " from '" + cur_->name + "'");
      }
    } else if (auto* d = s.as<CtorCallStmt>()) {
      if (!cur_->is_constructor()) fail(s.pos, "this()/super() outside a constructor");
      ClassId cls = cur_->owner;
      if (d->is_super) {
        auto super = p_.cls(cls).superclass;
        if (!super) fail(s.pos, "super() in a class without a superclass");
        cls = *super;
      }
      auto ctor = p_.find_constructor(cls, d->args.size());
      if (!ctor) {
        fail(s.pos, "no constructor of '" + p_.cls(cls).name + "' takes " + std::to_string(d->args.size()) +
                        " argument(s)");
      }
      if (*ctor == cur_->id) fail(s.pos, "constructor delegates to itself");
      d->target = *ctor;
      check_args(d->args, *ctor, s.pos);
    } else if (auto* i = s.as<IfStmt>()) {
      resolve_block(i->then_block);
      resolve_block(i->else_block);
    } else if (auto* wl = s.as<WhileStmt>()) {
      resolve_block(wl->body);
    }
  }

  Program p_;
  MethodInfo* cur_ = nullptr;
};

}  // namespace

Program resolve(std::vector<SourceUnit> units) { return Resolver().run(std::move(units)); }

}  // namespace rms
