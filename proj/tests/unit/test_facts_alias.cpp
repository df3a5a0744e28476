#include <doctest.h>

#include <set>

#include "rms/alias.hpp"
#include "rms/facts.hpp"
#include "support/gen.hpp"
#include "support/helpers.hpp"
#include "support/properties.hpp"

using namespace rms;
using namespace rms::test;

namespace {

std::map<int, const Stmt*> stmts_by_id(const Program& p) {
  std::map<int, const Stmt*> out;
  for (const auto& [m, s] : p.statements()) out[s->id.value] = s;
  return out;
}

MethodId callee_of(const Stmt& s) {
  if (const CallExpr* c = call_of(s)) return c->target;
  if (const NewExpr* n = new_of(s)) return n->ctor;
  if (const auto* d = s.as<CtorCallStmt>()) return d->target;
  return {};
}

AnnotationStore without_resource_alias(const AnnotationStore& store) {
  AnnotationStore out;
  for (const auto& [r, prov] : store.records()) {
    if (r.kind != AnnotKind::kResourceAlias) out.add(r, prov);
  }
  return out;
}

}  // namespace

TEST_SUITE("facts") {
  TEST_CASE("fig1 relations") {
    auto a = load_corpus("fig1");
    const Program& p = a->program;
    const FactBase& f = a->facts;
    ClassId cls = *p.find_class("MySqlCon");
    FieldId con = *p.lookup_field(cls, "con");
    CHECK(f.query_field(cls) == std::vector<FieldId>{con});
    CHECK(f.query_field_type(con) == p.find_class("Connection"));
    MethodId ctor = method_id(p, "MySqlCon", "MySqlCon");
    CHECK(f.query_constructor(cls) == std::vector<MethodId>{ctor});

    MethodId dispose = method_id(p, "MySqlCon", "dispose");
    auto inv = f.query_invokes(dispose);
    REQUIRE(inv.size() == 1);
    CHECK(inv[0].callee == method_id(p, "MySqlCon", "closeCon"));
    CHECK(inv[0].receiver.empty());
    CHECK(inv[0].args == std::vector<std::string>{"this.con"});

    auto writes = f.query_writes_field(ctor);
    REQUIRE(writes.size() == 1);
    CHECK(writes[0].field == con);
    CHECK(writes[0].value == std::optional<std::string>("con"));

    auto rets = f.query_returns(method_id(p, "MySqlCon", "createCon"));
    REQUIRE(rets.size() == 1);
    CHECK(rets[0].value == "obj");
  }

  TEST_CASE("empty class has member facts only") {
    auto a = load_text("class E { void m() {} }");
    const Program& p = a->program;
    ClassId e = *p.find_class("E");
    CHECK(a->facts.query_method(e).size() == 1);
    CHECK(a->facts.query_constructor(e).size() == 1);
    CHECK(a->facts.all_invokes().empty());
    CHECK(a->facts.all_writes_field().empty());
    CHECK(a->facts.all_returns().empty());
    CHECK(a->facts.all_this_or_super_calls().empty());
  }

  TEST_CASE("stub @MustCall becomes a declared fact") {
    auto a = load_corpus("fig1");
    ClassId c = *a->program.find_class("Connection");
    bool found = false;
    for (const auto& d : a->facts.declared()) {
      if (d.site == SiteKind::kClass && d.owner == c.value && d.annot.kind == AnnotKind::kMustCall) {
        found = d.annot.methods == std::vector<std::string>{"close"};
      }
    }
    CHECK(found);
  }

  TEST_CASE("absent keys give empty results") {
    auto a = load_corpus("fig1");
    CHECK(a->facts.query_field(ClassId(9999)).empty());
    CHECK(a->facts.query_invokes(MethodId(9999)).empty());
    CHECK_FALSE(a->facts.query_return_type(method_id(a->program, "MySqlCon", "use")));
  }

  TEST_CASE("deterministic dump") {
    for (const auto& name : warning_programs()) {
      auto a = load_corpus(name);
      auto b = load_corpus(name);
      CHECK(dump_facts(a->program, a->facts) == dump_facts(b->program, b->facts));
    }
  }

  TEST_CASE("statement facts point at real statements") {
    for (std::uint32_t seed = 1; seed <= 60; ++seed) {
      auto a = load_text(gen::class_program(seed), gen::class_program_stubs());
      const Program& p = a->program;
      auto by_id = stmts_by_id(p);
      auto in_cfg = [&](MethodId m, StmtId s) { return a->cfgs.at(m).node_of(s).has_value(); };
      for (const auto& inv : a->facts.all_invokes()) {
        CHECK(in_cfg(inv.caller, inv.stmt));
        CHECK(callee_of(*by_id.at(inv.stmt.value)) == inv.callee);
      }
      for (const auto& w : a->facts.all_writes_field()) {
        CHECK(in_cfg(w.method, w.stmt));
        REQUIRE(by_id.at(w.stmt.value)->as<FieldWriteStmt>() != nullptr);
      }
      for (const auto& r : a->facts.all_returns()) {
        CHECK(in_cfg(r.method, r.stmt));
        CHECK(by_id.at(r.stmt.value)->as<ReturnStmt>() != nullptr);
      }
      // Each statement contributes a bounded number of tuples.
      std::size_t decls = p.classes.size() + p.fields.size() * 2 + p.methods.size() * 4;
      for (const auto& m : p.methods) decls += m.params.size();
      CHECK(a->facts.size() <= decls + 2 * p.statement_count());
    }
  }
}

TEST_SUITE("alias") {
  TEST_CASE("partition operations") {
    AliasPartition a;
    CHECK(a.same("x", "x"));
    CHECK_FALSE(a.same("x", "y"));
    a.join("x", "y");
    a.join("z", "x");
    CHECK(a.same("y", "z"));
    CHECK(a.class_of("x") == std::vector<std::string>{"x", "y", "z"});
    AliasPartition b;
    b.join("x", "y");
    auto m = AliasPartition::meet(a, b);
    CHECK(m.same("x", "y"));
    CHECK_FALSE(m.same("x", "z"));
    a.isolate("x");
    CHECK_FALSE(a.same("x", "y"));
    CHECK(a.same("y", "z"));
    a.isolate("y");
    CHECK(a.groups().empty());
  }

  TEST_CASE("fig1 client: con1 and mySqlCon1 after the @ResourceAlias constructor") {
    auto a = load_corpus("fig1");
    const Program& p = a->program;
    MethodId client = method_id(p, "Client", "client");
    const Cfg& cfg = a->cfgs.at(client);
    StmtId use = stmt_of(p, client, "mySqlCon1.use();").id;

    auto inferred = infer_annotations(*a).store;
    CHECK(compute_resource_aliases(p, cfg, inferred).is_resource_alias(use, "con1", "mySqlCon1"));
    // Without the inferred pair the two are distinct.
    auto declared = declared_store(p, a->facts);
    CHECK_FALSE(compute_resource_aliases(p, cfg, declared).is_resource_alias(use, "con1", "mySqlCon1"));
  }

  TEST_CASE("copies, joins and fresh values") {
    auto a = load_text(
        "class A {\n"
        "  static void m(y: Connection, z: Connection) {\n"
        "    var x = y;\n"
        "    var w = x;\n"
        "    var u = new Connection();\n"
        "    var v = new Connection();\n"
        "    if (*) {\n"
        "      w = z;\n"
        "    }\n"
        "    u.close();\n"
        "  }\n"
        "}\n",
        read_file("corpus/stdlib.rml"));
    const Program& p = a->program;
    MethodId m = method_id(p, "A", "m");
    auto st = compute_resource_aliases(p, a->cfgs.at(m), declared_store(p, a->facts));
    StmtId second = stmt_of(p, m, "var w = x;").id;
    StmtId last = stmt_of(p, m, "u.close();").id;
    CHECK(st.is_resource_alias(second, "x", "y"));
    CHECK(st.is_resource_alias(last, "x", "y"));
    CHECK(st.is_resource_alias(last, "u", "u"));
    CHECK_FALSE(st.is_resource_alias(last, "u", "v"));
    // w = z on one branch only: not aliased with either side at the join.
    CHECK_FALSE(st.is_resource_alias(last, "w", "y"));
    CHECK_FALSE(st.is_resource_alias(last, "w", "z"));
  }

  TEST_CASE("field writes alias this.f; null isolates") {
    auto a = load_text(
        "class A {\n"
        "  f: Connection;\n"
        "  void m(c: Connection) {\n"
        "    this.f = c;\n"
        "    var d = this.f;\n"
        "    this.f = null;\n"
        "    d.close();\n"
        "  }\n"
        "}\n",
        read_file("corpus/stdlib.rml"));
    const Program& p = a->program;
    MethodId m = method_id(p, "A", "m");
    auto st = compute_resource_aliases(p, a->cfgs.at(m), declared_store(p, a->facts));
    CHECK(st.is_resource_alias(stmt_of(p, m, "var d = this.f;").id, "this.f", "c"));
    StmtId close = stmt_of(p, m, "d.close();").id;
    CHECK(st.is_resource_alias(close, "d", "c"));
    CHECK_FALSE(st.is_resource_alias(close, "this.f", "c"));
  }

  TEST_CASE("adding @ResourceAlias never shrinks an alias class") {
    for (std::uint32_t seed = 1; seed <= 150; ++seed) {
      auto a = load_text(gen::alias_program(seed));
      const Program& p = a->program;
      MethodId m = method_id(p, "T", "run");
      const Cfg& cfg = a->cfgs.at(m);
      auto strong = declared_store(p, a->facts);
      auto weak = without_resource_alias(strong);
      auto s1 = compute_resource_aliases(p, cfg, weak);
      auto s2 = compute_resource_aliases(p, cfg, strong);
      for (std::size_t n = 3; n < cfg.size(); ++n) {
        for (const auto& g : s1.before(static_cast<NodeId>(n)).groups()) {
          for (const auto& x : g) {
            CAPTURE(seed);
            CHECK(s2.before(static_cast<NodeId>(n)).same(g.front(), x));
          }
        }
      }
    }
  }

  TEST_CASE("generated programs: properties 1-3 and the path oracle") {
    for (std::uint32_t seed = 7000; seed < 7200; ++seed) {
      auto r = check_alias_case(seed);
      CAPTURE(r.program);
      CHECK(r.violations.empty());
      if (!r.violations.empty()) MESSAGE(r.violations.front());
    }
  }

  TEST_CASE("dump lists the partition before each statement") {
    auto r = run({"check", "corpus/fig1.rml", "--stubs", "corpus/stdlib.rml", "--dump-aliases"});
    CHECK(r.out.find("aliases Client.client") != std::string::npos);
    CHECK(r.out.find("mySqlCon1.use();  {con1, mySqlCon1}") != std::string::npos);
  }
}
