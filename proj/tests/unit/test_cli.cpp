#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>

#include "oracle/naive_infer.hpp"
#include "rms/cli.hpp"
#include "rms/sidecar.hpp"
#include "support/helpers.hpp"

using namespace rms;
using namespace rms::test;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

CliRun corpus_run(const std::string& mode, const std::string& name, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {mode, corpus_path(name), "--stubs", "corpus/stdlib.rml"};
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args);
}

bool annotated(const std::string& name) { return name.find("_annotated") != std::string::npos || name == "override"; }

}  // namespace

TEST_SUITE("sidecar") {
  TEST_CASE("write then read gives back the records") {
    for (const auto& name : golden_programs()) {
      auto a = load_corpus(name);
      auto store = infer_annotations(*a).store;
      auto records = read_sidecar(a->program, write_sidecar(a->program, store), "x.annots");
      std::set<AnnotRecord> got(records.begin(), records.end());
      std::set<AnnotRecord> expect;
      for (const auto& [r, prov] : store.records()) {
        ClassId owner_class = r.site == SiteKind::kClass   ? ClassId(r.owner)
                              : r.site == SiteKind::kField ? a->program.field(FieldId(r.owner)).owner
                                                           : a->program.method(MethodId(r.owner)).owner;
        if (!prov.declared() || !a->program.cls(owner_class).is_stub) expect.insert(r);
      }
      CAPTURE(name);
      CHECK(got == expect);
    }
  }

  TEST_CASE("lines are sorted; provenance comments are ignored on reading") {
    auto a = load_corpus("fig4");
    auto store = infer_annotations(*a).store;
    auto plain = lines(write_sidecar(a->program, store));
    CHECK(std::is_sorted(plain.begin(), plain.end()));
    SidecarOptions opt;
    opt.provenance = true;
    std::string with = "# header\n\n" + write_sidecar(a->program, store, opt);
    CHECK(read_sidecar(a->program, with, "x").size() == plain.size());
  }

  TEST_CASE("malformed and contradicting lines") {
    auto a = load_corpus("fig1");
    const char* bad[] = {
        "field MySqlCon.con @Owningx",
        "field MySqlCon.nope @Owning",
        "param MySqlCon.closeCon#2 @Owning",
        "class Missing @MustCall(close)",
        "method MySqlCon.dispose @Calls(this.con close)",
        "return MySqlCon.use",
        "field MySqlCon.con @MustCall(close)",
    };
    for (const char* line : bad) {
      CAPTURE(line);
      try {
        read_sidecar(a->program, std::string("# ok\nclass MySqlCon @MustCall(dispose)\n") + line + "\n", "s.annots");
        FAIL("accepted");
      } catch (const SidecarError& e) {
        CHECK(e.line() == 3);
        CHECK(e.file() == "s.annots");
      }
    }
    AnnotationStore store = declared_store(a->program, a->facts);
    CHECK_THROWS_AS(load_sidecar(a->program,
                                 "param MySqlCon.closeCon#1 @Owning\nparam MySqlCon.closeCon#1 @NotOwning\n", "c", store),
                    SidecarError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("infer on an empty program") {
    std::string path = temp_path("empty.rml");
    write_file(path, "");
    auto r = run({"infer", path});
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    std::filesystem::remove(path);
  }

  TEST_CASE("--provenance marks every line") {
    auto r = corpus_run("infer", "fig1", {"--provenance"});
    CHECK(r.code == 0);
    for (const auto& l : lines(r.out)) CHECK(l.find("  # rule ") != std::string::npos);
  }

  TEST_CASE("--out then verify --annots") {
    std::string out = temp_path("fig1.annots");
    auto r = corpus_run("infer", "fig1", {"--out", out});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(read_file(out) == read_file("corpus/fig1.golden.annots"));
    auto v = corpus_run("verify", "fig1", {"--annots", out});
    CHECK(v.code == kExitOk);
    CHECK(v.out.empty());
    std::filesystem::remove(out);
  }

  TEST_CASE("exit codes") {
    CHECK(corpus_run("check", "fig1").code == kExitOk);
    CHECK(corpus_run("check", "fig4").code == kExitWarnings);
    CHECK(corpus_run("verify", "fig6").code == kExitWarnings);
    CHECK(run({"--help"}).code == kExitOk);
    CHECK(run({"bogus", "corpus/fig1.rml"}).code == kExitFrontendError);
    CHECK(run({"infer", "corpus/does-not-exist.rml"}).code == kExitFrontendError);
    CHECK(corpus_run("infer", "fig1", {"--max-rounds", "0"}).code == kExitFrontendError);
    auto diverged = corpus_run("infer", "fig1", {"--max-rounds", "1"});
    CHECK(diverged.code == kExitInternalError);
    CHECK(diverged.err.find("fixed point") != std::string::npos);
  }

  TEST_CASE("frontend errors carry a position") {
    std::string path = temp_path("broken.rml");
    write_file(path, "class A {\n  void m() {\n    x.close()\n  }\n}\n");
    auto r = run({"check", path});
    CHECK(r.code == kExitFrontendError);
    CHECK(r.err.find(path + ":4:3:") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("malformed sidecar: exit 2 with its line") {
    std::string path = temp_path("bad.annots");
    write_file(path, "class MySqlCon @MustCall(dispose)\nfield MySqlCon.con @Owningx\n");
    auto r = corpus_run("verify", "fig1", {"--annots", path});
    CHECK(r.code == kExitFrontendError);
    CHECK(r.err.find(path + ":2:") != std::string::npos);
    std::filesystem::remove(path);
  }

  TEST_CASE("--json") {
    auto inf = corpus_run("infer", "fig1", {"--json"});
    auto arr = nlohmann::json::parse(inf.out);
    REQUIRE(arr.is_array());
    CHECK(arr.size() == 6);
    CHECK(arr[0]["annotation"] == "class MySqlCon @MustCall(dispose)");
    CHECK(arr[0]["provenance"] == "rule 1");

    auto chk = corpus_run("check", "fig3", {"--json"});
    auto ls = lines(chk.out);
    CHECK(ls.size() == 3);
    for (const auto& l : ls) {
      auto j = nlohmann::json::parse(l);
      for (const char* k : {"file", "line", "code", "message", "obligation"}) CHECK(j.contains(k));
    }
  }

  TEST_CASE("facts and dumps") {
    auto f = corpus_run("facts", "fig1");
    auto a = load_corpus("fig1");
    CHECK(f.code == 0);
    CHECK(f.out == dump_facts(a->program, a->facts));
    auto c = corpus_run("check", "fig1", {"--dump-cfg"});
    CHECK(c.out.find("cfg MySqlCon.<init>") != std::string::npos);
    CHECK(c.out.find("n3 -> n1 N") != std::string::npos);
  }
}

TEST_SUITE("corpus") {
  TEST_CASE("inferred sidecars match the goldens") {
    for (const auto& name : golden_programs()) {
      if (name == "fig5") continue;
      CAPTURE(name);
      CHECK(corpus_run("infer", name).out == read_file("corpus/" + name + ".golden.annots"));
    }
  }

  TEST_CASE("fig5: everything inferred is in the hand-written golden") {
    auto golden = lines(read_file("corpus/fig5.golden.annots"));
    auto got = lines(corpus_run("infer", "fig5").out);
    std::set<std::string> g(golden.begin(), golden.end());
    for (const auto& l : got) CHECK(g.contains(l));
    CHECK(got.size() == 2);
  }

  TEST_CASE("warnings match the goldens") {
    for (const auto& name : warning_programs()) {
      CAPTURE(name);
      auto r = corpus_run(annotated(name) ? "verify" : "check", name);
      CHECK(r.out == read_file("corpus/" + name + ".golden.warnings"));
      CHECK(r.code == (r.out.empty() ? kExitOk : kExitWarnings));
    }
    CHECK(corpus_run("verify", "fig6").out == read_file("corpus/fig6.unannotated.golden.warnings"));
  }

  TEST_CASE("check equals infer followed by verify") {
    for (const auto& name : warning_programs()) {
      std::string side = temp_path(name + ".annots");
      REQUIRE(corpus_run("infer", name, {"--out", side}).code == 0);
      auto chained = corpus_run("verify", name, {"--annots", side});
      auto direct = corpus_run("check", name);
      CAPTURE(name);
      CHECK(chained.out == direct.out);
      CHECK(chained.code == direct.code);
      std::filesystem::remove(side);
    }
  }
}
