// Prints one [PASS]/[FAIL] line per acceptance criterion. Run from the
// project root (ctest sets the working directory).

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rms/sidecar.hpp"
#include "support/gen.hpp"
#include "support/helpers.hpp"
#include "support/properties.hpp"

using namespace rms;
using namespace rms::test;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      out_.pass = false;
      if (!out_.detail.empty()) out_.detail += "; ";
      out_.detail += what;
    }
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  Outcome done() {
    if (out_.pass) out_.detail = notes_;
    return out_;
  }

 private:
  Outcome out_;
  std::string notes_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> stubs() { return {"--stubs", "corpus/stdlib.rml"}; }

CliRun rms_cmd(const std::string& mode, const std::string& name, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {mode, corpus_path(name)};
  for (const auto& s : stubs()) args.push_back(s);
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args);
}

std::set<std::string> line_set(const std::string& text) {
  auto v = lines(text);
  return {v.begin(), v.end()};
}

int count_with(const std::vector<std::string>& ls, const std::string& needle) {
  return static_cast<int>(std::count_if(ls.begin(), ls.end(), [&](const auto& l) {
    return l.find(needle) != std::string::npos;
  }));
}

// Line span of a method's declaration and body.
std::pair<int, int> method_lines(const Analysis& a, const std::string& cls, const std::string& name) {
  for (const auto& m : a.program.methods) {
    if (a.program.cls(m.owner).name != cls || m.name != name || !m.body) continue;
    int last = m.pos.line;
    for_each_stmt(*m.body, [&](const Stmt& s) { last = std::max(last, s.pos.line); });
    return {m.pos.line, last};
  }
  return {0, -1};
}

int warning_line(const std::string& line) {
  // file:line: code: message
  auto a = line.find(':');
  auto b = line.find(':', a + 1);
  return std::stoi(line.substr(a + 1, b - a - 1));
}

Outcome ac1() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  auto r = rms_cmd("infer", "fig1");
  double secs = seconds_since(t0);
  const std::set<std::string> figure = {
      "class MySqlCon @MustCall(dispose)",
      "field MySqlCon.con @Owning",
      "method MySqlCon.dispose @Calls(this.con; close)",
      "ctor MySqlCon.<init>#1 @ResourceAlias",
      "return MySqlCon.<init> @ResourceAlias",
      "param MySqlCon.closeCon#1 @Owning",
  };
  c.expect(r.code == 0, "exit " + std::to_string(r.code));
  c.expect(line_set(r.out) == figure, "sidecar differs from the figure: " + r.out);
  c.expect(lines(r.out).size() == 6, "expected 6 lines");
  c.expect(line_set(read_file("corpus/fig1.golden.annots")) == figure, "golden sidecar differs from the figure");
  c.expect(secs < 1.0, "took " + std::to_string(secs) + "s");
  c.note("6/6 annotations");
  return c.done();
}

Outcome ac2() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  auto r = rms_cmd("check", "fig1");
  double secs = seconds_since(t0);
  c.expect(r.code == 0, "exit " + std::to_string(r.code));
  c.expect(r.out.empty(), "warnings: " + r.out);
  c.expect(secs < 1.0, "took " + std::to_string(secs) + "s");
  c.note("0 warnings");
  return c.done();
}

Outcome ac3() {
  Check c;
  auto inferred = lines(rms_cmd("infer", "fig4").out);
  for (const std::string f : {"storage", "curSegment", "committedTxnId"}) {
    c.expect(std::count(inferred.begin(), inferred.end(), "method EditLogOutput.close @Calls(this." + f + "; close)") == 1,
             "no @Calls for " + f);
  }
  auto r = rms_cmd("check", "fig4");
  auto ws = lines(r.out);
  c.expect(ws.size() == 1, std::to_string(ws.size()) + " warnings");
  if (ws.size() == 1) {
    c.expect(ws[0].find(": calls.not.verified: ") != std::string::npos, "wrong code: " + ws[0]);
    auto a = load_corpus("fig4");
    auto [lo, hi] = method_lines(*a, "EditLogOutput", "close");
    int line = warning_line(ws[0]);
    c.expect(lo <= line && line <= hi, "warning at line " + std::to_string(line) + " outside close()");
    c.note("1 calls.not.verified at line " + std::to_string(line) + " in close() [" + std::to_string(lo) + "-" +
           std::to_string(hi) + "]");
  }
  return c.done();
}

Outcome ac4() {
  Check c;
  std::string first;
  for (int i = 0; i < 10; ++i) {
    auto r = rms_cmd("infer", "fig3", {"--provenance"});
    c.expect(r.code == 0, "exit " + std::to_string(r.code));
    if (i == 0) first = r.out;
    c.expect(r.out == first, "run " + std::to_string(i) + " differs");
  }
  auto ls = lines(first);
  c.expect(count_with(ls, "class Learner @MustCall(") == 1, "no single class @MustCall");
  c.expect(count_with(ls, "field Learner.sock @Owning") == 1, "sock not @Owning");
  for (const std::string m : {"closeSockSync", "closeSocket", "shutdown"}) {
    std::string prefix = "method Learner." + m + " @Calls(this.sock; close)  # rule ";
    bool via_4_or_5 = count_with(ls, prefix + "4") + count_with(ls, prefix + "5") == 1;
    c.expect(via_4_or_5, m + " lacks @Calls(this.sock; close) from rule 4/5");
  }
  for (const auto& l : ls) {
    if (l.rfind("class Learner", 0) == 0) c.note(l.substr(0, l.find("  #")));
  }
  c.note("10 identical runs");
  return c.done();
}

Outcome ac5() {
  Check c;
  auto ls = lines(rms_cmd("infer", "wrapper", {"--provenance"}).out);
  c.expect(count_with(ls, "ctor Wrapper.<init>#1 @Owning  # rule 11") == 1, "param 1 not @Owning by rule 11");
  c.expect(count_with(ls, "ctor Wrapper.<init>#2 @Owning  # rule 11") == 1, "param 2 not @Owning by rule 11");
  auto ws = lines(rms_cmd("check", "wrapper").out);
  c.expect(ws.size() == 1, std::to_string(ws.size()) + " warnings");
  if (ws.size() == 1) {
    c.expect(ws[0].find("required.method.not.called") != std::string::npos &&
                 ws[0].find("var w = new Wrapper(") != std::string::npos,
             "unexpected warning: " + ws[0]);
  }
  c.note("1 warning on w");
  return c.done();
}

Outcome ac6() {
  Check c;
  auto a = load_corpus("fig6");
  auto [lo, hi] = method_lines(*a, "ConnectionWrapper", "<init>");
  if (hi < lo) {
    for (const auto& m : a->program.methods) {
      if (m.is_constructor() && a->program.cls(m.owner).name == "ConnectionWrapper" && m.body) {
        lo = m.pos.line;
        hi = lo;
        for_each_stmt(*m.body, [&](const Stmt& s) { hi = std::max(hi, s.pos.line); });
      }
    }
  }
  auto in_ctor = [&](const std::string& w) { return lo <= warning_line(w) && warning_line(w) <= hi; };

  auto before = lines(rms_cmd("verify", "fig6").out);
  c.expect(before.size() == 1, "unannotated: " + std::to_string(before.size()) + " warnings");
  c.expect(count_with(before, "non.owning.field.assignment") == 1, "unannotated: no non.owning.field.assignment");
  c.expect(count_with(before, "required.method.not.called") == 0, "unannotated: client warnings");
  if (before.size() == 1) c.expect(in_ctor(before[0]), "unannotated warning outside the constructor");

  auto after = lines(rms_cmd("check", "fig6").out);
  c.expect(std::none_of(after.begin(), after.end(), in_ctor), "inferred: constructor warnings remain");
  c.expect(count_with(after, "required.method.not.called") == 2, "inferred: expected 2 client warnings");
  c.expect(after.size() == 2, "inferred: " + std::to_string(after.size()) + " warnings");
  c.note("1 ctor warning -> 2 client warnings");
  return c.done();
}

Outcome ac7() {
  Check c;
  int programs = 0;
  int failed = 0;
  auto report = [&](const std::string& what) {
    if (failed++ < 3) c.expect(false, what);
  };
  auto one = [&](const Analysis& a, const std::string& name) {
    ++programs;
    if (auto p = fixed_point_problem(a)) report(name + ": " + *p);
    if (a.program.statement_count() > 200) return;
    auto diff = oracle_differences(a);
    if (!diff.empty()) report(name + ": " + diff.front() + " (" + std::to_string(diff.size()) + " differences)");
  };
  for (const auto& name : warning_programs()) one(*load_corpus(name), name);
  int generated = 0;
  for (std::uint32_t seed = 1; seed <= 300; ++seed) {
    auto a = load_text(gen::class_program(seed), gen::class_program_stubs());
    if (a->program.statement_count() > 200) continue;
    ++generated;
    one(*a, "generated seed " + std::to_string(seed));
  }
  c.expect(failed == 0, std::to_string(failed) + " failing programs");
  c.note(std::to_string(programs) + " programs (" + std::to_string(generated) + " generated), monotone, converged, " +
         "oracle-equal");
  return c.done();
}

Outcome ac8() {
  Check c;
  std::size_t checks = 0;
  int failed = 0;
  for (std::uint32_t seed = 1; seed <= 1000; ++seed) {
    auto r = check_alias_case(seed);
    checks += r.checks;
    if (!r.violations.empty()) {
      if (failed++ < 3) c.expect(false, "seed " + std::to_string(seed) + ": " + r.violations.front());
    }
  }
  c.expect(failed == 0, std::to_string(failed) + " failing cases");
  c.note("1000 programs, " + std::to_string(checks) + " alias queries, 0 violations");
  return c.done();
}

Outcome ac9() {
  Check c;
  int leaking = 0;
  int failed = 0;
  for (std::uint32_t seed = 1; seed <= 1000; ++seed) {
    auto r = check_soundness_case(seed);
    if (!r.leaks.empty()) ++leaking;
    if (r.violated() && failed++ < 3) c.expect(false, "seed " + std::to_string(seed) + ": leak missed");
  }
  c.expect(failed == 0, std::to_string(failed) + " missed leaks");
  // A generator that never leaks would make this vacuous.
  c.expect(leaking >= 100, "only " + std::to_string(leaking) + " leaking programs");
  c.note("1000 programs, " + std::to_string(leaking) + " with oracle leaks, 0 missed");
  return c.done();
}

Outcome ac10() {
  Check c;
  int total = 0;
  int recovered = 0;
  std::vector<std::string> misses;
  for (const auto& name : golden_programs()) {
    auto golden = line_set(read_file("corpus/" + name + ".golden.annots"));
    auto got = line_set(rms_cmd("infer", name).out);
    for (const auto& g : golden) {
      ++total;
      if (got.contains(g)) {
        ++recovered;
      } else {
        misses.push_back(name + ": " + g);
      }
    }
  }
  double rate = total ? 100.0 * recovered / total : 0.0;
  c.expect(rate >= 90.0, "recovery " + std::to_string(rate) + "%");
  // Documented incompleteness: the abstract-disposal pattern (fig5) and the
  // rule 1 tie-break (fig3).
  for (const auto& m : misses) {
    c.expect(m.rfind("fig5: ", 0) == 0 || m.rfind("fig3: ", 0) == 0, "undocumented miss " + m);
  }
  std::ostringstream os;
  os.precision(1);
  os << std::fixed << recovered << "/" << total << " = " << rate << "%, " << misses.size() << " misses (fig5)";
  c.note(os.str());
  return c.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << (o.detail.empty() ? "" : "  " + o.detail) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
