#include "support/helpers.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rms/cli.hpp"
#include "rms/printer.hpp"

namespace rms::test {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const std::vector<std::string>& golden_programs() {
  static const std::vector<std::string> names = {
      "fig1",          "fig3",           "fig4",          "fig5",           "fig6",     "wrapper",
      "direct_close",  "helper_chain",   "owning_params", "resource_alias", "getters",  "inheritance",
      "loops",         "field_replace",  "factory",       "disposal_choice", "partial_disposal",
      "nested_owner",  "client_leaks",
  };
  return names;
}

const std::vector<std::string>& warning_programs() {
  static const std::vector<std::string> names = [] {
    auto v = golden_programs();
    v.insert(v.end(), {"fig1_annotated", "fig6_annotated", "override"});
    return v;
  }();
  return names;
}

std::string corpus_path(const std::string& name) { return "corpus/" + name + ".rml"; }

std::unique_ptr<Analysis> load_corpus(const std::string& name) {
  return analyze({{"corpus/stdlib.rml", read_file("corpus/stdlib.rml"), true},
                  {corpus_path(name), read_file(corpus_path(name)), false}});
}

std::unique_ptr<Analysis> load_text(const std::string& text, const std::string& stubs) {
  std::vector<SourceText> sources;
  if (!stubs.empty()) sources.push_back({"stubs.rml", stubs, true});
  sources.push_back({"input.rml", text, false});
  return analyze(sources);
}

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

MethodId method_id(const Program& p, const std::string& cls, const std::string& name) {
  for (const auto& m : p.methods) {
    if (p.cls(m.owner).name == cls && m.name == name) return m.id;
  }
  throw std::runtime_error("no method " + cls + "." + name);
}

const Stmt& stmt_of(const Program& p, MethodId m, const std::string& text) {
  const Stmt* found = nullptr;
  if (p.method(m).body) {
    for_each_stmt(*p.method(m).body, [&](const Stmt& s) {
      if (found == nullptr && print_stmt_line(s) == text) found = &s;
    });
  }
  if (found == nullptr) throw std::runtime_error("no statement '" + text + "' in " + p.qualified_name(m));
  return *found;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "rms-tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace rms::test
