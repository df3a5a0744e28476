#include "rms/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rms/pipeline.hpp"
#include "rms/sidecar.hpp"

namespace rms {

namespace {

struct RunConfig {
  std::string mode;
  std::vector<std::string> inputs;
  std::vector<std::string> stubs;
  std::string annots_in;
  std::string out_path;
  bool json = false;
  bool provenance = false;
  bool dump_cfg = false;
  bool dump_aliases = false;
  int max_rounds = 100;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int unit_of(const Program& p, const AnnotRecord& r) {
  switch (r.site) {
    case SiteKind::kClass: return p.cls(ClassId(r.owner)).unit;
    case SiteKind::kField: return p.cls(p.field(FieldId(r.owner)).owner).unit;
    default: return p.cls(p.method(MethodId(r.owner)).owner).unit;
  }
}

void print_warnings(const std::vector<Warning>& warnings, bool json, std::ostream& out) {
  for (const auto& w : warnings) out << (json ? format_warning_json(w) : format_warning(w)) << "\n";
}

void dump_debug(const RunConfig& cfg, const Analysis& a, const AnnotationStore& store, std::ostream& out) {
  if (cfg.dump_cfg) {
    for (const auto& [m, g] : a.cfgs) out << dump_cfg(a.program, g);
  }
  if (cfg.dump_aliases) {
    AliasSet aliases = compute_all_aliases(a.program, a.cfgs, store);
    for (const auto& [m, g] : a.cfgs) out << dump_aliases(a.program, g, aliases.at(m));
  }
}

int run(const RunConfig& cfg, std::ostream& out) {
  std::vector<SourceText> sources;
  // Read before building the aggregate: GCC < 13 leaks already-built members
  // when a later brace initializer throws.
  auto add = [&](const std::string& path, bool stub) {
    std::string text = read_file(path);
    sources.push_back({path, std::move(text), stub});
  };
  for (const auto& s : cfg.stubs) add(s, true);
  for (const auto& s : cfg.inputs) add(s, false);
  auto analysis = analyze(sources);
  const Analysis& a = *analysis;

  if (cfg.mode == "facts") {
    dump_debug(cfg, a, declared_store(a.program, a.facts), out);
    out << dump_facts(a.program, a.facts);
    return kExitOk;
  }

  AnnotationStore store;
  InferOptions opts;
  opts.max_rounds = cfg.max_rounds;
  if (cfg.mode == "infer" || cfg.mode == "check") {
    store = infer_annotations(a, opts).store;
  } else {
    store = declared_store(a.program, a.facts);
    if (!cfg.annots_in.empty()) load_sidecar(a.program, read_file(cfg.annots_in), cfg.annots_in, store);
  }
  dump_debug(cfg, a, store, out);

  if (cfg.mode == "infer") {
    SidecarOptions so;
    so.provenance = cfg.provenance;
    std::string text;
    if (cfg.json) {
      auto arr = nlohmann::json::array();
      std::vector<std::pair<std::string, std::string>> rows;
      for (const auto& [r, prov] : store.records()) {
        if (prov.declared() && a.program.stub_files[static_cast<std::size_t>(unit_of(a.program, r))]) continue;
        rows.emplace_back(render_record(a.program, r), prov.declared() ? "declared" : "rule " + std::to_string(prov.rule));
      }
      std::sort(rows.begin(), rows.end());
      for (const auto& [line, prov] : rows) arr.push_back({{"annotation", line}, {"provenance", prov}});
      text = arr.dump(2) + "\n";
    } else {
      text = write_sidecar(a.program, store, so);
    }
    if (cfg.out_path.empty() || cfg.out_path == "-") {
      out << text;
    } else {
      std::ofstream f(cfg.out_path, std::ios::binary);
      if (!f) throw IoError(cfg.out_path + ": cannot write file");
      f << text;
    }
    return kExitOk;
  }

  auto warnings = verify_program(a.program, a.cfgs, store);
  print_warnings(warnings, cfg.json, out);
  return warnings.empty() ? kExitOk : kExitWarnings;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Resource-management annotation inference and verification", "rms"};
  app.add_option("mode", cfg.mode, "infer | verify | check | facts")
      ->required()
      ->check(CLI::IsMember({"infer", "verify", "check", "facts"}));
  app.add_option("files", cfg.inputs, "program files (.rml)")->required();
  app.add_option("--stubs", cfg.stubs, "library stub files");
  app.add_option("--annots", cfg.annots_in, "annotation sidecar to load (verify)");
  app.add_option("--out", cfg.out_path, "where infer writes the sidecar (default: stdout)");
  app.add_flag("--json", cfg.json, "JSON output");
  app.add_flag("--provenance", cfg.provenance, "append '# rule N' / '# declared' to sidecar lines");
  app.add_flag("--dump-cfg", cfg.dump_cfg, "print control-flow graphs");
  app.add_flag("--dump-aliases", cfg.dump_aliases, "print resource-alias sets");
  app.add_option("--max-rounds", cfg.max_rounds, "inference round limit")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rms: " << e.what() << "\n" << "run 'rms --help' for usage\n";
    return kExitFrontendError;
  }

  try {
    return run(cfg, out);
  } catch (const FrontendError& e) {
    err << e.what() << "\n";
    return kExitFrontendError;
  } catch (const SidecarError& e) {
    err << e.what() << "\n";
    return kExitFrontendError;
  } catch (const IoError& e) {
    err << "rms: " << e.what() << "\n";
    return kExitFrontendError;
  } catch (const InferenceDiverged& e) {
    err << "rms: internal error: " << e.what() << "\n";
    return kExitInternalError;
  } catch (const std::exception& e) {
    err << "rms: internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
}

}  // namespace rms
