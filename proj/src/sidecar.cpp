#include "rms/sidecar.hpp"

#include <algorithm>
#include <sstream>

namespace rms {

namespace {

int unit_of(const Program& p, const AnnotRecord& r) {
  switch (r.site) {
    case SiteKind::kClass: return p.cls(ClassId(r.owner)).unit;
    case SiteKind::kField: return p.cls(p.field(FieldId(r.owner)).owner).unit;
    default: return p.cls(p.method(MethodId(r.owner)).owner).unit;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::optional<AnnotKind> kind_named(std::string_view name) {
  for (auto k : {AnnotKind::kMustCall, AnnotKind::kOwning, AnnotKind::kNotOwning, AnnotKind::kCalls,
                 AnnotKind::kResourceAlias}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

SidecarError::SidecarError(std::string file, int line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), file_(std::move(file)), line_(line), detail_(message) {}

std::string render_record(const Program& program, const AnnotRecord& r) {
  std::string kind = "@" + std::string(to_string(r.kind));
  switch (r.site) {
    case SiteKind::kClass: {
      std::string methods;
      for (const auto& m : r.methods) methods += (methods.empty() ? "" : ", ") + m;
      return "class " + program.cls(ClassId(r.owner)).name + " " + kind + "(" + methods + ")";
    }
    case SiteKind::kField:
      return "field " + program.qualified_name(FieldId(r.owner)) + " " + kind;
    case SiteKind::kMethod:
      return "method " + program.qualified_name(MethodId(r.owner)) + " " + kind + "(this." +
             program.field(FieldId(r.field)).name + "; " + (r.methods.empty() ? "" : r.methods.front()) + ")";
    case SiteKind::kParam: {
      MethodId m(r.owner);
      std::string prefix = program.method(m).is_constructor() ? "ctor " : "param ";
      return prefix + program.qualified_name(m) + "#" + std::to_string(r.index + 1) + " " + kind;
    }
    case SiteKind::kReturn:
      return "return " + program.qualified_name(MethodId(r.owner)) + " " + kind;
  }
  return {};
}

std::string write_sidecar(const Program& program, const AnnotationStore& store, const SidecarOptions& options) {
  std::vector<std::string> lines;
  for (const auto& [record, prov] : store.records()) {
    if (prov.declared() && !options.include_stub_declared &&
        program.stub_files[static_cast<std::size_t>(unit_of(program, record))]) {
      continue;
    }
    std::string line = render_record(program, record);
    if (options.provenance) line += prov.declared() ? "  # declared" : "  # rule " + std::to_string(prov.rule);
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::vector<AnnotRecord> read_sidecar(const Program& program, std::string_view text, const std::string& file) {
  std::vector<AnnotRecord> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto fail = [&](const std::string& msg) { throw SidecarError(file, lineno, msg); };
    std::string_view line = raw;
    // A comment starts at a '#' that begins the line or follows whitespace.
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;

    auto sp1 = line.find(' ');
    if (sp1 == std::string_view::npos) fail("expected '<site> <name> @<Annotation>'");
    std::string_view site = line.substr(0, sp1);
    std::string_view rest = trim(line.substr(sp1 + 1));
    auto sp2 = rest.find(' ');
    if (sp2 == std::string_view::npos) fail("missing annotation");
    std::string_view name = rest.substr(0, sp2);
    std::string_view annot = trim(rest.substr(sp2 + 1));
    if (annot.empty() || annot.front() != '@') fail("annotation must start with '@'");
    annot.remove_prefix(1);
    std::string_view args;
    bool has_args = false;
    if (auto lp = annot.find('('); lp != std::string_view::npos) {
      if (annot.back() != ')') fail("unbalanced parentheses");
      args = annot.substr(lp + 1, annot.size() - lp - 2);
      annot = annot.substr(0, lp);
      has_args = true;
    }
    auto kind = kind_named(annot);
    if (!kind) fail("unknown annotation '@" + std::string(annot) + "'");

    auto find_class = [&](std::string_view n) {
      auto c = program.find_class(n);
      if (!c) fail("unknown class '" + std::string(n) + "'");
      return *c;
    };
    auto find_method = [&](std::string_view q) {
      auto dot = q.find('.');
      if (dot == std::string_view::npos) fail("expected 'Class.member', got '" + std::string(q) + "'");
      ClassId c = find_class(q.substr(0, dot));
      const auto& ci = program.cls(c);
      for (const auto* list : {&ci.constructors, &ci.methods}) {
        for (MethodId m : *list) {
          if (program.qualified_name(m) == q) return m;
        }
      }
      fail("unknown method '" + std::string(q) + "'");
      return MethodId{};
    };
    auto expect_args = [&](bool want) {
      if (want != has_args) fail(want ? "missing annotation arguments" : "unexpected annotation arguments");
    };

    AnnotRecord r;
    r.kind = *kind;
    if (site == "class") {
      if (*kind != AnnotKind::kMustCall) fail("class annotations must be @MustCall");
      expect_args(true);
      r.site = SiteKind::kClass;
      r.owner = find_class(name).value;
      r.methods = split_list(args);
      std::sort(r.methods.begin(), r.methods.end());
      r.methods.erase(std::unique(r.methods.begin(), r.methods.end()), r.methods.end());
    } else if (site == "field") {
      if (*kind != AnnotKind::kOwning && *kind != AnnotKind::kNotOwning) fail("field annotations are @Owning or @NotOwning");
      expect_args(false);
      auto dot = name.find('.');
      if (dot == std::string_view::npos) fail("expected 'Class.field'");
      ClassId c = find_class(name.substr(0, dot));
      std::optional<FieldId> f;
      for (FieldId id : program.cls(c).fields) {
        if (program.field(id).name == name.substr(dot + 1)) f = id;
      }
      if (!f) fail("unknown field '" + std::string(name) + "'");
      r.site = SiteKind::kField;
      r.owner = f->value;
    } else if (site == "method") {
      if (*kind != AnnotKind::kCalls) fail("method annotations must be @Calls");
      expect_args(true);
      MethodId m = find_method(name);
      auto semi = args.find(';');
      if (semi == std::string_view::npos) fail("expected @Calls(this.f; m)");
      auto fexpr = trim(args.substr(0, semi));
      auto mname = trim(args.substr(semi + 1));
      if (fexpr.substr(0, 5) != "this.") fail("@Calls field must be 'this.f'");
      auto f = program.lookup_field(program.method(m).owner, fexpr.substr(5));
      if (!f) fail("unknown field '" + std::string(fexpr) + "'");
      if (mname.empty()) fail("@Calls needs a method name");
      r.site = SiteKind::kMethod;
      r.owner = m.value;
      r.field = f->value;
      r.methods = {std::string(mname)};
    } else if (site == "param" || site == "ctor") {
      if (*kind == AnnotKind::kMustCall || *kind == AnnotKind::kCalls) fail("invalid parameter annotation");
      expect_args(false);
      auto hash = name.rfind('#');
      if (hash == std::string_view::npos) fail("expected 'Class.method#N'");
      MethodId m = find_method(name.substr(0, hash));
      if ((site == "ctor") != program.method(m).is_constructor()) {
        fail("use 'ctor' for constructor parameters and 'param' otherwise");
      }
      int index = 0;
      auto digits = name.substr(hash + 1);
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
        fail("bad parameter index");
      }
      index = std::stoi(std::string(digits));
      if (index < 1 || index > static_cast<int>(program.method(m).params.size())) fail("parameter index out of range");
      r.site = SiteKind::kParam;
      r.owner = m.value;
      r.index = index - 1;
    } else if (site == "return") {
      if (*kind == AnnotKind::kMustCall || *kind == AnnotKind::kCalls) fail("invalid return annotation");
      expect_args(false);
      MethodId m = find_method(name);
      r.site = SiteKind::kReturn;
      r.owner = m.value;
    } else {
      fail("unknown site '" + std::string(site) + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void load_sidecar(const Program& program, std::string_view text, const std::string& file, AnnotationStore& store) {
  // Line numbers are re-derived by reading one line at a time.
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::vector<AnnotRecord> recs;
    try {
      recs = read_sidecar(program, raw, file);
    } catch (const SidecarError& e) {
      throw SidecarError(file, lineno, e.detail());
    }
    for (const auto& r : recs) {
      store.add(r, Provenance::declared_here());
      if (!store.contains(r)) {
        throw SidecarError(file, lineno, "'" + render_record(program, r) + "' contradicts another annotation");
      }
    }
  }
}

}  // namespace rms
