#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rms/pipeline.hpp"

namespace rms::test {

std::string read_file(const std::string& path);

/// Corpus programs with golden annotation sidecars.
const std::vector<std::string>& golden_programs();
/// Every corpus program that has a golden warning file.
const std::vector<std::string>& warning_programs();

std::string corpus_path(const std::string& name);

/// Analyzes corpus/<name>.rml together with corpus/stdlib.rml.
std::unique_ptr<Analysis> load_corpus(const std::string& name);

/// Analyzes in-memory text, optionally with stub text.
std::unique_ptr<Analysis> load_text(const std::string& text, const std::string& stubs = "");

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args);

/// Method `name` of class `cls`; constructors are named after the class.
MethodId method_id(const Program& p, const std::string& cls, const std::string& name);

/// The statement of m whose printed form is `text`.
const Stmt& stmt_of(const Program& p, MethodId m, const std::string& text);

/// Lines of `text`, without the trailing empty line.
std::vector<std::string> lines(const std::string& text);

/// A scratch file path under the build tree's temp dir; removed by the caller.
std::string temp_path(const std::string& name);

}  // namespace rms::test
