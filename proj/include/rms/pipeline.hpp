#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rms/annotations.hpp"
#include "rms/cfg.hpp"
#include "rms/facts.hpp"
#include "rms/infer.hpp"
#include "rms/program.hpp"
#include "rms/verify.hpp"

namespace rms {

struct SourceText {
  std::string path;
  std::string text;
  bool is_stub = false;
};

/// Frontend through fact extraction. Cfgs point into `program`; the struct
/// is therefore neither copyable nor movable.
struct Analysis {
  Program program;
  CfgSet cfgs;
  FactBase facts;

  Analysis() = default;
  Analysis(const Analysis&) = delete;
  Analysis& operator=(const Analysis&) = delete;
};

/// tokenize -> parse -> resolve -> normalize -> cfg -> facts.
/// Throws FrontendError.
std::unique_ptr<Analysis> analyze(const std::vector<SourceText>& sources);

/// Declared annotations followed by inference.
InferenceResult infer_annotations(const Analysis& analysis, const InferOptions& options = {});

}  // namespace rms
