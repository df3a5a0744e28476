#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rms/alias.hpp"
#include "rms/annotations.hpp"
#include "rms/cfg.hpp"
#include "rms/facts.hpp"

namespace rms {

enum class WarningCode {
  kRequiredMethodNotCalled,
  kCallsNotVerified,
  kOwningFieldNotCovered,
  kResourceAliasNotVerified,
  kOwningFieldOverwritten,
  kOverrideInconsistent,
  kNonOwningFieldAssignment,
};

std::string_view to_string(WarningCode code);

struct Warning {
  WarningCode code = WarningCode::kRequiredMethodNotCalled;
  std::string file;
  int line = 0;
  std::string message;
  std::optional<std::vector<std::string>> obligation;

  bool operator==(const Warning&) const = default;
};

/// (file, line, code, message) order.
bool warning_less(const Warning& a, const Warning& b);
void sort_warnings(std::vector<Warning>& warnings);

std::string format_warning(const Warning& w);
std::string format_warning_json(const Warning& w);

struct VerifyContext {
  const Program& program;
  const CfgSet& cfgs;
  const AnnotationStore& store;
  const AliasSet& aliases;
};

std::vector<Warning> check_method_obligations(const VerifyContext& ctx, MethodId method);
std::optional<Warning> check_calls_annotation(const VerifyContext& ctx, MethodId method);
std::vector<Warning> check_owning_fields(const VerifyContext& ctx, ClassId cls);
std::optional<Warning> check_resource_alias_annotation(const VerifyContext& ctx, MethodId method);
std::vector<Warning> check_override_consistency(const Program& program, const AnnotationStore& store);

/// All checks over the whole program, sorted and de-duplicated. Never
/// modifies `store`.
std::vector<Warning> verify_program(const Program& program, const CfgSet& cfgs, const AnnotationStore& store);

}  // namespace rms
