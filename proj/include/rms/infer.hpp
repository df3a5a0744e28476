#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <vector>

#include "rms/alias.hpp"
#include "rms/annotations.hpp"
#include "rms/cfg.hpp"
#include "rms/facts.hpp"

namespace rms {

struct InferOptions {
  int max_rounds = 100;
};

/// Raised when the fixed point is not reached within max_rounds.
class InferenceDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InferenceEvent {
  int round = 0;
  AnnotRecord record;
  int rule = 0;
};

struct InferenceResult {
  AnnotationStore store;
  int rounds = 0;
  /// Store size after each round (monotonicity instrumentation).
  std::vector<std::size_t> size_per_round;
  /// Additions in the order they were merged.
  std::vector<InferenceEvent> events;
};

/// Classes ordered so that a class comes after the classes its fields are
/// typed with and after its superclass; cycles broken by name.
std::vector<ClassId> class_dependency_order(const Program& program);

/// Rule 1 tie-break between methods that dispose every @Owning field.
MethodId pick_disposal_method(const Program& program, std::vector<MethodId> candidates);

/// AlwaysWrittenToOwningField(p, m): every normal path of m writes a resource
/// alias of parameter `index` into an @Owning field that is not written again.
bool always_written_to_owning_field(const Program& program, const Cfg& cfg, const AliasState& aliases,
                                    const AnnotationStore& store, int index);

/// Every normal path of m returns a resource alias of parameter `index`.
bool always_returns_alias_of(const Program& program, const Cfg& cfg, const AliasState& aliases, int index);

/// Runs the two-phase optimistic inference to a fixed point, starting from
/// `seed` (usually the declared annotations).
InferenceResult run_inference(const Program& program, const CfgSet& cfgs, const FactBase& facts,
                              AnnotationStore seed, const InferOptions& options = {});

// Single rule groups evaluated against a store snapshot. Exposed for tests.
struct RuleAddition {
  AnnotRecord record;
  int rule = 0;
};

std::vector<RuleAddition> infer_calls(const Program& program, const CfgSet& cfgs, const FactBase& facts,
                                      const AnnotationStore& store);
std::vector<RuleAddition> infer_owning_params_phase1(const Program& program, const FactBase& facts,
                                                     const AnnotationStore& store);
std::vector<RuleAddition> infer_owning_fields(const Program& program, const FactBase& facts,
                                              const AnnotationStore& store);
std::vector<RuleAddition> infer_class_must_call(const Program& program, const FactBase& facts,
                                                const AnnotationStore& store, const std::vector<ClassId>& order);
std::vector<RuleAddition> infer_owning_params_phase2(const Program& program, const CfgSet& cfgs,
                                                     const FactBase& facts, const AliasSet& aliases,
                                                     const AnnotationStore& store);
std::vector<RuleAddition> infer_resource_alias(const Program& program, const CfgSet& cfgs, const FactBase& facts,
                                               const AliasSet& aliases, const AnnotationStore& store);
std::vector<RuleAddition> infer_not_owning_return(const Program& program, const FactBase& facts,
                                                  const AliasSet& aliases, const AnnotationStore& store);

}  // namespace rms
