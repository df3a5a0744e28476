#include "rms/pipeline.hpp"

#include "rms/normalize.hpp"
#include "rms/parser.hpp"
#include "rms/resolve.hpp"

namespace rms {

std::unique_ptr<Analysis> analyze(const std::vector<SourceText>& sources) {
  std::vector<SourceUnit> units;
  units.reserve(sources.size());
  for (const auto& src : sources) {
    SourceUnit unit = parse_source(src.text, src.path);
    unit.is_stub = src.is_stub;
    units.push_back(std::move(unit));
  }
  auto a = std::make_unique<Analysis>();
  a->program = normalize(resolve(std::move(units)));
  a->cfgs = build_all_cfgs(a->program);
  a->facts = extract_facts(a->program, a->cfgs);
  return a;
}

InferenceResult infer_annotations(const Analysis& analysis, const InferOptions& options) {
  return run_inference(analysis.program, analysis.cfgs, analysis.facts, declared_store(analysis.program, analysis.facts),
                       options);
}

}  // namespace rms
