#pragma once

#include <vector>

#include "rms/ast.hpp"
#include "rms/program.hpp"

namespace rms {

/// Binds type names, fields, call targets and locals; validates inheritance
/// and annotation placement. Throws ResolveError.
Program resolve(std::vector<SourceUnit> units);

}  // namespace rms
