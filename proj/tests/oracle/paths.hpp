#pragma once

// Execution paths enumerated straight from the AST, with loops unrolled a
// bounded number of times. Independent of the Cfg builder.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rms/program.hpp"

namespace rms::oracle {

struct Step {
  const Stmt* stmt = nullptr;
  bool threw = false;  // the path leaves through this statement's exception
};

struct Path {
  std::vector<Step> steps;
  bool normal = true;  // ended at the normal exit
};

struct PathLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool stmt_may_throw(const Program& program, const Stmt& s);

/// All paths of m's body; a `while` body runs at most `unroll` times.
std::vector<Path> enumerate_paths(const Program& program, MethodId m, int unroll = 2, std::size_t limit = 200000);

}  // namespace rms::oracle
