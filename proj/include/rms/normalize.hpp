#pragma once

#include "rms/program.hpp"

namespace rms {

/// Binds every discarded non-void call result to a fresh `_tN` local and
/// renumbers statement ids in (method, preorder) order. Idempotent.
Program normalize(Program program);

}  // namespace rms
