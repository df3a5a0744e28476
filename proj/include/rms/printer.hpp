#pragma once

#include <string>

#include "rms/ast.hpp"

namespace rms {

// Canonical pretty-printer. Output re-parses to the same tree, so two trees
// are structurally equal iff their printed forms are equal.
std::string print_unit(const SourceUnit& unit);
std::string print_block(const Block& block, int indent = 0);
std::string print_stmt_line(const Stmt& stmt);
std::string print_annotation(const Annotation& annot);

}  // namespace rms
