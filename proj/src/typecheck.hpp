#pragma once

#include "ast.hpp"
#include "span.hpp"

#include <vector>

namespace mw {

struct TypecheckConfig {
  // Program literals must fit the configured machine-int range.
  Value min_int = -(1LL << 31);
  Value max_int = (1LL << 31) - 1;
};

// Collects every problem instead of stopping at the first; the result is
// sorted by source position and is independent of method order.
std::vector<Diagnostic> typecheck(const Program& p, const TypecheckConfig& cfg = {});

}  // namespace mw
