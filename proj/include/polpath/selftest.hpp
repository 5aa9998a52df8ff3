#pragma once

#include <functional>
#include <string>
#include <vector>

#include "polpath/stokes.hpp"

namespace polpath {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest observed deviation
  double tolerance = 0.0;
};

struct SelftestOptions {
  std::size_t states = 200;
  // Reconstruction under test; the CLI can swap in a deliberately broken one
  // to confirm the suite fails.
  std::function<DensityMatrix(const StokesSet&)> reconstructor = reconstruct;
};

/// Exact algebraic identities of the bench, evaluated end to end.
std::vector<SelftestCheck> run_selftest(const SelftestOptions& options = {});

}  // namespace polpath
