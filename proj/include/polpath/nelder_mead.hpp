#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace polpath {

struct NelderMeadOptions {
  // Stop once (f_worst - f_best) <= relative_tolerance * |f_best|.
  double relative_tolerance = 1e-10;
  int max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Downhill simplex minimization starting from the simplex x0, x0 + steps[i] e_i.
/// Uses the dimension-adaptive coefficients of Gao and Han (reflection 1,
/// expansion 1 + 2/n, contraction 0.75 - 1/(2n), shrink 1 - 1/n), which keep
/// the method effective beyond a handful of dimensions.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options = {});

}  // namespace polpath
