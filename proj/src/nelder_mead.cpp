#include "polpath/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace polpath {

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0, std::span<const double> steps,
                             const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || steps.size() != n) throw std::invalid_argument("nelder_mead: bad dimensions");

  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  int evaluations = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), second(n);
  auto point_along = [&](double coeff, const std::vector<double>& from, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + coeff * (from[i] - centroid[i]);
  };

  bool converged = false;
  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[n - 1];

    const double spread = values[worst] - values[best];
    if (spread <= options.relative_tolerance * std::abs(values[best]) + std::numeric_limits<double>::min()) {
      converged = true;
      break;
    }
    if (evaluations >= options.max_evaluations) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i];
    }
    for (auto& c : centroid) c /= dn;

    point_along(-reflect, simplex[worst], trial);
    const double f_reflect = eval(trial);

    if (f_reflect < values[best]) {
      point_along(-reflect * expand, simplex[worst], second);
      const double f_expand = eval(second);
      if (f_expand < f_reflect) {
        simplex[worst] = second;
        values[worst] = f_expand;
      } else {
        simplex[worst] = trial;
        values[worst] = f_reflect;
      }
      continue;
    }
    if (f_reflect < values[second_worst]) {
      simplex[worst] = trial;
      values[worst] = f_reflect;
      continue;
    }

    const bool outside = f_reflect < values[worst];
    point_along(outside ? -reflect * contract : contract, simplex[worst], second);
    const double f_contract = eval(second);
    if (f_contract < (outside ? f_reflect : values[worst])) {
      simplex[worst] = second;
      values[worst] = f_contract;
      continue;
    }

    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < n; ++i) simplex[k][i] = simplex[best][i] + shrink * (simplex[k][i] - simplex[best][i]);
      values[k] = eval(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evaluations, converged};
}

}  // namespace polpath
