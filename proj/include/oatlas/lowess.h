#ifndef OATLAS_LOWESS_H_
#define OATLAS_LOWESS_H_

#include <span>
#include <vector>

namespace oatlas {

struct LowessOptions {
  // Fraction of points in each local neighborhood.
  double bandwidth = 0.67;
  int robustness_iterations = 2;
};

// Locally weighted linear regression (Cleveland's LOWESS). Each point is
// fitted from its ceil(bandwidth * n) nearest neighbours (at least two) with
// tricube distance weights, then refitted `robustness_iterations` times with
// bisquare weights on the residuals scaled by six median absolute residuals.
// A neighbourhood with no spread in x falls back to its weighted mean.
//
// Returns fitted values in input order. Throws std::invalid_argument for
// fewer than 3 points, mismatched lengths or bandwidth outside (0, 1].
std::vector<double> Lowess(std::span<const double> x, std::span<const double> y,
                           const LowessOptions &options = {});

}  // namespace oatlas

#endif  // OATLAS_LOWESS_H_
