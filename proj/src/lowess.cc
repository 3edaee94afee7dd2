#include "oatlas/lowess.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oatlas {
namespace {

double Median(std::vector<double> v) {
  size_t n = v.size();
  auto mid = v.begin() + n / 2;
  std::nth_element(v.begin(), mid, v.end());
  double upper = *mid;
  if (n % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double Tricube(double u) {
  if (u >= 1.0) return 0.0;
  double t = 1.0 - u * u * u;
  return t * t * t;
}

double Bisquare(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  double t = 1.0 - u * u;
  return t * t;
}

}  // namespace

std::vector<double> Lowess(std::span<const double> x, std::span<const double> y,
                           const LowessOptions &options) {
  const size_t n = x.size();
  if (y.size() != n) throw std::invalid_argument("lowess: x and y differ in length");
  if (n < 3) throw std::invalid_argument("lowess: need at least 3 points");
  if (!(options.bandwidth > 0.0 && options.bandwidth <= 1.0)) {
    throw std::invalid_argument("lowess: bandwidth must be in (0, 1]");
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  // The epsilon keeps e.g. 0.67 * 100 from rounding up to 68.
  size_t q = static_cast<size_t>(std::ceil(options.bandwidth * n - 1e-9));
  q = std::clamp<size_t>(q, 2, n);
  const double x_range = xs.back() - xs.front();
  const double y_range = *std::max_element(ys.begin(), ys.end()) -
                         *std::min_element(ys.begin(), ys.end());

  std::vector<double> fitted(n, 0.0), robust(n, 1.0), residual(n), weight(n);
  for (int iteration = 0; iteration <= options.robustness_iterations;
       ++iteration) {
    size_t lo = 0;
    for (size_t i = 0; i < n; ++i) {
      // Slide the q-point window while the next point on the right is closer
      // than the leftmost one.
      while (lo + q < n && xs[lo + q] - xs[i] < xs[i] - xs[lo]) ++lo;
      const size_t hi = lo + q;  // exclusive
      const double d_max = std::max(xs[i] - xs[lo], xs[hi - 1] - xs[i]);

      double sw = 0.0, sx = 0.0, sy = 0.0;
      for (size_t j = lo; j < hi; ++j) {
        double w = robust[j] *
                   (d_max > 0.0 ? Tricube(std::abs(xs[j] - xs[i]) / d_max) : 1.0);
        weight[j] = w;
        sw += w;
        sx += w * xs[j];
        sy += w * ys[j];
      }
      if (sw <= 0.0) {
        if (iteration == 0) fitted[i] = ys[i];
        continue;
      }
      const double x_bar = sx / sw;
      const double y_bar = sy / sw;
      double sxx = 0.0, sxy = 0.0;
      for (size_t j = lo; j < hi; ++j) {
        double dx = xs[j] - x_bar;
        sxx += weight[j] * dx * dx;
        sxy += weight[j] * dx * (ys[j] - y_bar);
      }
      if (std::sqrt(sxx / sw) <= 1e-7 * x_range) {
        fitted[i] = y_bar;
      } else {
        fitted[i] = y_bar + sxy / sxx * (xs[i] - x_bar);
      }
    }
    if (iteration == options.robustness_iterations) break;

    std::vector<double> abs_residual(n);
    for (size_t i = 0; i < n; ++i) {
      residual[i] = ys[i] - fitted[i];
      abs_residual[i] = std::abs(residual[i]);
    }
    const double scale = Median(abs_residual);
    if (scale <= 1e-12 * y_range || scale == 0.0) break;
    for (size_t i = 0; i < n; ++i) robust[i] = Bisquare(residual[i] / (6.0 * scale));
  }

  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[order[i]] = fitted[i];
  return out;
}

}  // namespace oatlas
