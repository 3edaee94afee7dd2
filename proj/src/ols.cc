#include "oatlas/ols.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "oatlas/errors.h"

namespace oatlas {

double NormalTwoSidedP(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

OlsFit FitOls(const Eigen::MatrixXd &design, const Eigen::VectorXd &outcome,
              std::span<const uint64_t> clusters,
              std::vector<std::string> terms) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  if (outcome.size() != n || static_cast<Eigen::Index>(clusters.size()) != n ||
      static_cast<Eigen::Index>(terms.size()) != k) {
    throw std::invalid_argument("OLS inputs disagree in shape");
  }
  if (n < k || k == 0) {
    throw ModelError("OLS needs at least as many observations as terms");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  // Scale-aware rank threshold.
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    std::string names;
    const auto &perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      if (!names.empty()) names += ", ";
      names += terms[perm[i]];
    }
    throw ModelError("rank-deficient design; collinear terms: " + names);
  }

  OlsFit fit;
  fit.terms = std::move(terms);
  fit.n_observations = static_cast<size_t>(n);
  fit.coefficients = qr.solve(outcome);
  fit.residuals = outcome - design * fit.coefficients;

  // (X'X)^-1 = P R^-1 R^-T P'
  Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd bread_permuted = r_inv * r_inv.transpose();
  Eigen::MatrixXd bread = qr.colsPermutation() * bread_permuted *
                          qr.colsPermutation().transpose();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double rss = fit.residuals.squaredNorm();
  fit.residual_variance = n > k ? rss / static_cast<double>(n - k) : nan;
  fit.se_classical = (bread.diagonal() * fit.residual_variance).cwiseSqrt();

  std::unordered_map<uint64_t, Eigen::Index> cluster_index;
  for (uint64_t c : clusters) {
    cluster_index.emplace(c, static_cast<Eigen::Index>(cluster_index.size()));
  }
  const Eigen::Index g = static_cast<Eigen::Index>(cluster_index.size());
  fit.n_clusters = static_cast<size_t>(g);
  if (g < 2 || n <= k) {
    fit.se_clustered = Eigen::VectorXd::Constant(k, nan);
    return fit;
  }
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(g, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    scores.row(cluster_index[clusters[i]]) += fit.residuals[i] * design.row(i);
  }
  Eigen::MatrixXd meat = scores.transpose() * scores;
  double correction = static_cast<double>(g) / static_cast<double>(g - 1) *
                      static_cast<double>(n - 1) / static_cast<double>(n - k);
  Eigen::MatrixXd v = correction * bread * meat * bread;
  fit.se_clustered = v.diagonal().cwiseMax(0.0).cwiseSqrt();
  return fit;
}

}  // namespace oatlas
