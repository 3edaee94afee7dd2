#ifndef OATLAS_OLS_H_
#define OATLAS_OLS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oatlas {

struct OlsFit {
  std::vector<std::string> terms;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd se_classical;
  // Cluster-robust (CR1: G/(G-1) * (N-1)/(N-K) small-sample factor). NaN
  // with fewer than two clusters.
  Eigen::VectorXd se_clustered;
  Eigen::VectorXd residuals;
  // RSS / (N - K); NaN when N == K.
  double residual_variance = 0.0;
  size_t n_observations = 0;
  size_t n_clusters = 0;
};

// Least squares via column-pivoted QR. `clusters` holds one cluster id per
// row. Throws ModelError naming the dropped terms when the design is rank
// deficient, and std::invalid_argument on shape mismatches.
OlsFit FitOls(const Eigen::MatrixXd &design, const Eigen::VectorXd &outcome,
              std::span<const uint64_t> clusters,
              std::vector<std::string> terms);

// Two-sided p-value of a z statistic under the standard normal.
double NormalTwoSidedP(double z);

}  // namespace oatlas

#endif  // OATLAS_OLS_H_
