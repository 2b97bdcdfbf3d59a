// mcfd/nmesc.h
//
// Copyright 2025  The mcfd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MCFD_NMESC_H_
#define MCFD_NMESC_H_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace mcfd {

struct ClusterAssignment {
  std::vector<int> labels;  // in [0, num_clusters), relabeled by first use
  int num_clusters = 0;
};

struct NmescOptions {
  // Candidate per-row neighbor counts. Empty selects the full sweep
  // {2, ..., ceil(N/2)} clamped to [1, N]; callers with large N pass a
  // subsampled range.
  std::vector<int> p_range;
  int max_clusters = 8;
  uint64_t seed = 17;
  int kmeans_restarts = 10;
};

struct NmescInfo {
  int chosen_p = 0;
  double nme_ratio = 0.0;
  std::vector<double> eigengaps;  // gap(K) = lambda_K - lambda_{K-1}, K >= 1
};

// Spectral clustering with automatic cluster-count estimation via the
// normalized maximum eigengap. For every candidate p the affinity is
// binarized to the p largest entries per row (diagonal always kept),
// symmetrized by averaging with its transpose, and turned into a symmetric
// normalized Laplacian; p* minimizes (p/N)/max_eigengap, and K_hat is the
// argmax eigengap at p* (ties broken toward fewer clusters), capped at
// max_clusters. Labels come from seeded k-means on the first K_hat spectral
// embedding coordinates.
ClusterAssignment Nmesc(const Eigen::MatrixXd& affinity,
                        const NmescOptions& opts = {},
                        NmescInfo* info = nullptr);

// Seeded k-means with k-means++ initialization and restart selection by
// inertia; exposed for reuse and direct testing. Rows of `points` are the
// samples. Guarantees every cluster non-empty for k <= rows.
std::vector<int> KMeans(const Eigen::MatrixXd& points, int k, uint64_t seed,
                        int restarts = 10, int max_iters = 100);

}  // namespace mcfd

#endif  // MCFD_NMESC_H_
