// diarizer/msembed.cc
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

#include <algorithm>
#include <cmath>

#include "mcfd/common.h"
#include "mcfd/diarizer.h"

namespace mcfd {

namespace {

double Pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  Eigen::VectorXd ca = a.array() - ma;
  Eigen::VectorXd cb = b.array() - mb;
  const double denom = ca.norm() * cb.norm();
  if (denom < 1e-12) return 0.0;
  return ca.dot(cb) / denom;
}

}  // namespace

Eigen::MatrixXd InterpolateEmbeddings(const ScaleEmbeddings& emb,
                                      const std::vector<double>& targets) {
  const int n = emb.grid.size();
  if (n == 0) throw InputError("InterpolateEmbeddings: no segments");
  if (emb.vectors.rows() != n) {
    throw InputError("InterpolateEmbeddings: grid/vector row mismatch");
  }
  const std::vector<double>& centers = emb.grid.centers;
  const int dim = static_cast<int>(emb.vectors.cols());

  Eigen::MatrixXd out(static_cast<int>(targets.size()), dim);
  for (size_t q = 0; q < targets.size(); ++q) {
    const double t = targets[q];
    // Left neighbor: last center <= t. Right neighbor: first center > t.
    const auto upper = std::upper_bound(centers.begin(), centers.end(), t);
    if (upper == centers.begin()) {
      out.row(static_cast<int>(q)) = emb.vectors.row(0);  // before the hull
      continue;
    }
    if (upper == centers.end()) {
      out.row(static_cast<int>(q)) = emb.vectors.row(n - 1);  // past the hull
      continue;
    }
    const int right = static_cast<int>(std::distance(centers.begin(), upper));
    const int left = right - 1;
    const double d_l = t - centers[static_cast<size_t>(left)];
    const double d_r = centers[static_cast<size_t>(right)] - t;
    const double norm = std::sqrt(d_l * d_l + d_r * d_r);
    if (norm < 1e-12) {
      out.row(static_cast<int>(q)) = emb.vectors.row(left);
      continue;
    }
    out.row(static_cast<int>(q)) = (d_l / norm) * emb.vectors.row(left) +
                                   (d_r / norm) * emb.vectors.row(right);
  }
  return out;
}

Eigen::VectorXd MultichannelSupervector(
    const std::vector<Eigen::VectorXd>& per_channel) {
  if (per_channel.empty()) {
    throw InputError("MultichannelSupervector: no channels");
  }
  const int m = static_cast<int>(per_channel.size());
  const int dim = static_cast<int>(per_channel[0].size());
  for (const Eigen::VectorXd& v : per_channel) {
    if (static_cast<int>(v.size()) != dim) {
      throw InputError("MultichannelSupervector: dimension mismatch");
    }
  }
  if (m == 1) return per_channel[0];

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const Eigen::VectorXd& v : per_channel) mean += v;
  mean /= m;

  int drop = 0;
  double drop_corr = 2.0;
  for (int c = 0; c < m; ++c) {
    const double corr = Pearson(per_channel[static_cast<size_t>(c)], mean);
    if (corr < drop_corr) {
      drop_corr = corr;
      drop = c;
    }
  }

  Eigen::VectorXd out((m - 1) * dim);
  int at = 0;
  for (int c = 0; c < m; ++c) {
    if (c == drop) continue;
    out.segment(at * dim, dim) = per_channel[static_cast<size_t>(c)];
    ++at;
  }
  const double norm = out.norm();
  if (norm > 1e-12) out /= norm;
  return out;
}

ClusterAssignment InitialClustering(const MultiScaleEmbeddings& emb,
                                    const std::vector<double>& weights,
                                    int max_speakers, uint64_t seed,
                                    Eigen::MatrixXd* affinity_out) {
  if (emb.empty()) throw InputError("InitialClustering: no scales");
  if (weights.size() != emb.size()) {
    throw InputError("InitialClustering: one weight per scale required");
  }
  const ScaleEmbeddings& finest = emb.back();
  const int n = finest.grid.size();
  if (n == 0) throw InputError("InitialClustering: no finest-scale segments");
  if (n == 1) {
    if (affinity_out) *affinity_out = Eigen::MatrixXd::Ones(1, 1);
    return ClusterAssignment{{0}, 1};
  }

  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (weight_sum <= 0.0) {
    throw InputError("InitialClustering: weights must sum to > 0");
  }

  Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(n, n);
  for (size_t k = 0; k < emb.size(); ++k) {
    const ScaleEmbeddings& scale = emb[k];
    if (scale.grid.size() == 0) {
      throw InputError("InitialClustering: empty scale grid");
    }
    // Rows of the finest grid pick up the nearest coarse segment's vector.
    std::vector<int> map = NearestCenter(scale.grid.centers,
                                         finest.grid.centers);
    Eigen::MatrixXd mapped(n, scale.vectors.cols());
    for (int i = 0; i < n; ++i) {
      mapped.row(i) = scale.vectors.row(map[static_cast<size_t>(i)]);
    }
    for (int i = 0; i < n; ++i) {
      const double norm = mapped.row(i).norm();
      if (norm > 1e-12) mapped.row(i) /= norm;
    }
    affinity += weights[k] * (mapped * mapped.transpose());
  }
  affinity /= weight_sum;                       // weighted mean cosine
  affinity = 0.5 * (affinity + affinity.transpose());
  affinity = ((affinity.array() + 1.0) / 2.0)   // [-1,1] -> [0,1]
                 .min(1.0)
                 .max(0.0)
                 .matrix();
  if (affinity_out) *affinity_out = affinity;

  NmescOptions opts;
  opts.max_clusters = std::max(1, max_speakers);
  opts.seed = seed;
  // Large grids sweep a subsampled neighbor-count range; the estimate is
  // insensitive to the exact grid and the full sweep costs one
  // eigendecomposition per candidate.
  const int hi = std::max(2, static_cast<int>(std::ceil(0.5 * n)));
  const int max_candidates = 20;
  if (hi - 1 > max_candidates) {
    for (int i = 0; i < max_candidates; ++i) {
      const double frac = static_cast<double>(i) / (max_candidates - 1);
      opts.p_range.push_back(
          2 + static_cast<int>(std::lround(frac * (hi - 2))));
    }
  }
  return Nmesc(affinity, opts);
}

}  // namespace mcfd
