// chanclust/chanclust.cc
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

#include "mcfd/chanclust.h"

#include <string>
#include <vector>

#include "mcfd/common.h"
#include "mcfd/cross_psd.h"

namespace mcfd {

AudioSession AverageClusterChannels(const AudioSession& audio,
                                    const ClusterAssignment& assignment) {
  audio.Validate();
  const int m = audio.num_channels();
  if (static_cast<int>(assignment.labels.size()) != m) {
    throw InputError(StrCat("AverageClusterChannels: ", assignment.labels.size(),
                            " labels for ", m, " channels"));
  }
  const int k = assignment.num_clusters;
  if (k <= 0) throw InputError("AverageClusterChannels: no clusters");
  const size_t n = static_cast<size_t>(audio.num_samples());

  std::vector<std::vector<float>> out(static_cast<size_t>(k),
                                      std::vector<float>(n, 0.0f));
  std::vector<int> counts(static_cast<size_t>(k), 0);
  std::vector<std::vector<double>> acc(static_cast<size_t>(k),
                                       std::vector<double>(n, 0.0));
  for (int c = 0; c < m; ++c) {
    int label = assignment.labels[static_cast<size_t>(c)];
    if (label < 0 || label >= k) {
      throw InputError(StrCat("AverageClusterChannels: label ", label,
                              " outside [0,", k, ")"));
    }
    const std::vector<float>& src = audio.samples[static_cast<size_t>(c)];
    std::vector<double>& dst = acc[static_cast<size_t>(label)];
    for (size_t i = 0; i < n; ++i) dst[i] += src[i];
    ++counts[static_cast<size_t>(label)];
  }
  std::vector<std::string> ids;
  for (int c = 0; c < k; ++c) {
    if (counts[static_cast<size_t>(c)] == 0) {
      throw InputError(StrCat("AverageClusterChannels: cluster ", c, " empty"));
    }
    const double inv = 1.0 / counts[static_cast<size_t>(c)];
    for (size_t i = 0; i < n; ++i) {
      out[static_cast<size_t>(c)][i] =
          static_cast<float>(acc[static_cast<size_t>(c)][i] * inv);
    }
    ids.push_back(StrCat("cluster", c));
  }
  return MakeSession(std::move(out), audio.sample_rate, std::move(ids));
}

ChannelClusterResult ClusterChannels(const AudioSession& audio,
                                     const ChannelClusterOptions& opts) {
  audio.Validate();
  const int m = audio.num_channels();

  ChannelClusterResult result;
  if (m == 1) {
    result.msc.gamma_bar = Eigen::MatrixXd::Ones(1, 1);
    result.msc.band_low_hz = opts.band_low_hz;
    result.msc.band_high_hz = opts.band_high_hz;
    result.assignment = ClusterAssignment{{0}, 1};
    result.clustered = AverageClusterChannels(audio, result.assignment);
    return result;
  }

  SpectralTensor spec = Stft(audio, opts.stft);
  result.msc = ComputeMsc(spec, opts.band_low_hz, opts.band_high_hz);

  NmescOptions nm;
  nm.max_clusters = std::min(opts.max_clusters, m);
  nm.seed = opts.seed;
  // Arrays can be as small as two microphones; such a pair has exactly one
  // strong neighbor per row, so the sweep must offer p = 1 or the pair is
  // forced to borrow a cross-array edge and gets absorbed.
  for (int p = 1; p <= std::max(2, (m + 1) / 2); ++p) nm.p_range.push_back(p);
  result.assignment = Nmesc(result.msc.gamma_bar, nm);
  result.clustered = AverageClusterChannels(audio, result.assignment);
  return result;
}

}  // namespace mcfd
