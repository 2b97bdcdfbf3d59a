// gssfe/chansel.cc
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

#include "mcfd/chansel.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcfd/common.h"

namespace mcfd {

ChannelRanking EnvelopeVarianceRank(const AudioSession& audio, double rho,
                                    const MelSpectrogramConfig& cfg) {
  audio.Validate();
  if (rho <= 0.0 || rho > 1.0) {
    throw InputError("EnvelopeVarianceRank: rho must lie in (0,1]");
  }
  const int m = audio.num_channels();

  ChannelRanking ranking;
  ranking.scores.resize(static_cast<size_t>(m), 0.0);
  for (int c = 0; c < m; ++c) {
    AudioSession one;
    one.samples.push_back(audio.samples[static_cast<size_t>(c)]);
    one.sample_rate = audio.sample_rate;
    one.channel_ids.push_back(audio.channel_ids[static_cast<size_t>(c)]);
    Eigen::MatrixXd mel = LogMelSpectrogram(one, cfg);

    double score = 0.0;
    int used = 0;
    for (int b = 0; b < mel.rows(); ++b) {
      const double mean = mel.row(b).mean();
      const double var =
          (mel.row(b).array() - mean).square().sum() / mel.cols();
      const double range =
          mel.row(b).maxCoeff() - mel.row(b).minCoeff();
      if (range < 1e-12) continue;  // flat band carries no evidence
      score += var / (range * range);
      ++used;
    }
    ranking.scores[static_cast<size_t>(c)] = used > 0 ? score / used : 0.0;
  }

  ranking.ranked.resize(static_cast<size_t>(m));
  std::iota(ranking.ranked.begin(), ranking.ranked.end(), 0);
  std::stable_sort(ranking.ranked.begin(), ranking.ranked.end(),
                   [&](int a, int b) {
                     return ranking.scores[static_cast<size_t>(a)] >
                            ranking.scores[static_cast<size_t>(b)];
                   });

  const int keep = std::max(1, static_cast<int>(std::ceil(rho * m)));
  ranking.selected.assign(ranking.ranked.begin(),
                          ranking.ranked.begin() + std::min(keep, m));
  std::sort(ranking.selected.begin(), ranking.selected.end());
  return ranking;
}

AudioSession SelectChannels(const AudioSession& audio,
                            const std::vector<int>& keep) {
  audio.Validate();
  if (keep.empty()) throw InputError("SelectChannels: empty selection");
  AudioSession out;
  out.sample_rate = audio.sample_rate;
  for (int c : keep) {
    if (c < 0 || c >= audio.num_channels()) {
      throw InputError(StrCat("SelectChannels: channel ", c, " out of range"));
    }
    out.samples.push_back(audio.samples[static_cast<size_t>(c)]);
    out.channel_ids.push_back(audio.channel_ids[static_cast<size_t>(c)]);
  }
  return out;
}

}  // namespace mcfd
