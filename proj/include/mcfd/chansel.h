// mcfd/chansel.h
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

#ifndef MCFD_CHANSEL_H_
#define MCFD_CHANSEL_H_

#include <vector>

#include "mcfd/audio.h"
#include "mcfd/melbank.h"

namespace mcfd {

struct ChannelRanking {
  std::vector<double> scores;  // per input channel
  std::vector<int> ranked;     // channel indices, best first, stable ties
  std::vector<int> selected;   // top ceil(rho * M) of `ranked`, ascending
};

// Ranks channels by envelope variance: per mel band, the variance of the
// log temporal envelope normalized by its squared dynamic range, averaged
// over bands. Reverberation smears envelopes flat, so higher variance marks
// the cleaner channel. rho in (0,1] selects the kept fraction.
ChannelRanking EnvelopeVarianceRank(const AudioSession& audio,
                                    double rho = 0.8,
                                    const MelSpectrogramConfig& cfg = {});

// Convenience: the session reduced to ranking.selected (original order kept).
AudioSession SelectChannels(const AudioSession& audio,
                            const std::vector<int>& keep);

}  // namespace mcfd

#endif  // MCFD_CHANSEL_H_
