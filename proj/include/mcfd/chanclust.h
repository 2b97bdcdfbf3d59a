// mcfd/chanclust.h
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

#ifndef MCFD_CHANCLUST_H_
#define MCFD_CHANCLUST_H_

#include <cstdint>

#include "mcfd/audio.h"
#include "mcfd/coherence.h"
#include "mcfd/nmesc.h"
#include "mcfd/stft.h"

namespace mcfd {

struct ChannelClusterOptions {
  StftConfig stft;
  double band_low_hz = 300.0;
  double band_high_hz = 3500.0;
  int max_clusters = 8;
  uint64_t seed = 17;
};

struct ChannelClusterResult {
  CoherenceMatrix msc;
  ClusterAssignment assignment;
  AudioSession clustered;  // one averaged stream per cluster
};

// Collapses an M-channel session into K averaged streams. Channels are
// grouped by the coherence they exhibit toward each other: microphones of
// one array cohere strongly, microphones of different arrays barely at all,
// so the band-averaged MSC matrix acts as the clustering affinity.
ChannelClusterResult ClusterChannels(const AudioSession& audio,
                                     const ChannelClusterOptions& opts = {});

// Sample-wise arithmetic mean of the member channels of each cluster.
// Output channel c carries the average of input channels labeled c; ids
// become "cluster0", "cluster1", ...
AudioSession AverageClusterChannels(const AudioSession& audio,
                                    const ClusterAssignment& assignment);

}  // namespace mcfd

#endif  // MCFD_CHANCLUST_H_
