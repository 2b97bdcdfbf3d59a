// mcfd/audio.h
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

#ifndef MCFD_AUDIO_H_
#define MCFD_AUDIO_H_

#include <string>
#include <vector>

namespace mcfd {

// Multi-channel audio, one float vector per channel, all the same length.
struct AudioSession {
  std::vector<std::vector<float>> samples;
  int sample_rate = 0;
  std::vector<std::string> channel_ids;

  int num_channels() const { return static_cast<int>(samples.size()); }
  std::size_t num_samples() const {
    return samples.empty() ? 0 : samples[0].size();
  }
  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(num_samples()) / sample_rate
               : 0.0;
  }

  // Throws InputError when channel lengths disagree, there are no channels,
  // or the sample rate is not positive.
  void Validate() const;

  // Copy of sample range [begin, end), clamped to the session bounds.
  AudioSession Slice(std::size_t begin, std::size_t end) const;

  // Single-channel view-copy of channel c, keeping its id.
  AudioSession Channel(int c) const;
};

// Convenience constructor; generates channel ids "ch0", "ch1", ... when none
// are supplied.
AudioSession MakeSession(std::vector<std::vector<float>> samples,
                         int sample_rate,
                         std::vector<std::string> channel_ids = {});

}  // namespace mcfd

#endif  // MCFD_AUDIO_H_
