// mcfd/wpe.h
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

#ifndef MCFD_WPE_H_
#define MCFD_WPE_H_

#include "mcfd/audio.h"
#include "mcfd/stft.h"

namespace mcfd {

struct WpeConfig {
  double block_length_s = 40.0;
  double block_overlap_s = 2.0;
  double window_length_ms = 64.0;
  double overlap_fraction = 0.75;  // hop = window * (1 - overlap_fraction)
  int filter_taps = 10;
  int prediction_delay = 3;  // STFT frames between prediction window and now
  int iterations = 10;       // 0 returns the input untouched
  int num_workers = 0;       // 0 = hardware concurrency
};

// Multi-channel linear-prediction dereverberation. The session is processed
// in long blocks stitched with a linear cross-fade over the overlap; inside a
// block every frequency bin independently iterates power estimation, a
// regularized normal-equation solve for the prediction filter, and late
// reverberation subtraction. Output channel count and length match the input.
AudioSession WpeDereverberate(const AudioSession& audio,
                              const WpeConfig& cfg = {});

// Single-block WPE on an STFT tensor, in place. Exposed for block-level
// testing; WpeDereverberate drives it across blocks.
void WpeProcessFrames(SpectralTensor& spec, int frame_begin, int frame_end,
                      const WpeConfig& cfg);

}  // namespace mcfd

#endif  // MCFD_WPE_H_
