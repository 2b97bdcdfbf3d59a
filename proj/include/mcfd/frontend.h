// mcfd/frontend.h
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

#ifndef MCFD_FRONTEND_H_
#define MCFD_FRONTEND_H_

#include <cstdint>
#include <string>

#include "mcfd/audio.h"
#include "mcfd/gss.h"
#include "mcfd/rttm.h"
#include "mcfd/stft.h"
#include "mcfd/vad.h"
#include "mcfd/wpe.h"

namespace mcfd {

struct UtteranceRequest {
  double begin_s = 0.0;
  double end_s = 0.0;
  std::string speaker;
  double context_s = 5.0;      // audio kept on each side while separating
  DiarSegments all_segments;   // every speaker's segments, for guiding
};

struct FrontendConfig {
  double channel_fraction = 0.8;  // envelope-variance keep ratio rho
  WpeConfig wpe;                  // lighter per-utterance defaults below
  StftConfig stft;                // separation/beamforming resolution
  GssOptions gss;
  double postmask_min_db = -12.0;  // floor of the output mask, <= 0
  double mono_vad_threshold = 0.5;  // single-channel fallback masking
  int num_workers = 0;

  FrontendConfig() {
    // Per-utterance windows are short; three iterations with a two-frame
    // delay recover most of the tail at a fraction of the session-level cost.
    wpe.filter_taps = 10;
    wpe.prediction_delay = 2;
    wpe.iterations = 3;
  }
};

// Cuts the target segment plus context out of the session, then runs
// channel selection, dereverberation, guided mask estimation, distortionless
// extraction with automatic reference choice, floor-limited post-masking,
// and resynthesis trimmed back to the bare segment. Single-channel sessions
// skip separation: the lone channel is VAD-masked and trimmed instead.
AudioSession ExtractUtterance(const AudioSession& session,
                              const UtteranceRequest& request,
                              const FrontendConfig& cfg = {});

// Output naming used by the batch front-end:
// "<session>-<speaker>-<start_ms>-<end_ms>.wav".
std::string UtteranceFileName(const std::string& session_id,
                              const std::string& speaker, double begin_s,
                              double end_s);

}  // namespace mcfd

#endif  // MCFD_FRONTEND_H_
