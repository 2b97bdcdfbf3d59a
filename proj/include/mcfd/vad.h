// mcfd/vad.h
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

#ifndef MCFD_VAD_H_
#define MCFD_VAD_H_

#include <memory>
#include <string>
#include <vector>

#include "mcfd/audio.h"

namespace mcfd {

// Half-open speech interval in seconds.
struct TimeSpan {
  double begin_s = 0.0;
  double end_s = 0.0;
  double duration() const { return end_s - begin_s; }
};

struct FrameVadTrack {
  std::vector<float> probs;  // one speech probability per frame, in [0,1]
  double frame_length_ms = 20.0;

  int num_frames() const { return static_cast<int>(probs.size()); }
  double frame_s() const { return frame_length_ms / 1000.0; }
};

// Maps one channel to a frame-probability track. Implementations must be
// deterministic for a fixed input and configuration.
class VadProvider {
 public:
  virtual ~VadProvider() = default;
  virtual FrameVadTrack Compute(const AudioSession& channel) const = 0;
};

struct EnergyVadOptions {
  double frame_length_ms = 20.0;
  double noise_percentile = 10.0;  // frame-energy percentile taken as floor
  double onset_snr_db = 6.0;       // margin above the floor mapping to 0.5
  double slope_db = 3.0;           // logistic slope; 6 dB margin gives ~0.88
};

// Baseline energy detector: per-frame log energy against a percentile noise
// floor, squashed through a logistic. prob = logistic((E_db - floor_db -
// onset_snr_db) / slope_db). Frame count is ceil(duration / frame_length).
FrameVadTrack EnergyVad(const AudioSession& audio,
                        const EnergyVadOptions& opts = {});

class EnergyVadProvider : public VadProvider {
 public:
  explicit EnergyVadProvider(const EnergyVadOptions& opts = {})
      : opts_(opts) {}
  FrameVadTrack Compute(const AudioSession& channel) const override {
    return EnergyVad(channel, opts_);
  }

 private:
  EnergyVadOptions opts_;
};

// Reads per-frame probabilities precomputed by an external detector from
// "<dir>/<session>.<channel>.fvad" (little-endian float32, one per frame).
// The frame count must match ceil(duration / frame_length) of the audio.
class SidecarVadProvider : public VadProvider {
 public:
  SidecarVadProvider(std::string dir, std::string session_id,
                     double frame_length_ms = 20.0)
      : dir_(std::move(dir)),
        session_id_(std::move(session_id)),
        frame_length_ms_(frame_length_ms) {}
  FrameVadTrack Compute(const AudioSession& channel) const override;

 private:
  std::string dir_;
  std::string session_id_;
  double frame_length_ms_;
};

std::vector<float> ReadFvad(const std::string& path);
void WriteFvad(const std::string& path, const std::vector<float>& probs);

// Drops channels whose mean probability falls below drop_threshold times the
// best channel's mean (the best channel always survives), then takes the
// frame-wise maximum over the survivors. drop_threshold lies in [0, 0.5].
FrameVadTrack PoolMultichannelVad(const std::vector<FrameVadTrack>& tracks,
                                  double drop_threshold);

// Indices of frames with prob >= threshold; threshold in (0,1).
std::vector<int> MaskFrames(const FrameVadTrack& track, double threshold);

// Contiguous frames at or above the threshold merged into time spans.
std::vector<TimeSpan> TrackToSpans(const FrameVadTrack& track,
                                   double threshold);

}  // namespace mcfd

#endif  // MCFD_VAD_H_
