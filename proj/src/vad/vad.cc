// vad/vad.cc
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

#include "mcfd/vad.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "mcfd/common.h"

namespace mcfd {

namespace {

double Logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Linear-interpolation percentile over a copy of the values.
double Percentile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  if (values.size() == 1) return values[0];
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace

FrameVadTrack EnergyVad(const AudioSession& audio,
                        const EnergyVadOptions& opts) {
  audio.Validate();
  if (audio.num_channels() != 1) {
    throw InputError("EnergyVad: expects a single-channel session");
  }
  if (opts.frame_length_ms <= 0.0) {
    throw InputError("EnergyVad: frame_length_ms must be positive");
  }
  const std::vector<float>& x = audio.samples[0];
  const int frame_samples = std::max(
      1, static_cast<int>(
             std::lround(opts.frame_length_ms / 1000.0 * audio.sample_rate)));
  const int num_frames = static_cast<int>(
      (x.size() + static_cast<size_t>(frame_samples) - 1) /
      static_cast<size_t>(frame_samples));

  std::vector<double> energy_db(static_cast<size_t>(num_frames));
  for (int t = 0; t < num_frames; ++t) {
    const size_t begin = static_cast<size_t>(t) * frame_samples;
    const size_t end = std::min(begin + frame_samples, x.size());
    double acc = 0.0;
    for (size_t i = begin; i < end; ++i) {
      acc += static_cast<double>(x[i]) * x[i];
    }
    const double mean_sq = acc / static_cast<double>(end - begin);
    energy_db[static_cast<size_t>(t)] =
        10.0 * std::log10(std::max(mean_sq, 1e-30));
  }

  const double floor_db = Percentile(energy_db, opts.noise_percentile);
  FrameVadTrack track;
  track.frame_length_ms = opts.frame_length_ms;
  track.probs.resize(static_cast<size_t>(num_frames));
  for (int t = 0; t < num_frames; ++t) {
    const double z =
        (energy_db[static_cast<size_t>(t)] - floor_db - opts.onset_snr_db) /
        opts.slope_db;
    track.probs[static_cast<size_t>(t)] = static_cast<float>(Logistic(z));
  }
  return track;
}

std::vector<float> ReadFvad(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(StrCat("ReadFvad: cannot open ", path));
  in.seekg(0, std::ios::end);
  const std::streamoff bytes = in.tellg();
  in.seekg(0, std::ios::beg);
  if (bytes % 4 != 0) {
    throw InputError(StrCat("ReadFvad: ", path, " is not a float32 stream"));
  }
  std::vector<float> probs(static_cast<size_t>(bytes / 4));
  in.read(reinterpret_cast<char*>(probs.data()), bytes);
  if (!in) throw InputError(StrCat("ReadFvad: short read on ", path));
  return probs;
}

void WriteFvad(const std::string& path, const std::vector<float>& probs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(StrCat("WriteFvad: cannot open ", path));
  out.write(reinterpret_cast<const char*>(probs.data()),
            static_cast<std::streamsize>(probs.size() * 4));
  if (!out) throw Error(StrCat("WriteFvad: short write on ", path));
}

FrameVadTrack SidecarVadProvider::Compute(const AudioSession& channel) const {
  channel.Validate();
  if (channel.num_channels() != 1) {
    throw InputError("SidecarVadProvider: expects a single-channel session");
  }
  const std::string name =
      StrCat(session_id_, ".", channel.channel_ids[0], ".fvad");
  const std::string path = dir_.empty() ? name : StrCat(dir_, "/", name);
  FrameVadTrack track;
  track.frame_length_ms = frame_length_ms_;
  track.probs = ReadFvad(path);
  const int frame_samples = std::max(
      1, static_cast<int>(
             std::lround(frame_length_ms_ / 1000.0 * channel.sample_rate)));
  const int expected = static_cast<int>(
      (channel.samples[0].size() + static_cast<size_t>(frame_samples) - 1) /
      static_cast<size_t>(frame_samples));
  if (track.num_frames() != expected) {
    throw InputError(StrCat("SidecarVadProvider: ", path, " holds ",
                            track.num_frames(), " frames, audio needs ",
                            expected));
  }
  for (float p : track.probs) {
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw InputError(StrCat("SidecarVadProvider: ", path,
                              " has probabilities outside [0,1]"));
    }
  }
  return track;
}

FrameVadTrack PoolMultichannelVad(const std::vector<FrameVadTrack>& tracks,
                                  double drop_threshold) {
  if (tracks.empty()) throw InputError("PoolMultichannelVad: no tracks");
  if (drop_threshold < 0.0 || drop_threshold > 0.5) {
    throw InputError("PoolMultichannelVad: drop_threshold must lie in [0,0.5]");
  }
  const int frames = tracks[0].num_frames();
  for (const FrameVadTrack& t : tracks) {
    if (t.num_frames() != frames) {
      throw InputError("PoolMultichannelVad: frame-count mismatch");
    }
  }

  std::vector<double> means(tracks.size(), 0.0);
  for (size_t c = 0; c < tracks.size(); ++c) {
    means[c] = frames == 0
                   ? 0.0
                   : std::accumulate(tracks[c].probs.begin(),
                                     tracks[c].probs.end(), 0.0) /
                         frames;
  }
  const size_t best =
      static_cast<size_t>(std::distance(
          means.begin(), std::max_element(means.begin(), means.end())));
  const double cut = drop_threshold * means[best];

  FrameVadTrack out;
  out.frame_length_ms = tracks[0].frame_length_ms;
  out.probs.assign(static_cast<size_t>(frames), 0.0f);
  for (size_t c = 0; c < tracks.size(); ++c) {
    if (c != best && means[c] < cut) continue;
    for (int t = 0; t < frames; ++t) {
      out.probs[static_cast<size_t>(t)] = std::max(
          out.probs[static_cast<size_t>(t)], tracks[c].probs[t]);
    }
  }
  return out;
}

std::vector<int> MaskFrames(const FrameVadTrack& track, double threshold) {
  if (threshold <= 0.0 || threshold >= 1.0) {
    throw InputError("MaskFrames: threshold must lie in (0,1)");
  }
  std::vector<int> indices;
  for (int t = 0; t < track.num_frames(); ++t) {
    if (track.probs[static_cast<size_t>(t)] >= threshold) indices.push_back(t);
  }
  return indices;
}

std::vector<TimeSpan> TrackToSpans(const FrameVadTrack& track,
                                   double threshold) {
  std::vector<int> indices = MaskFrames(track, threshold);
  std::vector<TimeSpan> spans;
  const double frame_s = track.frame_s();
  for (size_t i = 0; i < indices.size();) {
    size_t j = i;
    while (j + 1 < indices.size() && indices[j + 1] == indices[j] + 1) ++j;
    spans.push_back(TimeSpan{indices[i] * frame_s, (indices[j] + 1) * frame_s});
    i = j + 1;
  }
  return spans;
}

}  // namespace mcfd
