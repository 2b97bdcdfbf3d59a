// gssfe/frontend.cc
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
#include <map>
#include <vector>

#include "mcfd/beamform.h"
#include "mcfd/chansel.h"
#include "mcfd/common.h"
#include "mcfd/frontend.h"

namespace mcfd {

namespace {

// Per-frame activity of each speaker inside [slice_begin, slice_end), target
// speaker first, remaining speakers in name order.
std::vector<std::vector<char>> BuildActivity(
    const DiarSegments& segments, const std::string& target,
    double slice_begin, const SpectralTensor& spec) {
  std::map<std::string, std::vector<char>> rows;
  rows[target] = std::vector<char>(static_cast<size_t>(spec.frames), 0);
  for (const DiarSegment& seg : segments) {
    auto [it, inserted] = rows.try_emplace(
        seg.speaker, std::vector<char>(static_cast<size_t>(spec.frames), 0));
    for (int t = 0; t < spec.frames; ++t) {
      // Frames are centered: frame_time_s is the window center.
      const double center = slice_begin + spec.frame_time_s(t);
      if (center >= seg.begin_s && center < seg.end_s) {
        it->second[static_cast<size_t>(t)] = 1;
      }
    }
  }
  std::vector<std::vector<char>> activity;
  activity.push_back(rows.at(target));
  for (auto& [name, row] : rows) {
    if (name == target) continue;
    bool any = false;
    for (char a : row) any = any || a != 0;
    if (any) activity.push_back(std::move(row));
  }
  return activity;
}

AudioSession MonoFallback(const AudioSession& slice, double slice_begin,
                          const UtteranceRequest& request,
                          const FrontendConfig& cfg) {
  FrameVadTrack track = EnergyVad(slice);
  std::vector<float> samples = slice.samples[0];
  const int frame_samples = std::max(
      1, static_cast<int>(std::lround(track.frame_length_ms / 1000.0 *
                                      slice.sample_rate)));
  for (int t = 0; t < track.num_frames(); ++t) {
    if (track.probs[static_cast<size_t>(t)] >= cfg.mono_vad_threshold) {
      continue;
    }
    const size_t begin = static_cast<size_t>(t) * frame_samples;
    const size_t end =
        std::min(begin + static_cast<size_t>(frame_samples), samples.size());
    std::fill(samples.begin() + static_cast<std::ptrdiff_t>(begin),
              samples.begin() + static_cast<std::ptrdiff_t>(end), 0.0f);
  }
  AudioSession out;
  out.samples.push_back(std::move(samples));
  out.sample_rate = slice.sample_rate;
  out.channel_ids.push_back(slice.channel_ids[0]);
  const int64_t b =
      std::llround((request.begin_s - slice_begin) * out.sample_rate);
  const int64_t e =
      std::llround((request.end_s - slice_begin) * out.sample_rate);
  return out.Slice(b, e);
}

}  // namespace

AudioSession ExtractUtterance(const AudioSession& session,
                              const UtteranceRequest& request,
                              const FrontendConfig& cfg) {
  session.Validate();
  if (request.context_s < 0.0) {
    throw InputError("ExtractUtterance: context must be >= 0");
  }
  if (request.begin_s < 0.0 || request.end_s <= request.begin_s ||
      request.end_s > session.duration_s() + 1e-6) {
    throw InputError(StrCat("ExtractUtterance: segment [", request.begin_s,
                            ",", request.end_s, "] outside the session"));
  }
  if (cfg.postmask_min_db > 0.0) {
    throw InputError("ExtractUtterance: postmask_min_db must be <= 0");
  }

  const double slice_begin =
      std::max(0.0, request.begin_s - request.context_s);
  const double slice_end =
      std::min(session.duration_s(), request.end_s + request.context_s);
  AudioSession slice =
      session.Slice(std::llround(slice_begin * session.sample_rate),
                    std::llround(slice_end * session.sample_rate));

  ChannelRanking ranking =
      EnvelopeVarianceRank(slice, cfg.channel_fraction);
  AudioSession picked = SelectChannels(slice, ranking.selected);

  if (picked.num_channels() == 1) {
    return MonoFallback(picked, slice_begin, request, cfg);
  }

  WpeConfig wpe = cfg.wpe;
  wpe.num_workers = cfg.num_workers;
  AudioSession dereverbed = WpeDereverberate(picked, wpe);

  SpectralTensor spec = Stft(dereverbed, cfg.stft);
  std::vector<std::vector<char>> activity =
      BuildActivity(request.all_segments, request.speaker, slice_begin, spec);

  GssOptions gss = cfg.gss;
  gss.num_workers = cfg.num_workers;
  TfMaskSet masks = GssMasks(spec, activity, gss);

  MvdrResult mvdr = MvdrExtract(spec, masks);
  ApplyPostmask(mvdr.output, mvdr.target_mask, cfg.postmask_min_db);

  AudioSession enhanced = Istft(mvdr.output);
  const int64_t b =
      std::llround((request.begin_s - slice_begin) * enhanced.sample_rate);
  const int64_t e =
      std::llround((request.end_s - slice_begin) * enhanced.sample_rate);
  AudioSession out = enhanced.Slice(b, e);
  out.channel_ids[0] = "gss";
  return out;
}

std::string UtteranceFileName(const std::string& session_id,
                              const std::string& speaker, double begin_s,
                              double end_s) {
  return StrCat(session_id, "-", speaker, "-", std::llround(begin_s * 1000.0),
                "-", std::llround(end_s * 1000.0), ".wav");
}

}  // namespace mcfd
