// diarizer/presence.cc
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
#include <cstdint>
#include <fstream>
#include <map>

#include "mcfd/common.h"
#include "mcfd/diarizer.h"

namespace mcfd {

namespace {

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Per-speaker mean embedding over segments whose (mapped) label matches and
// whose center falls inside [center - half, center + half]. counts reports
// how many segments contributed per speaker.
Eigen::MatrixXd WindowMeans(const ScaleEmbeddings& scale,
                            const std::vector<int>& scale_labels,
                            int num_speakers, double center_s, double half,
                            std::vector<int>* counts) {
  const int dim = static_cast<int>(scale.vectors.cols());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(dim, num_speakers);
  counts->assign(static_cast<size_t>(num_speakers), 0);
  for (int i = 0; i < scale.grid.size(); ++i) {
    const double c = scale.grid.centers[static_cast<size_t>(i)];
    if (std::abs(c - center_s) > half) continue;
    const int s = scale_labels[static_cast<size_t>(i)];
    mean.col(s) += scale.vectors.row(i).transpose();
    ++(*counts)[static_cast<size_t>(s)];
  }
  for (int s = 0; s < num_speakers; ++s) {
    if ((*counts)[static_cast<size_t>(s)] > 0) {
      mean.col(s) /= (*counts)[static_cast<size_t>(s)];
    }
  }
  return mean;
}

}  // namespace

Eigen::MatrixXd MixProfiles(const Eigen::MatrixXd& local,
                            const Eigen::MatrixXd& global_avg, double alpha) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw InputError("MixProfiles: alpha must lie in [0,1]");
  }
  if (local.rows() != global_avg.rows() || local.cols() != global_avg.cols()) {
    throw InputError("MixProfiles: shape mismatch");
  }
  return alpha * local + (1.0 - alpha) * global_avg;
}

SpeakerProfiles ComputeSpeakerProfiles(const MultiScaleEmbeddings& emb,
                                       const std::vector<int>& finest_labels,
                                       int num_speakers, double center_s,
                                       double alpha, double t_g, double t_l) {
  if (emb.empty()) throw InputError("ComputeSpeakerProfiles: no scales");
  if (num_speakers < 1) {
    throw InputError("ComputeSpeakerProfiles: need at least one speaker");
  }
  if (t_g < t_l) {
    throw InputError("ComputeSpeakerProfiles: t_g must be >= t_l");
  }
  const ScaleEmbeddings& finest = emb.back();
  if (static_cast<int>(finest_labels.size()) != finest.grid.size()) {
    throw InputError("ComputeSpeakerProfiles: one label per finest segment");
  }
  if (finest_labels.empty()) {
    throw InputError("ComputeSpeakerProfiles: no labeled segments");
  }

  SpeakerProfiles profiles;
  profiles.num_speakers = num_speakers;
  profiles.active.assign(static_cast<size_t>(num_speakers), false);
  profiles.scales.resize(emb.size());

  for (size_t k = 0; k < emb.size(); ++k) {
    const ScaleEmbeddings& scale = emb[k];
    // Coarse segments inherit the label of the nearest finest segment.
    std::vector<int> map = NearestCenter(finest.grid.centers,
                                         scale.grid.centers);
    std::vector<int> scale_labels(static_cast<size_t>(scale.grid.size()));
    for (int i = 0; i < scale.grid.size(); ++i) {
      scale_labels[static_cast<size_t>(i)] =
          finest_labels[static_cast<size_t>(map[static_cast<size_t>(i)])];
    }

    std::vector<int> local_counts, global_counts;
    Eigen::MatrixXd local = WindowMeans(scale, scale_labels, num_speakers,
                                        center_s, t_l / 2.0, &local_counts);
    Eigen::MatrixXd global_avg =
        WindowMeans(scale, scale_labels, num_speakers, center_s, t_g / 2.0,
                    &global_counts);
    for (int s = 0; s < num_speakers; ++s) {
      if (local_counts[static_cast<size_t>(s)] == 0) {
        local.col(s) = global_avg.col(s);  // local window missed the speaker
      }
      if (global_counts[static_cast<size_t>(s)] > 0) {
        profiles.active[static_cast<size_t>(s)] = true;
      }
    }
    Eigen::MatrixXd mixed = MixProfiles(local, global_avg, alpha);
    for (int s = 0; s < num_speakers; ++s) {
      const double norm = mixed.col(s).norm();
      if (norm > 1e-12) mixed.col(s) /= norm;
    }
    profiles.scales[k] = std::move(mixed);
  }
  return profiles;
}

Eigen::MatrixXd PresenceScores(const MultiScaleEmbeddings& emb,
                               const std::vector<int>& finest_labels,
                               int num_speakers,
                               const std::vector<double>& weights,
                               const std::vector<double>& frame_centers,
                               const std::vector<char>& frame_speech,
                               const PresenceOptions& opts) {
  if (emb.empty()) throw InputError("PresenceScores: no scales");
  if (weights.size() != emb.size()) {
    throw InputError("PresenceScores: one weight per scale required");
  }
  if (frame_centers.size() != frame_speech.size()) {
    throw InputError("PresenceScores: frame metadata length mismatch");
  }
  if (opts.window_s <= 0.0 || opts.hop_s <= 0.0) {
    throw InputError("PresenceScores: window_s and hop_s must be > 0");
  }
  const int frames = static_cast<int>(frame_centers.size());
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(num_speakers, frames);
  if (frames == 0 || num_speakers == 0) return scores;

  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (weight_sum <= 0.0) {
    throw InputError("PresenceScores: weights must sum to > 0");
  }

  // Align every scale onto the frame grid once; scoring inside a window is
  // then one GEMM per scale against the window's profiles. Coarse scales
  // take the nearest segment's embedding; only the finest scale is
  // interpolated, then re-normalized before cosine scoring.
  std::vector<Eigen::MatrixXd> frame_emb(emb.size());
  for (size_t k = 0; k < emb.size(); ++k) {
    if (k + 1 < emb.size()) {
      std::vector<int> map = NearestCenter(emb[k].grid.centers, frame_centers);
      Eigen::MatrixXd rows(frames, emb[k].vectors.cols());
      for (int i = 0; i < frames; ++i) {
        rows.row(i) = emb[k].vectors.row(map[static_cast<size_t>(i)]);
      }
      frame_emb[k] = std::move(rows);
    } else {
      Eigen::MatrixXd interp = InterpolateEmbeddings(emb[k], frame_centers);
      for (int i = 0; i < interp.rows(); ++i) {
        const double norm = interp.row(i).norm();
        if (norm > 1e-12) interp.row(i) /= norm;
      }
      frame_emb[k] = std::move(interp);
    }
  }

  const double session_end = frame_centers.back() + 1e-9;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(num_speakers, frames);
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(frames);
  for (double start = 0.0; start < session_end; start += opts.hop_s) {
    const double end = std::min(start + opts.window_s, session_end);
    int lo = frames, hi = 0;
    for (int i = 0; i < frames; ++i) {
      if (frame_centers[static_cast<size_t>(i)] >= start &&
          frame_centers[static_cast<size_t>(i)] < end) {
        lo = std::min(lo, i);
        hi = std::max(hi, i + 1);
      }
    }
    if (lo >= hi) continue;
    const double window_center = 0.5 * (start + end);
    SpeakerProfiles profiles = ComputeSpeakerProfiles(
        emb, finest_labels, num_speakers, window_center, opts.alpha,
        opts.global_window_s, opts.window_s);

    Eigen::MatrixXd wcos =
        Eigen::MatrixXd::Zero(hi - lo, num_speakers);
    for (size_t k = 0; k < emb.size(); ++k) {
      wcos += weights[k] *
              (frame_emb[k].middleRows(lo, hi - lo) * profiles.scales[k]);
    }
    wcos /= weight_sum;
    for (int i = lo; i < hi; ++i) {
      for (int s = 0; s < num_speakers; ++s) {
        const double p =
            profiles.active[static_cast<size_t>(s)]
                ? Sigmoid(opts.gamma * (wcos(i - lo, s) - opts.beta))
                : 0.0;
        acc(s, i) += p;
      }
      hits(i) += 1.0;
    }
  }

  for (int i = 0; i < frames; ++i) {
    if (!frame_speech[static_cast<size_t>(i)]) continue;  // stays exactly 0
    if (hits(i) <= 0.0) continue;
    for (int s = 0; s < num_speakers; ++s) {
      scores(s, i) = acc(s, i) / hits(i);
    }
  }
  return scores;
}

Eigen::MatrixXd ReadPresenceMatrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(StrCat("ReadPresenceMatrix: cannot open ", path));
  uint32_t speakers = 0, frames = 0;
  in.read(reinterpret_cast<char*>(&speakers), 4);
  in.read(reinterpret_cast<char*>(&frames), 4);
  if (!in) throw InputError(StrCat("ReadPresenceMatrix: truncated ", path));
  std::vector<float> raw(static_cast<size_t>(speakers) * frames);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * 4));
  if (!in) throw InputError(StrCat("ReadPresenceMatrix: truncated ", path));
  Eigen::MatrixXd m(speakers, frames);
  for (uint32_t s = 0; s < speakers; ++s) {
    for (uint32_t t = 0; t < frames; ++t) {
      m(s, t) = raw[static_cast<size_t>(s) * frames + t];
    }
  }
  return m;
}

void WritePresenceMatrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(StrCat("WritePresenceMatrix: cannot open ", path));
  const uint32_t speakers = static_cast<uint32_t>(m.rows());
  const uint32_t frames = static_cast<uint32_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&speakers), 4);
  out.write(reinterpret_cast<const char*>(&frames), 4);
  std::vector<float> raw(static_cast<size_t>(speakers) * frames);
  for (uint32_t s = 0; s < speakers; ++s) {
    for (uint32_t t = 0; t < frames; ++t) {
      raw[static_cast<size_t>(s) * frames + t] = static_cast<float>(m(s, t));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
  if (!out) throw Error(StrCat("WritePresenceMatrix: short write ", path));
}

DiarSegments ThresholdAndVote(const std::vector<Eigen::MatrixXd>& presence,
                              double tau, double finest_resolution_s) {
  if (presence.empty()) throw InputError("ThresholdAndVote: no channels");
  if (tau <= 0.0 || tau >= 1.0) {
    throw InputError("ThresholdAndVote: tau must lie in (0,1)");
  }
  const int speakers = static_cast<int>(presence[0].rows());
  const int frames = static_cast<int>(presence[0].cols());
  for (const Eigen::MatrixXd& p : presence) {
    if (p.rows() != speakers || p.cols() != frames) {
      throw InputError("ThresholdAndVote: presence shape mismatch");
    }
  }
  const int channels = static_cast<int>(presence.size());

  DiarSegments segments;
  for (int s = 0; s < speakers; ++s) {
    int run_start = -1;
    for (int i = 0; i <= frames; ++i) {
      bool active = false;
      if (i < frames) {
        int votes = 0;
        for (int c = 0; c < channels; ++c) {
          if (presence[static_cast<size_t>(c)](s, i) > tau) ++votes;
        }
        active = 2 * votes > channels;  // strict majority, ties inactive
      }
      if (active && run_start < 0) run_start = i;
      if (!active && run_start >= 0) {
        segments.push_back(DiarSegment{run_start * finest_resolution_s,
                                       i * finest_resolution_s,
                                       StrCat("spk", s)});
        run_start = -1;
      }
    }
  }
  SortSegments(segments);
  return segments;
}

DiarSegments PostprocessSegments(DiarSegments segments, double pad_onset,
                                 double pad_offset, double min_duration_on,
                                 double min_duration_off,
                                 double session_length_s) {
  if (pad_onset < 0.0 || pad_offset < 0.0 || min_duration_on < 0.0 ||
      min_duration_off < 0.0) {
    throw InputError("PostprocessSegments: parameters must be >= 0");
  }
  std::map<std::string, DiarSegments> by_speaker;
  for (DiarSegment& s : segments) {
    s.begin_s = std::max(0.0, s.begin_s - pad_onset);
    s.end_s = std::min(session_length_s, s.end_s + pad_offset);
    if (s.end_s > s.begin_s) by_speaker[s.speaker].push_back(s);
  }

  DiarSegments out;
  for (auto& [speaker, segs] : by_speaker) {
    SortSegments(segs);
    DiarSegments merged;
    for (const DiarSegment& s : segs) {
      if (!merged.empty() &&
          s.begin_s - merged.back().end_s < min_duration_off) {
        merged.back().end_s = std::max(merged.back().end_s, s.end_s);
      } else {
        merged.push_back(s);
      }
    }
    for (const DiarSegment& s : merged) {
      if (s.duration() >= min_duration_on) out.push_back(s);
    }
  }
  SortSegments(out);
  return out;
}

}  // namespace mcfd
