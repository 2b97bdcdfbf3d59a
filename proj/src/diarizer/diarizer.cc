// diarizer/diarizer.cc
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

#include "mcfd/common.h"
#include "mcfd/diarizer.h"
#include "mcfd/threading.h"

namespace mcfd {

namespace {

AudioSession SingleChannel(const AudioSession& audio, int c) {
  AudioSession one;
  one.samples.push_back(audio.samples[static_cast<size_t>(c)]);
  one.sample_rate = audio.sample_rate;
  one.channel_ids.push_back(audio.channel_ids[static_cast<size_t>(c)]);
  return one;
}

// Embeddings for every segment of every scale of one channel, rows
// renormalized so affinity products are true cosines.
MultiScaleEmbeddings EmbedChannel(const AudioSession& channel,
                                  const EmbeddingProvider& embedder,
                                  const std::vector<SegmentGrid>& grids,
                                  int num_workers) {
  MultiScaleEmbeddings emb(grids.size());
  for (size_t k = 0; k < grids.size(); ++k) {
    emb[k].grid = grids[k];
    emb[k].vectors.resize(grids[k].size(), embedder.dimension());
    ParallelFor(static_cast<size_t>(grids[k].size()), num_workers,
                [&](size_t i) {
                  const TimeSpan& span = grids[k].bounds[i];
                  Eigen::VectorXd v =
                      embedder.Compute(channel, span.begin_s, span.end_s);
                  const double norm = v.norm();
                  if (norm > 1e-12) v /= norm;
                  emb[k].vectors.row(static_cast<int>(i)) = v.transpose();
                });
  }
  return emb;
}

}  // namespace

DiarizationResult Diarize(const AudioSession& audio,
                          const EmbeddingProvider& embedder,
                          const VadProvider& vad, const DiarizerOptions& opts) {
  audio.Validate();
  opts.scales.Validate();
  const int m = audio.num_channels();
  const double session_len = audio.duration_s();

  DiarizationResult result;

  std::vector<FrameVadTrack> tracks;
  tracks.reserve(static_cast<size_t>(m));
  for (int c = 0; c < m; ++c) {
    tracks.push_back(vad.Compute(SingleChannel(audio, c)));
  }
  result.pooled_vad = PoolMultichannelVad(tracks, opts.vad_drop_threshold);

  const std::vector<TimeSpan> spans =
      TrackToSpans(result.pooled_vad, opts.vad_threshold);
  if (spans.empty()) {
    result.num_speakers = 0;
    return result;  // silence in, silence out
  }

  result.grids = MultiscaleSegment(spans, opts.scales);
  const SegmentGrid& finest =
      result.grids[static_cast<size_t>(opts.scales.finest_index())];
  if (finest.size() == 0) {
    result.num_speakers = 0;
    return result;
  }

  std::vector<MultiScaleEmbeddings> channel_emb;
  channel_emb.reserve(static_cast<size_t>(m));
  for (int c = 0; c < m; ++c) {
    channel_emb.push_back(EmbedChannel(SingleChannel(audio, c), embedder,
                                       result.grids, opts.num_workers));
  }

  // Clustering uses one embedding set: the per-channel vectors fused into
  // supervectors (pass-through when the session is single channel).
  MultiScaleEmbeddings cluster_emb;
  if (m == 1) {
    cluster_emb = channel_emb[0];
  } else {
    cluster_emb.resize(result.grids.size());
    for (size_t k = 0; k < result.grids.size(); ++k) {
      const int n = result.grids[k].size();
      cluster_emb[k].grid = result.grids[k];
      Eigen::MatrixXd rows;
      for (int i = 0; i < n; ++i) {
        std::vector<Eigen::VectorXd> per_channel;
        per_channel.reserve(static_cast<size_t>(m));
        for (int c = 0; c < m; ++c) {
          per_channel.push_back(
              channel_emb[static_cast<size_t>(c)][k].vectors.row(i)
                  .transpose());
        }
        Eigen::VectorXd sv = MultichannelSupervector(per_channel);
        if (rows.size() == 0) rows.resize(n, sv.size());
        rows.row(i) = sv.transpose();
      }
      cluster_emb[k].vectors = std::move(rows);
    }
  }

  const std::vector<double> weights =
      opts.scales.num_scales() >= 2
          ? ScaleWeights(opts.scales.r_value, opts.scales.num_scales())
          : std::vector<double>{1.0};
  ClusterAssignment assignment =
      InitialClustering(cluster_emb, weights, opts.max_speakers, opts.seed);
  result.finest_labels = assignment.labels;
  result.num_speakers = assignment.num_clusters;

  // Finest decision grid over the whole session.
  const double res = opts.scales.finest_resolution_s;
  const int frames =
      std::max(1, static_cast<int>(std::ceil(session_len / res - 1e-9)));
  std::vector<double> frame_centers(static_cast<size_t>(frames));
  std::vector<char> frame_speech(static_cast<size_t>(frames), 0);
  const double vad_frame_s = result.pooled_vad.frame_s();
  for (int i = 0; i < frames; ++i) {
    const double center = (i + 0.5) * res;
    frame_centers[static_cast<size_t>(i)] = center;
    int vf = static_cast<int>(center / vad_frame_s);
    vf = std::min(vf, result.pooled_vad.num_frames() - 1);
    frame_speech[static_cast<size_t>(i)] =
        result.pooled_vad.probs[static_cast<size_t>(vf)] >= opts.vad_threshold
            ? 1
            : 0;
  }

  result.presence.resize(static_cast<size_t>(m));
  for (int c = 0; c < m; ++c) {
    if (!opts.presence_sidecar_dir.empty()) {
      const std::string path =
          StrCat(opts.presence_sidecar_dir, "/", opts.session_id, ".",
                 audio.channel_ids[static_cast<size_t>(c)], ".pres");
      Eigen::MatrixXd p = ReadPresenceMatrix(path);
      if (p.rows() != result.num_speakers || p.cols() != frames) {
        throw InputError(StrCat("Diarize: presence sidecar ", path, " is ",
                                p.rows(), "x", p.cols(), ", expected ",
                                result.num_speakers, "x", frames));
      }
      for (int i = 0; i < frames; ++i) {
        if (!frame_speech[static_cast<size_t>(i)]) p.col(i).setZero();
      }
      result.presence[static_cast<size_t>(c)] = std::move(p);
    } else {
      result.presence[static_cast<size_t>(c)] = PresenceScores(
          channel_emb[static_cast<size_t>(c)], result.finest_labels,
          result.num_speakers, weights, frame_centers, frame_speech,
          opts.presence);
    }
  }

  DiarSegments raw = ThresholdAndVote(result.presence, opts.tau, res);
  result.segments =
      PostprocessSegments(std::move(raw), opts.pad_onset, opts.pad_offset,
                          opts.min_duration_on, opts.min_duration_off,
                          session_len);
  return result;
}

}  // namespace mcfd
