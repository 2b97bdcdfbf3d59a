// mcfd/diarizer.h
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

#ifndef MCFD_DIARIZER_H_
#define MCFD_DIARIZER_H_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "mcfd/audio.h"
#include "mcfd/embedding.h"
#include "mcfd/nmesc.h"
#include "mcfd/rttm.h"
#include "mcfd/vad.h"

namespace mcfd {

// ---------------------------------------------------------------------------
// Segmentation across scales

struct ScaleConfig {
  std::vector<double> scale_lengths_s{3.0, 1.5, 0.5};  // strictly decreasing
  double overlap = 0.5;              // fraction; hop = length * (1 - overlap)
  double r_value = 1.0;              // scale-weight scaler
  double finest_resolution_s = 0.05;  // decision grid

  int num_scales() const { return static_cast<int>(scale_lengths_s.size()); }
  int finest_index() const { return num_scales() - 1; }
  void Validate() const;
};

// w(k) = r - ((r-1)/(K-1)) * k for k in [0, K); w(0) = r and w(K-1) = 1
// exactly. r < 1 down-weights the longer scales.
std::vector<double> ScaleWeights(double r, int k);

struct SegmentGrid {
  std::vector<TimeSpan> bounds;
  std::vector<double> centers;  // strictly increasing

  int size() const { return static_cast<int>(bounds.size()); }
};

// Windows of each scale length hopped by (1 - overlap) * length inside every
// speech span; a tail not reached by a full window gets one final window
// flush with the span end. Spans shorter than the scale length produce the
// whole span as a single segment.
std::vector<SegmentGrid> MultiscaleSegment(
    const std::vector<TimeSpan>& speech_spans, const ScaleConfig& cfg);

// Index of the nearest value in ascending `centers` for each query; ties
// resolve to the earlier center.
std::vector<int> NearestCenter(const std::vector<double>& centers,
                               const std::vector<double>& queries);

// ---------------------------------------------------------------------------
// Embeddings on the segment grids

struct ScaleEmbeddings {
  SegmentGrid grid;
  Eigen::MatrixXd vectors;  // grid.size() x D, unit-norm rows
};

// Index k runs over scales, coarsest first, matching ScaleConfig.
using MultiScaleEmbeddings = std::vector<ScaleEmbeddings>;

// Distance-weighted pair interpolation onto target centers:
// e = (d_L / sqrt(d_L^2 + d_R^2)) e_L + (d_R / sqrt(d_L^2 + d_R^2)) e_R,
// where e_L/e_R are the nearest segments left/right of the target and
// d_L/d_R the center distances. The result is NOT renormalized (the weight
// vector has unit L2 norm, the output generally does not); targets outside
// the center hull copy the nearest embedding.
Eigen::MatrixXd InterpolateEmbeddings(const ScaleEmbeddings& emb,
                                      const std::vector<double>& targets);

// Per-channel embeddings of one segment fused into a single vector: the
// channel with the lowest Pearson correlation against the channel-mean
// embedding is dropped, the remaining M-1 are concatenated in channel order
// and renormalized. M = 1 passes through.
Eigen::VectorXd MultichannelSupervector(
    const std::vector<Eigen::VectorXd>& per_channel);

// NME-SC over the scale-weighted cosine affinity of the finest-grid
// segments. Coarser scales are mapped to the finest grid by nearest-center
// assignment; the weighted mean cosine is rescaled to [0,1].
ClusterAssignment InitialClustering(const MultiScaleEmbeddings& emb,
                                    const std::vector<double>& weights,
                                    int max_speakers, uint64_t seed,
                                    Eigen::MatrixXd* affinity_out = nullptr);

// ---------------------------------------------------------------------------
// Speaker profiles and presence scoring

struct SpeakerProfiles {
  std::vector<Eigen::MatrixXd> scales;  // per scale: D x num_speakers
  std::vector<bool> active;             // false when no segment contributed
  int num_speakers = 0;
};

// profile = alpha * local + (1 - alpha) * global, exactly; normalization is
// the caller's separate step so the mixing endpoints stay checkable.
Eigen::MatrixXd MixProfiles(const Eigen::MatrixXd& local,
                            const Eigen::MatrixXd& global_avg, double alpha);

// Per-speaker mean embeddings inside the T_l window centered at center_s,
// mixed with the T_g window means, columns then unit-normalized. A speaker
// absent from the local window falls back to its global mean; absent from
// both -> zero column, active = false.
SpeakerProfiles ComputeSpeakerProfiles(const MultiScaleEmbeddings& emb,
                                       const std::vector<int>& finest_labels,
                                       int num_speakers, double center_s,
                                       double alpha, double t_g, double t_l);

struct PresenceOptions {
  double gamma = 10.0;  // sigmoid sharpness of the cosine scorer
  double beta = 0.5;    // cosine offset mapping to probability 0.5
  double window_s = 15.0;
  double hop_s = 3.0;
  double alpha = 0.5;           // local/global profile mix
  double global_window_s = 1e9;  // effectively the whole session
};

// Speaker-presence probabilities on the finest grid: sliding windows
// (window_s long, hop_s apart) each score their frames as
// sigmoid(gamma * (weighted multi-scale cosine - beta)) against the window's
// profiles, overlapping windows are averaged, and frames outside the speech
// mask are forced to exactly 0. Rows = speakers, cols = frames.
Eigen::MatrixXd PresenceScores(const MultiScaleEmbeddings& emb,
                               const std::vector<int>& finest_labels,
                               int num_speakers,
                               const std::vector<double>& weights,
                               const std::vector<double>& frame_centers,
                               const std::vector<char>& frame_speech,
                               const PresenceOptions& opts);

// Raw presence matrices can be exchanged with external scorers:
// uint32 speakers, uint32 frames, then row-major little-endian float32.
Eigen::MatrixXd ReadPresenceMatrix(const std::string& path);
void WritePresenceMatrix(const std::string& path, const Eigen::MatrixXd& m);

// Per channel, presence > tau votes a frame active; a frame-speaker pair is
// kept iff strictly more than half of the channels vote for it (ties drop
// it). Contiguous kept frames become segments labeled "spk<s>".
DiarSegments ThresholdAndVote(const std::vector<Eigen::MatrixXd>& presence,
                              double tau, double finest_resolution_s);

// In order: pad starts/ends, clip to [0, session_length], merge same-speaker
// segments separated by less than min_duration_off (overlaps included),
// drop segments shorter than min_duration_on.
DiarSegments PostprocessSegments(DiarSegments segments, double pad_onset,
                                 double pad_offset, double min_duration_on,
                                 double min_duration_off,
                                 double session_length_s);

// ---------------------------------------------------------------------------
// Whole-session driver

struct DiarizerOptions {
  ScaleConfig scales;
  double vad_threshold = 0.5;       // speech mask + span extraction
  double vad_drop_threshold = 0.25;  // relative channel dropping, [0, 0.5]
  int max_speakers = 8;
  PresenceOptions presence;
  double tau = 0.5;  // presence threshold before voting
  double pad_onset = 0.1;
  double pad_offset = 0.1;
  double min_duration_on = 0.2;
  double min_duration_off = 0.2;
  uint64_t seed = 17;
  int num_workers = 0;
  std::string session_id = "session";
  // When set, presence matrices are read from
  // "<dir>/<session>.<channel>.pres" instead of the cosine scorer.
  std::string presence_sidecar_dir;
};

struct DiarizationResult {
  DiarSegments segments;                  // post-processed
  std::vector<Eigen::MatrixXd> presence;  // per channel, speakers x frames
  std::vector<int> finest_labels;
  int num_speakers = 0;
  FrameVadTrack pooled_vad;
  std::vector<SegmentGrid> grids;
};

DiarizationResult Diarize(const AudioSession& audio,
                          const EmbeddingProvider& embedder,
                          const VadProvider& vad,
                          const DiarizerOptions& opts = {});

}  // namespace mcfd

#endif  // MCFD_DIARIZER_H_
