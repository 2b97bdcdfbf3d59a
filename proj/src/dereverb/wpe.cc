// dereverb/wpe.cc
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

#include "mcfd/wpe.h"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <vector>

#include "mcfd/common.h"
#include "mcfd/threading.h"

namespace mcfd {

namespace {

// Power floor relative to the bin's mean power. An absolute floor would
// break scale equivariance: cells of a quiet input can cross it while the
// same cells of a scaled-up copy do not, flipping their weights.
constexpr double kLambdaFloor = 1e-10;

void ValidateConfig(const WpeConfig& cfg) {
  if (cfg.filter_taps < 1) throw InputError("WPE: filter_taps must be >= 1");
  if (cfg.prediction_delay < 1) {
    throw InputError("WPE: prediction_delay must be >= 1");
  }
  if (cfg.block_length_s <= cfg.block_overlap_s) {
    throw InputError("WPE: block_length_s must exceed block_overlap_s");
  }
  if (cfg.block_overlap_s < 0.0) {
    throw InputError("WPE: block_overlap_s must be >= 0");
  }
  if (cfg.overlap_fraction <= 0.0 || cfg.overlap_fraction >= 1.0) {
    throw InputError("WPE: overlap_fraction must lie in (0,1)");
  }
}

// Dereverberates one frequency bin of one block. Returns false when the
// normal equations stayed singular after escalated loading and the bin was
// left untouched.
bool WpeBin(SpectralTensor& spec, int frame_begin, int frame_end, int bin,
            const WpeConfig& cfg) {
  const int m = spec.channels;
  const int t_len = frame_end - frame_begin;
  const int taps = cfg.filter_taps;
  const int delay = cfg.prediction_delay;
  const int mk = m * taps;

  Eigen::MatrixXcd x(m, t_len);
  for (int c = 0; c < m; ++c) {
    for (int t = 0; t < t_len; ++t) {
      x(c, t) = spec.at(c, frame_begin + t, bin);
    }
  }

  // Stacked delayed observations: column t holds x(t - delay - k) for
  // k in [0, taps), zeros before the block start.
  Eigen::MatrixXcd stacked = Eigen::MatrixXcd::Zero(mk, t_len);
  for (int k = 0; k < taps; ++k) {
    for (int t = 0; t < t_len; ++t) {
      const int src = t - delay - k;
      if (src < 0) continue;
      stacked.block(k * m, t, m, 1) = x.col(src);
    }
  }

  Eigen::MatrixXcd y = x;
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    Eigen::VectorXd lambda(t_len);
    for (int t = 0; t < t_len; ++t) lambda(t) = y.col(t).squaredNorm() / m;
    const double floor = std::max(kLambdaFloor * lambda.mean(), 1e-300);
    Eigen::VectorXd inv_sqrt_lambda(t_len);
    for (int t = 0; t < t_len; ++t)
      inv_sqrt_lambda(t) = 1.0 / std::sqrt(std::max(lambda(t), floor));
    Eigen::MatrixXcd a = stacked * inv_sqrt_lambda.asDiagonal();
    Eigen::MatrixXcd b = x * inv_sqrt_lambda.asDiagonal();
    Eigen::MatrixXcd r = a * a.adjoint();
    Eigen::MatrixXcd p = a * b.adjoint();

    const double trace = r.real().trace();
    bool solved = false;
    Eigen::MatrixXcd g;
    for (double loading : {1e-10, 1e-6}) {
      Eigen::MatrixXcd reg =
          r + (loading * std::max(trace, 1e-300) / mk) *
                  Eigen::MatrixXcd::Identity(mk, mk);
      Eigen::LDLT<Eigen::MatrixXcd> ldlt(reg);
      if (ldlt.info() != Eigen::Success) continue;
      g = ldlt.solve(p);
      if (g.allFinite()) {
        solved = true;
        break;
      }
    }
    if (!solved) return false;
    y = x - g.adjoint() * stacked;
  }

  for (int c = 0; c < m; ++c) {
    for (int t = 0; t < t_len; ++t) {
      spec.at(c, frame_begin + t, bin) = std::complex<float>(y(c, t));
    }
  }
  return true;
}

}  // namespace

void WpeProcessFrames(SpectralTensor& spec, int frame_begin, int frame_end,
                      const WpeConfig& cfg) {
  if (frame_begin < 0 || frame_end > spec.frames || frame_begin >= frame_end) {
    throw InputError("WpeProcessFrames: frame range outside tensor");
  }
  std::atomic<int> failures{0};
  ParallelFor(static_cast<size_t>(spec.bins), cfg.num_workers,
              [&](size_t bin) {
                if (!WpeBin(spec, frame_begin, frame_end,
                            static_cast<int>(bin), cfg)) {
                  failures.fetch_add(1, std::memory_order_relaxed);
                }
              });
  if (failures.load() > 0) {
    Warn(StrCat("WPE: ", failures.load(), " of ", spec.bins,
                " bins kept their input (singular prediction equations)"));
  }
}

AudioSession WpeDereverberate(const AudioSession& audio, const WpeConfig& cfg) {
  audio.Validate();
  ValidateConfig(cfg);
  if (cfg.iterations <= 0) return audio;  // documented identity short-cut

  StftConfig stft_cfg;
  stft_cfg.window_length_ms = cfg.window_length_ms;
  stft_cfg.hop_length_ms = cfg.window_length_ms * (1.0 - cfg.overlap_fraction);
  SpectralTensor spec = Stft(audio, stft_cfg);

  const double hop_s = spec.hop_samples / static_cast<double>(spec.sample_rate);
  int block_frames = std::max(
      1, static_cast<int>(std::lround(cfg.block_length_s / hop_s)));
  int overlap_frames = std::min(
      block_frames - 1,
      static_cast<int>(std::lround(cfg.block_overlap_s / hop_s)));
  overlap_frames = std::max(0, overlap_frames);
  const int step = block_frames - overlap_frames;

  SpectralTensor out = spec;
  int start = 0;
  bool first = true;
  while (start < spec.frames) {
    // A short trailing remainder would give the normal equations too few
    // frames and let the filter overfit, so the last block is re-anchored to
    // full length instead; the extra overlap is simply overwritten.
    if (!first && spec.frames - start < block_frames &&
        block_frames <= spec.frames) {
      start = spec.frames - block_frames;
    }
    const int end = std::min(start + block_frames, spec.frames);
    const int len = end - start;
    // WPE always reads the raw observations, so the block is cut from the
    // untouched input tensor rather than from the stitched output.
    SpectralTensor block;
    block.channels = spec.channels;
    block.frames = len;
    block.bins = spec.bins;
    block.sample_rate = spec.sample_rate;
    block.win_samples = spec.win_samples;
    block.hop_samples = spec.hop_samples;
    block.fft_size = spec.fft_size;
    block.signal_length = spec.signal_length;
    block.window_length_ms = spec.window_length_ms;
    block.hop_length_ms = spec.hop_length_ms;
    block.window = spec.window;
    block.data.resize(static_cast<size_t>(spec.channels) * len * spec.bins);
    for (int c = 0; c < spec.channels; ++c) {
      for (int t = 0; t < len; ++t) {
        for (int f = 0; f < spec.bins; ++f) {
          block.at(c, t, f) = spec.at(c, start + t, f);
        }
      }
    }
    WpeProcessFrames(block, 0, len, cfg);
    const int fade = first ? 0 : std::min(overlap_frames, len);
    for (int c = 0; c < spec.channels; ++c) {
      for (int t = 0; t < len; ++t) {
        double w = 1.0;
        if (t < fade) w = static_cast<double>(t + 1) / (fade + 1);
        for (int f = 0; f < spec.bins; ++f) {
          const std::complex<float> fresh = block.at(c, t, f);
          if (w >= 1.0) {
            out.at(c, start + t, f) = fresh;
          } else {
            const std::complex<float> old = out.at(c, start + t, f);
            out.at(c, start + t, f) = old * static_cast<float>(1.0 - w) +
                                      fresh * static_cast<float>(w);
          }
        }
      }
    }
    first = false;
    if (end == spec.frames) break;
    start += step;
  }

  AudioSession result = Istft(out);
  result.channel_ids = audio.channel_ids;
  return result;
}

}  // namespace mcfd
