// diarizer/melbank.cc
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

#include "mcfd/melbank.h"

#include <cmath>
#include <complex>

#include "mcfd/common.h"

namespace mcfd {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelBank MakeMelBank(int sample_rate, int fft_size, int num_bands,
                    double fmin_hz, double fmax_hz) {
  if (num_bands < 1) throw InputError("MakeMelBank: num_bands must be >= 1");
  if (fmax_hz <= 0.0) fmax_hz = sample_rate / 2.0;
  if (fmin_hz < 0.0 || fmin_hz >= fmax_hz || fmax_hz > sample_rate / 2.0) {
    throw InputError("MakeMelBank: band edges must satisfy 0 <= fmin < fmax <= Nyquist");
  }
  const int num_bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(fmin_hz);
  const double mel_hi = HzToMel(fmax_hz);

  std::vector<double> edges(static_cast<size_t>(num_bands) + 2);
  for (int i = 0; i < num_bands + 2; ++i) {
    edges[static_cast<size_t>(i)] =
        MelToHz(mel_lo + (mel_hi - mel_lo) * i / (num_bands + 1));
  }

  MelBank bank;
  bank.num_bands = num_bands;
  bank.fft_size = fft_size;
  bank.sample_rate = sample_rate;
  bank.weights = Eigen::MatrixXd::Zero(num_bands, num_bins);
  for (int b = 0; b < num_bands; ++b) {
    const double lo = edges[static_cast<size_t>(b)];
    const double mid = edges[static_cast<size_t>(b) + 1];
    const double hi = edges[static_cast<size_t>(b) + 2];
    for (int f = 0; f < num_bins; ++f) {
      const double hz = static_cast<double>(f) * sample_rate / fft_size;
      double w = 0.0;
      if (hz >= lo && hz <= mid && mid > lo) {
        w = (hz - lo) / (mid - lo);
      } else if (hz > mid && hz <= hi && hi > mid) {
        w = (hi - hz) / (hi - mid);
      }
      bank.weights(b, f) = w;
    }
  }
  return bank;
}

Eigen::MatrixXd LogMelSpectrogram(const AudioSession& channel,
                                  const MelSpectrogramConfig& cfg) {
  channel.Validate();
  if (channel.num_channels() != 1) {
    throw InputError("LogMelSpectrogram: expects a single-channel session");
  }
  StftConfig stft_cfg;
  stft_cfg.window_length_ms = cfg.window_length_ms;
  stft_cfg.hop_length_ms = cfg.hop_length_ms;
  SpectralTensor spec = Stft(channel, stft_cfg);

  MelBank bank = MakeMelBank(channel.sample_rate, spec.fft_size,
                             cfg.num_bands, cfg.fmin_hz, cfg.fmax_hz);
  Eigen::MatrixXd power(spec.bins, spec.frames);
  for (int t = 0; t < spec.frames; ++t) {
    for (int f = 0; f < spec.bins; ++f) {
      power(f, t) = std::norm(std::complex<double>(spec.at(0, t, f)));
    }
  }
  Eigen::MatrixXd mel = bank.weights * power;
  return (mel.array() + 1e-10).log().matrix();
}

}  // namespace mcfd
