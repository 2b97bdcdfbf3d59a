// mcfd/melbank.h
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

#ifndef MCFD_MELBANK_H_
#define MCFD_MELBANK_H_

#include <Eigen/Core>

#include "mcfd/audio.h"
#include "mcfd/stft.h"

namespace mcfd {

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters with mel-spaced edges, evaluated at FFT bin centers.
struct MelBank {
  Eigen::MatrixXd weights;  // num_bands x num_bins
  int num_bands = 0;
  int fft_size = 0;
  int sample_rate = 0;
};

MelBank MakeMelBank(int sample_rate, int fft_size, int num_bands,
                    double fmin_hz, double fmax_hz);

struct MelSpectrogramConfig {
  double window_length_ms = 25.0;
  double hop_length_ms = 10.0;
  int num_bands = 40;
  double fmin_hz = 20.0;
  double fmax_hz = 0.0;  // 0 selects Nyquist
};

// Per-frame log mel band energies of one channel: num_bands x frames.
// log(power + 1e-10) keeps silent frames finite.
Eigen::MatrixXd LogMelSpectrogram(const AudioSession& channel,
                                  const MelSpectrogramConfig& cfg = {});

}  // namespace mcfd

#endif  // MCFD_MELBANK_H_
