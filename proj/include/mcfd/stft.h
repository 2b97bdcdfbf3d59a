// mcfd/stft.h
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

#ifndef MCFD_STFT_H_
#define MCFD_STFT_H_

#include <complex>
#include <vector>

#include "mcfd/audio.h"

namespace mcfd {

enum class WindowFn { kHann, kSqrtHann };

struct StftConfig {
  double window_length_ms = 64.0;
  double hop_length_ms = 16.0;  // 75% overlap at the 64 ms default
  WindowFn window = WindowFn::kHann;
};

// Complex STFT frames indexed (channel, frame, bin). Frames are centered:
// frame t covers samples [t*hop - win/2, t*hop + win/2) of the original
// signal, with zero padding at the edges, so frame centers land on sample
// index t*hop. FFT size is the next power of two >= window samples;
// bins = fft_size/2 + 1.
struct SpectralTensor {
  std::vector<std::complex<float>> data;  // (channel * frames + frame) * bins + bin
  int channels = 0;
  int frames = 0;
  int bins = 0;
  int sample_rate = 0;
  int win_samples = 0;
  int hop_samples = 0;
  int fft_size = 0;
  std::size_t signal_length = 0;  // original sample count, for exact istft trim
  double window_length_ms = 0.0;
  double hop_length_ms = 0.0;
  WindowFn window = WindowFn::kHann;

  std::complex<float>& at(int c, int t, int f) {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + f];
  }
  const std::complex<float>& at(int c, int t, int f) const {
    return data[(static_cast<std::size_t>(c) * frames + t) * bins + f];
  }
  double bin_hz(int f) const {
    return static_cast<double>(f) * sample_rate / fft_size;
  }
  double frame_time_s(int t) const {
    return static_cast<double>(t) * hop_samples / sample_rate;
  }
};

// Forward STFT. Errors when the signal is shorter than one window or the hop
// is not positive. Round-trips with Istft to < 1e-6 relative L2 error on the
// interior for both window functions.
SpectralTensor Stft(const AudioSession& audio, const StftConfig& cfg);

// Weighted overlap-add inverse with per-sample window-power normalization.
AudioSession Istft(const SpectralTensor& spec);

std::vector<double> MakeWindow(WindowFn fn, int length);

int NextPow2(int n);

}  // namespace mcfd

#endif  // MCFD_STFT_H_
