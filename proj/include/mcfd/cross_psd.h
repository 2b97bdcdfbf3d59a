// mcfd/cross_psd.h
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

#ifndef MCFD_CROSS_PSD_H_
#define MCFD_CROSS_PSD_H_

#include <Eigen/Core>
#include <vector>

#include "mcfd/stft.h"

namespace mcfd {

// Per-bin Hermitian M x M cross-power spectral density matrices,
// S_ij(f) = avg over frames of x_i(t,f) * conj(x_j(t,f)).
struct CrossPsd {
  std::vector<Eigen::MatrixXcd> matrices;  // one per bin
  int channels = 0;
  int bins = 0;
  int frames_averaged = 0;
  int sample_rate = 0;
  int fft_size = 0;

  double bin_hz(int f) const {
    return static_cast<double>(f) * sample_rate / fft_size;
  }
};

// Averages the per-frame outer products over all frames, accumulating in
// double. A single-frame tensor produces a rank-degenerate estimate; that is
// reported as a warning, not an error.
CrossPsd ComputeCrossPsd(const SpectralTensor& spec);

}  // namespace mcfd

#endif  // MCFD_CROSS_PSD_H_
