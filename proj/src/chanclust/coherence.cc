// chanclust/coherence.cc
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

#include "mcfd/coherence.h"

#include <cmath>
#include <vector>

#include "mcfd/common.h"

namespace mcfd {

CoherenceMatrix ComputeMsc(const CrossPsd& psd, double band_low_hz,
                           double band_high_hz) {
  const double nyquist = psd.sample_rate / 2.0;
  if (band_low_hz < 0.0 || band_high_hz > nyquist ||
      band_low_hz >= band_high_hz) {
    throw InputError(StrCat("ComputeMsc: band [", band_low_hz, ", ",
                            band_high_hz, "] outside (0, ", nyquist, ")"));
  }
  const int M = psd.channels;
  std::vector<int> band_bins;
  for (int f = 0; f < psd.bins; ++f) {
    const double hz = psd.bin_hz(f);
    if (hz >= band_low_hz && hz <= band_high_hz) band_bins.push_back(f);
  }
  if (band_bins.empty()) throw InputError("ComputeMsc: empty frequency band");

  // A channel counts as silent when it has no energy anywhere in the band.
  constexpr double kEps = 1e-30;
  std::vector<bool> silent(M, true);
  for (int f : band_bins) {
    for (int i = 0; i < M; ++i) {
      if (psd.matrices[f](i, i).real() > kEps) silent[i] = false;
    }
  }
  for (int i = 0; i < M; ++i) {
    if (silent[i]) {
      Warn(StrCat("ComputeMsc: channel ", i,
                  " has zero in-band energy; coherence set to 0"));
    }
  }

  CoherenceMatrix coh;
  coh.band_low_hz = band_low_hz;
  coh.band_high_hz = band_high_hz;
  coh.gamma_bar = Eigen::MatrixXd::Zero(M, M);
  for (int f : band_bins) {
    const Eigen::MatrixXcd& S = psd.matrices[f];
    for (int i = 0; i < M; ++i) {
      for (int j = i + 1; j < M; ++j) {
        const double denom = S(i, i).real() * S(j, j).real();
        if (denom > kEps) {
          coh.gamma_bar(i, j) += std::norm(S(i, j)) / denom;
        }
      }
    }
  }
  coh.gamma_bar /= static_cast<double>(band_bins.size());
  for (int i = 0; i < M; ++i) {
    coh.gamma_bar(i, i) = 1.0;
    for (int j = i + 1; j < M; ++j) {
      if (silent[i] || silent[j]) coh.gamma_bar(i, j) = 0.0;
      coh.gamma_bar(i, j) = std::min(1.0, std::max(0.0, coh.gamma_bar(i, j)));
      coh.gamma_bar(j, i) = coh.gamma_bar(i, j);
    }
  }
  return coh;
}

CoherenceMatrix ComputeMsc(const SpectralTensor& spec, double band_low_hz,
                           double band_high_hz) {
  if (spec.frames < 2) {
    throw InputError("ComputeMsc: need >= 2 frames for PSD smoothing");
  }
  return ComputeMsc(ComputeCrossPsd(spec), band_low_hz, band_high_hz);
}

}  // namespace mcfd
