// spectral/cross_psd.cc
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

#include "mcfd/cross_psd.h"

#include <complex>

#include "mcfd/common.h"

namespace mcfd {

CrossPsd ComputeCrossPsd(const SpectralTensor& spec) {
  if (spec.channels <= 0 || spec.frames <= 0) {
    throw Error("ComputeCrossPsd: empty tensor");
  }
  if (spec.frames < 2) {
    Warn("ComputeCrossPsd: single frame, PSD estimate is rank degenerate");
  }
  const int M = spec.channels;
  CrossPsd psd;
  psd.channels = M;
  psd.bins = spec.bins;
  psd.frames_averaged = spec.frames;
  psd.sample_rate = spec.sample_rate;
  psd.fft_size = spec.fft_size;
  psd.matrices.assign(spec.bins, Eigen::MatrixXcd::Zero(M, M));

  std::vector<std::complex<double>> x(M);
  for (int f = 0; f < spec.bins; ++f) {
    Eigen::MatrixXcd& S = psd.matrices[f];
    for (int t = 0; t < spec.frames; ++t) {
      for (int c = 0; c < M; ++c) {
        const std::complex<float>& v = spec.at(c, t, f);
        x[c] = std::complex<double>(v.real(), v.imag());
      }
      // Upper triangle only; mirrored below so the result is exactly
      // Hermitian with a real diagonal.
      for (int i = 0; i < M; ++i) {
        for (int j = i; j < M; ++j) {
          S(i, j) += x[i] * std::conj(x[j]);
        }
      }
    }
    S /= static_cast<double>(spec.frames);
    for (int i = 0; i < M; ++i) {
      S(i, i) = std::complex<double>(S(i, i).real(), 0.0);
      for (int j = i + 1; j < M; ++j) {
        S(j, i) = std::conj(S(i, j));
      }
    }
  }
  return psd;
}

}  // namespace mcfd
