// mcfd/coherence.h
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

#ifndef MCFD_COHERENCE_H_
#define MCFD_COHERENCE_H_

#include <Eigen/Core>

#include "mcfd/cross_psd.h"
#include "mcfd/stft.h"

namespace mcfd {

// Band-averaged magnitude-squared coherence. Symmetric, unit diagonal,
// entries in [0,1]; invariant to per-channel positive scaling.
struct CoherenceMatrix {
  Eigen::MatrixXd gamma_bar;
  double band_low_hz = 0.0;
  double band_high_hz = 0.0;
};

// Per bin: MSC_ij(f) = |S_ij(f)|^2 / (S_ii(f) * S_jj(f)); the result is the
// unweighted mean over bins whose center frequency lies in
// [band_low_hz, band_high_hz]. A channel with zero in-band energy gets zero
// off-diagonal entries and a diagnostic (division guard).
CoherenceMatrix ComputeMsc(const SpectralTensor& spec,
                           double band_low_hz = 300.0,
                           double band_high_hz = 3500.0);

CoherenceMatrix ComputeMsc(const CrossPsd& psd, double band_low_hz = 300.0,
                           double band_high_hz = 3500.0);

}  // namespace mcfd

#endif  // MCFD_COHERENCE_H_
