// mcfd/beamform.h
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

#ifndef MCFD_BEAMFORM_H_
#define MCFD_BEAMFORM_H_

#include <Eigen/Core>
#include <vector>

#include "mcfd/gss.h"
#include "mcfd/stft.h"

namespace mcfd {

struct MvdrResult {
  SpectralTensor output;                  // single channel
  int reference = 0;                      // chosen input channel
  Eigen::VectorXd snr_per_reference;      // summed per-bin SNR estimates
  std::vector<Eigen::VectorXcd> weights;  // per bin, the applied w
  Eigen::MatrixXd target_mask;            // copied for post-masking
};

// Distortionless extraction of the masked target: spatial covariances are
// the target-mask and complement-mask weighted averages of x x^H, the weight
// matrix is inv(Phi_nn) Phi_ss / trace(inv(Phi_nn) Phi_ss), and its column at
// the reference channel is applied per bin. The reference maximizes the
// estimated output SNR sum_f (w^H Phi_ss w)/(w^H Phi_nn w). Singular noise
// covariances get diagonal loading 1e-6 * trace / M; bins that stay singular
// fall back to the masked reference channel with a diagnostic.
MvdrResult MvdrExtract(const SpectralTensor& spec, const TfMaskSet& masks);

// Applies fixed per-bin weights: out(t,f) = w_f^H x(t,f). Used to measure
// how the beamformer treats individual source images.
SpectralTensor ApplyBeamformer(const SpectralTensor& spec,
                               const std::vector<Eigen::VectorXcd>& weights);

// Floor-limited masking: every bin is scaled by max(mask, 10^(min_gain_db /
// 20)). min_gain_db must be <= 0; 0 keeps the signal untouched.
void ApplyPostmask(SpectralTensor& spec, const Eigen::MatrixXd& target_mask,
                   double min_gain_db);

}  // namespace mcfd

#endif  // MCFD_BEAMFORM_H_
