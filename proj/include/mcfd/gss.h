// mcfd/gss.h
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

#ifndef MCFD_GSS_H_
#define MCFD_GSS_H_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mcfd/stft.h"

namespace mcfd {

// Per-source time-frequency masks. Source 0 is the target speaker, sources
// [1, num_sources-2] are interfering speakers, the last source is the noise
// class. Masks are mixture posteriors: they sum to 1 per TF bin.
struct TfMaskSet {
  std::vector<Eigen::MatrixXd> masks;  // per source: frames x bins, in [0,1]
  int target_index = 0;

  int num_sources() const { return static_cast<int>(masks.size()); }
  int noise_index() const { return num_sources() - 1; }
};

struct GssOptions {
  int em_iterations = 20;
  uint64_t seed = 17;
  int num_workers = 0;
};

// Guided separation masks from a complex angular-central-Gaussian mixture
// fitted per frequency bin on the direction vectors x/||x||. `activity` has
// one row per speaker source (row 0 = target) and one flag per STFT frame;
// the EM posterior of a speaker is pinned to zero wherever its row says
// inactive, which anchors component identity across bins. A noise component
// active in every frame is appended internally. Deterministic for a fixed
// seed.
TfMaskSet GssMasks(const SpectralTensor& spec,
                   const std::vector<std::vector<char>>& activity,
                   const GssOptions& opts = {});

}  // namespace mcfd

#endif  // MCFD_GSS_H_
