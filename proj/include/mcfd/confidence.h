// mcfd/confidence.h
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

#ifndef MCFD_CONFIDENCE_H_
#define MCFD_CONFIDENCE_H_

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mcfd {

struct StreamEnsembleConfig {
  int main_stream_index = 0;
  double confidence_margin = 0.05;  // auxiliary must beat main by this much
  double temperature = 0.25;        // entropy order alpha
};

// Generalized-entropy confidence of a token posterior sequence. Per token:
// H_a(p) = (1/(a-1)) (1 - sum_v p_v^a), normalized exponentially so that
// confidence = (exp(-H/H_max) - exp(-1)) / (1 - exp(-1)) with
// H_max = (1/(a-1)) (1 - V^(1-a)). A one-hot row scores 1, a uniform row 0;
// rows are aggregated by their mean. Rows must sum to 1 within 1e-5.
double TsallisConfidence(const Eigen::MatrixXd& token_posteriors,
                         double alpha = 0.25);

// Auxiliary stream with the highest confidence wins iff it exceeds the main
// stream's confidence by more than the margin; otherwise the main stream.
int SelectStream(const std::vector<double>& confidences,
                 const StreamEnsembleConfig& cfg);

// Posterior sidecar: uint32 token count, uint32 vocab size, then row-major
// little-endian float32 (tokens x vocab).
Eigen::MatrixXd ReadPosteriors(const std::string& path);
void WritePosteriors(const std::string& path, const Eigen::MatrixXd& m);

}  // namespace mcfd

#endif  // MCFD_CONFIDENCE_H_
