// mcfd/embedding.h
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

#ifndef MCFD_EMBEDDING_H_
#define MCFD_EMBEDDING_H_

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "mcfd/audio.h"
#include "mcfd/melbank.h"

namespace mcfd {

// Maps a time span of one channel to a unit-norm speaker embedding.
// Implementations must be deterministic: identical spans give identical
// vectors.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dimension() const = 0;
  virtual Eigen::VectorXd Compute(const AudioSession& channel, double begin_s,
                                  double end_s) const = 0;
};

// Baseline provider: 40-band log mel statistics. Mean and standard deviation
// per band over the span's frames form an 80-dim vector, L2-normalized.
// Spans shorter than one feature window (25 ms) are rejected.
class FilterbankEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit FilterbankEmbeddingProvider(const MelSpectrogramConfig& cfg = {})
      : cfg_(cfg) {}
  int dimension() const override { return 2 * cfg_.num_bands; }
  Eigen::VectorXd Compute(const AudioSession& channel, double begin_s,
                          double end_s) const override;

 private:
  MelSpectrogramConfig cfg_;
};

// Sidecar rows: [t_start, t_end, e_1 .. e_D] as little-endian float32.
struct EmbeddingSidecar {
  std::vector<double> begin_s;
  std::vector<double> end_s;
  Eigen::MatrixXd vectors;  // rows x D
};

EmbeddingSidecar ReadEmbeddingSidecar(const std::string& path, int dimension);
void WriteEmbeddingSidecar(const std::string& path,
                           const EmbeddingSidecar& sidecar);

// Serves externally computed embeddings. Files live in `dir` and are named
// "<session>.<channel>.scale<k>.emb"; all files for the session are indexed
// by (channel, start, end) rounded to 0.1 ms. A span with no matching row is
// an error, so mismatched segmentations fail loudly.
class SidecarEmbeddingProvider : public EmbeddingProvider {
 public:
  SidecarEmbeddingProvider(const std::string& dir,
                           const std::string& session_id, int dimension);
  int dimension() const override { return dimension_; }
  Eigen::VectorXd Compute(const AudioSession& channel, double begin_s,
                          double end_s) const override;

 private:
  int dimension_;
  std::map<std::string, Eigen::VectorXd> rows_;  // "<channel>|<b>|<e>" key
};

}  // namespace mcfd

#endif  // MCFD_EMBEDDING_H_
