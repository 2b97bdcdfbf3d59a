// gssfe/confidence.cc
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

#include "mcfd/confidence.h"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "mcfd/common.h"

namespace mcfd {

double TsallisConfidence(const Eigen::MatrixXd& token_posteriors,
                         double alpha) {
  const int tokens = static_cast<int>(token_posteriors.rows());
  const int vocab = static_cast<int>(token_posteriors.cols());
  if (tokens == 0) throw InputError("TsallisConfidence: empty sequence");
  if (alpha <= 0.0 || alpha == 1.0) {
    throw InputError("TsallisConfidence: alpha must be > 0 and != 1");
  }

  const double inv = 1.0 / (alpha - 1.0);
  const double h_max = inv * (1.0 - std::pow(static_cast<double>(vocab),
                                             1.0 - alpha));
  double acc = 0.0;
  for (int t = 0; t < tokens; ++t) {
    double sum = 0.0, powsum = 0.0;
    for (int v = 0; v < vocab; ++v) {
      const double p = token_posteriors(t, v);
      if (p < -1e-9) {
        throw InputError("TsallisConfidence: negative probability");
      }
      sum += p;
      if (p > 0.0) powsum += std::pow(p, alpha);
    }
    if (std::abs(sum - 1.0) > 1e-5) {
      throw InputError(StrCat("TsallisConfidence: row ", t, " sums to ", sum));
    }
    if (vocab == 1 || h_max <= 0.0) {
      acc += 1.0;  // single-symbol vocabulary is always one-hot
      continue;
    }
    const double h = inv * (1.0 - powsum);
    const double c =
        (std::exp(-h / h_max) - std::exp(-1.0)) / (1.0 - std::exp(-1.0));
    acc += std::min(1.0, std::max(0.0, c));
  }
  return acc / tokens;
}

int SelectStream(const std::vector<double>& confidences,
                 const StreamEnsembleConfig& cfg) {
  if (confidences.empty()) throw InputError("SelectStream: no streams");
  const int n = static_cast<int>(confidences.size());
  if (cfg.main_stream_index < 0 || cfg.main_stream_index >= n) {
    throw InputError("SelectStream: main_stream_index out of range");
  }
  if (cfg.confidence_margin < 0.0) {
    throw InputError("SelectStream: margin must be >= 0");
  }
  int best_aux = -1;
  for (int i = 0; i < n; ++i) {
    if (i == cfg.main_stream_index) continue;
    if (best_aux < 0 ||
        confidences[static_cast<size_t>(i)] >
            confidences[static_cast<size_t>(best_aux)]) {
      best_aux = i;
    }
  }
  if (best_aux >= 0 &&
      confidences[static_cast<size_t>(best_aux)] >
          confidences[static_cast<size_t>(cfg.main_stream_index)] +
              cfg.confidence_margin) {
    return best_aux;
  }
  return cfg.main_stream_index;
}

Eigen::MatrixXd ReadPosteriors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(StrCat("ReadPosteriors: cannot open ", path));
  uint32_t tokens = 0, vocab = 0;
  in.read(reinterpret_cast<char*>(&tokens), 4);
  in.read(reinterpret_cast<char*>(&vocab), 4);
  if (!in) throw InputError(StrCat("ReadPosteriors: truncated header ", path));
  std::vector<float> raw(static_cast<size_t>(tokens) * vocab);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size() * 4));
  if (!in) throw InputError(StrCat("ReadPosteriors: truncated data ", path));
  Eigen::MatrixXd m(tokens, vocab);
  for (uint32_t t = 0; t < tokens; ++t) {
    for (uint32_t v = 0; v < vocab; ++v) {
      m(t, v) = raw[static_cast<size_t>(t) * vocab + v];
    }
  }
  return m;
}

void WritePosteriors(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(StrCat("WritePosteriors: cannot open ", path));
  const uint32_t tokens = static_cast<uint32_t>(m.rows());
  const uint32_t vocab = static_cast<uint32_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&tokens), 4);
  out.write(reinterpret_cast<const char*>(&vocab), 4);
  std::vector<float> raw(static_cast<size_t>(tokens) * vocab);
  for (uint32_t t = 0; t < tokens; ++t) {
    for (uint32_t v = 0; v < vocab; ++v) {
      raw[static_cast<size_t>(t) * vocab + v] = static_cast<float>(m(t, v));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * 4));
  if (!out) throw Error(StrCat("WritePosteriors: short write ", path));
}

}  // namespace mcfd
