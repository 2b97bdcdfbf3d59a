// diarizer/embedding.cc
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

#include "mcfd/embedding.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "mcfd/common.h"

namespace mcfd {

namespace {

std::string SpanKey(const std::string& channel, double begin_s, double end_s) {
  // 0.1 ms rounding absorbs float32 storage of the bounds.
  return StrCat(channel, "|", std::llround(begin_s * 10000.0), "|",
                std::llround(end_s * 10000.0));
}

}  // namespace

Eigen::VectorXd FilterbankEmbeddingProvider::Compute(
    const AudioSession& channel, double begin_s, double end_s) const {
  channel.Validate();
  if (channel.num_channels() != 1) {
    throw InputError("FilterbankEmbeddingProvider: single channel expected");
  }
  if (end_s - begin_s < cfg_.window_length_ms / 1000.0) {
    throw InputError(StrCat("FilterbankEmbeddingProvider: span ",
                            end_s - begin_s, " s shorter than one ",
                            cfg_.window_length_ms, " ms feature window"));
  }
  const int64_t b = std::llround(begin_s * channel.sample_rate);
  const int64_t e = std::llround(end_s * channel.sample_rate);
  AudioSession span = channel.Slice(b, e);
  Eigen::MatrixXd mel = LogMelSpectrogram(span, cfg_);

  const int bands = static_cast<int>(mel.rows());
  Eigen::VectorXd v(2 * bands);
  for (int band = 0; band < bands; ++band) {
    const double mean = mel.row(band).mean();
    const double var =
        (mel.row(band).array() - mean).square().sum() / mel.cols();
    v(band) = mean;
    v(bands + band) = std::sqrt(var);
  }
  const double norm = v.norm();
  if (norm > 1e-12) v /= norm;
  return v;
}

EmbeddingSidecar ReadEmbeddingSidecar(const std::string& path, int dimension) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(StrCat("ReadEmbeddingSidecar: cannot open ", path));
  in.seekg(0, std::ios::end);
  const std::streamoff bytes = in.tellg();
  in.seekg(0, std::ios::beg);
  const int row_floats = dimension + 2;
  if (bytes % (row_floats * 4) != 0) {
    throw InputError(StrCat("ReadEmbeddingSidecar: ", path,
                            " size is not a multiple of row width ",
                            row_floats * 4));
  }
  const int rows = static_cast<int>(bytes / (row_floats * 4));
  std::vector<float> raw(static_cast<size_t>(rows) * row_floats);
  in.read(reinterpret_cast<char*>(raw.data()), bytes);
  if (!in) throw InputError(StrCat("ReadEmbeddingSidecar: short read ", path));

  EmbeddingSidecar sc;
  sc.begin_s.resize(static_cast<size_t>(rows));
  sc.end_s.resize(static_cast<size_t>(rows));
  sc.vectors.resize(rows, dimension);
  for (int r = 0; r < rows; ++r) {
    const float* row = raw.data() + static_cast<size_t>(r) * row_floats;
    sc.begin_s[static_cast<size_t>(r)] = row[0];
    sc.end_s[static_cast<size_t>(r)] = row[1];
    for (int d = 0; d < dimension; ++d) sc.vectors(r, d) = row[2 + d];
  }
  return sc;
}

void WriteEmbeddingSidecar(const std::string& path,
                           const EmbeddingSidecar& sidecar) {
  const int rows = static_cast<int>(sidecar.vectors.rows());
  const int dim = static_cast<int>(sidecar.vectors.cols());
  if (static_cast<int>(sidecar.begin_s.size()) != rows ||
      static_cast<int>(sidecar.end_s.size()) != rows) {
    throw InputError("WriteEmbeddingSidecar: bounds/vector row mismatch");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(StrCat("WriteEmbeddingSidecar: cannot open ", path));
  std::vector<float> row(static_cast<size_t>(dim) + 2);
  for (int r = 0; r < rows; ++r) {
    row[0] = static_cast<float>(sidecar.begin_s[static_cast<size_t>(r)]);
    row[1] = static_cast<float>(sidecar.end_s[static_cast<size_t>(r)]);
    for (int d = 0; d < dim; ++d) {
      row[static_cast<size_t>(d) + 2] = static_cast<float>(sidecar.vectors(r, d));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * 4));
  }
  if (!out) throw Error(StrCat("WriteEmbeddingSidecar: short write ", path));
}

SidecarEmbeddingProvider::SidecarEmbeddingProvider(
    const std::string& dir, const std::string& session_id, int dimension)
    : dimension_(dimension) {
  namespace fs = std::filesystem;
  const std::string prefix = session_id + ".";
  bool any = false;
  for (const auto& entry : fs::directory_iterator(dir.empty() ? "." : dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".emb") {
      continue;
    }
    // name layout: <session>.<channel>.scale<k>.emb
    const std::string middle =
        name.substr(prefix.size(), name.size() - prefix.size() - 4);
    const size_t dot = middle.rfind('.');
    if (dot == std::string::npos) continue;
    const std::string channel = middle.substr(0, dot);
    EmbeddingSidecar sc = ReadEmbeddingSidecar(entry.path().string(),
                                               dimension_);
    for (int r = 0; r < static_cast<int>(sc.vectors.rows()); ++r) {
      rows_[SpanKey(channel, sc.begin_s[static_cast<size_t>(r)],
                    sc.end_s[static_cast<size_t>(r)])] =
          sc.vectors.row(r).transpose();
    }
    any = true;
  }
  if (!any) {
    throw InputError(StrCat("SidecarEmbeddingProvider: no ", prefix,
                            "*.emb files under ", dir));
  }
}

Eigen::VectorXd SidecarEmbeddingProvider::Compute(const AudioSession& channel,
                                                  double begin_s,
                                                  double end_s) const {
  if (channel.num_channels() != 1) {
    throw InputError("SidecarEmbeddingProvider: single channel expected");
  }
  const auto it =
      rows_.find(SpanKey(channel.channel_ids[0], begin_s, end_s));
  if (it == rows_.end()) {
    throw InputError(StrCat("SidecarEmbeddingProvider: no row for channel ",
                            channel.channel_ids[0], " span [", begin_s, ",",
                            end_s, "]"));
  }
  return it->second;
}

}  // namespace mcfd
