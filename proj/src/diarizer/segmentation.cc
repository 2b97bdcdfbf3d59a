// diarizer/segmentation.cc
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

#include <algorithm>
#include <cmath>

#include "mcfd/common.h"
#include "mcfd/diarizer.h"

namespace mcfd {

void ScaleConfig::Validate() const {
  if (scale_lengths_s.empty()) {
    throw InputError("ScaleConfig: at least one scale required");
  }
  for (size_t k = 1; k < scale_lengths_s.size(); ++k) {
    if (scale_lengths_s[k] >= scale_lengths_s[k - 1]) {
      throw InputError("ScaleConfig: scale lengths must be strictly decreasing");
    }
  }
  for (double len : scale_lengths_s) {
    if (len <= 0.0) throw InputError("ScaleConfig: scale lengths must be > 0");
  }
  if (overlap < 0.0 || overlap >= 1.0) {
    throw InputError("ScaleConfig: overlap must lie in [0,1)");
  }
  if (r_value <= 0.0) throw InputError("ScaleConfig: r_value must be > 0");
  if (finest_resolution_s <= 0.0) {
    throw InputError("ScaleConfig: finest_resolution_s must be > 0");
  }
}

std::vector<double> ScaleWeights(double r, int k) {
  if (r <= 0.0) throw InputError("ScaleWeights: r must be > 0");
  if (k < 2) throw InputError("ScaleWeights: need at least two scales");
  std::vector<double> w(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    w[static_cast<size_t>(i)] = r - ((r - 1.0) / (k - 1)) * i;
  }
  return w;
}

std::vector<SegmentGrid> MultiscaleSegment(
    const std::vector<TimeSpan>& speech_spans, const ScaleConfig& cfg) {
  cfg.Validate();
  for (size_t i = 0; i < speech_spans.size(); ++i) {
    if (speech_spans[i].duration() <= 0.0) {
      throw InputError("MultiscaleSegment: empty speech span");
    }
    if (i > 0 && speech_spans[i].begin_s < speech_spans[i - 1].end_s) {
      throw InputError("MultiscaleSegment: spans must be sorted and disjoint");
    }
  }

  std::vector<SegmentGrid> grids(static_cast<size_t>(cfg.num_scales()));
  for (int k = 0; k < cfg.num_scales(); ++k) {
    const double len = cfg.scale_lengths_s[static_cast<size_t>(k)];
    const double hop = len * (1.0 - cfg.overlap);
    SegmentGrid& grid = grids[static_cast<size_t>(k)];
    for (const TimeSpan& span : speech_spans) {
      if (span.duration() < len) {
        grid.bounds.push_back(span);
        continue;
      }
      double last_start = -1.0;
      for (double start = span.begin_s; start + len <= span.end_s + 1e-9;
           start += hop) {
        grid.bounds.push_back(TimeSpan{start, start + len});
        last_start = start;
      }
      const double tail_start = span.end_s - len;
      if (tail_start > last_start + 1e-9) {
        grid.bounds.push_back(TimeSpan{tail_start, span.end_s});
      }
    }
    grid.centers.reserve(grid.bounds.size());
    for (const TimeSpan& b : grid.bounds) {
      grid.centers.push_back(0.5 * (b.begin_s + b.end_s));
    }
  }
  return grids;
}

std::vector<int> NearestCenter(const std::vector<double>& centers,
                               const std::vector<double>& queries) {
  if (centers.empty()) throw InputError("NearestCenter: no centers");
  std::vector<int> out;
  out.reserve(queries.size());
  for (double q : queries) {
    const auto it = std::lower_bound(centers.begin(), centers.end(), q);
    if (it == centers.begin()) {
      out.push_back(0);
    } else if (it == centers.end()) {
      out.push_back(static_cast<int>(centers.size()) - 1);
    } else {
      const int hi = static_cast<int>(std::distance(centers.begin(), it));
      const int lo = hi - 1;
      out.push_back(q - centers[static_cast<size_t>(lo)] <=
                            centers[static_cast<size_t>(hi)] - q
                        ? lo
                        : hi);
    }
  }
  return out;
}

}  // namespace mcfd
