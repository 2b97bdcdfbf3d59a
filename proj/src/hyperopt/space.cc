// hyperopt/space.cc
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

#include "mcfd/hyperopt.h"

#include <cmath>
#include <random>
#include <set>

#include "mcfd/common.h"

namespace mcfd {

const ParamSpec* ParamSpace::Find(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

void ParamSpace::Validate() const {
  std::set<std::string> seen;
  for (const auto& p : params) {
    if (p.name.empty()) throw InputError("ParamSpace: unnamed parameter");
    if (!seen.insert(p.name).second)
      throw InputError(StrCat("ParamSpace: duplicate parameter ", p.name));
    if (p.kind == ParamKind::kCategorical) {
      if (p.choices.empty())
        throw InputError(StrCat("ParamSpace: no choices for ", p.name));
      continue;
    }
    if (!std::isfinite(p.low) || !std::isfinite(p.high) || p.low > p.high)
      throw InputError(StrCat("ParamSpace: bad bounds for ", p.name));
    if (p.log_scale && p.low <= 0.0)
      throw InputError(
          StrCat("ParamSpace: log scale needs positive bounds for ", p.name));
    if (p.kind == ParamKind::kInt &&
        (p.low != std::floor(p.low) || p.high != std::floor(p.high)))
      throw InputError(StrCat("ParamSpace: non-integer bounds for ", p.name));
  }
}

ParamSpace DefaultParamSpace() {
  ParamSpace s;
  auto add = [&s](const std::string& name, ParamKind kind, double lo,
                  double hi, bool log_scale = false) {
    ParamSpec p;
    p.name = name;
    p.kind = kind;
    p.low = lo;
    p.high = hi;
    p.log_scale = log_scale;
    s.params.push_back(std::move(p));
  };
  add("asr.lm_beam_size", ParamKind::kInt, 1, 16);
  add("diarizer.r_value", ParamKind::kFloat, 0.5, 2.5);
  add("diarizer.global_average_mix_ratio", ParamKind::kFloat, 0.0, 1.0);
  add("diarizer.global_average_window_length_s", ParamKind::kFloat, 30.0,
      600.0);
  add("gssfe.mc_postmask_min_db", ParamKind::kFloat, -30.0, 0.0);
  add("diarizer.pad_onset", ParamKind::kFloat, 0.0, 0.5);
  add("diarizer.sigmoid_threshold", ParamKind::kFloat, 0.3, 0.9);
  add("diarizer.pad_offset", ParamKind::kFloat, 0.0, 0.5);
  add("diarizer.min_duration_on", ParamKind::kFloat, 0.0, 1.0);
  add("diarizer.min_duration_off", ParamKind::kFloat, 0.0, 1.0);
  add("vad.drop_threshold", ParamKind::kFloat, 0.0, 0.5);
  s.Validate();
  return s;
}

bool operator==(const ParamValue& a, const ParamValue& b) {
  if (a.is_number != b.is_number) return false;
  return a.is_number ? a.number == b.number : a.category == b.category;
}

namespace {

double DrawNumeric(const ParamSpec& p, std::mt19937_64& rng) {
  double lo = p.low, hi = p.high;
  if (p.log_scale) {
    lo = std::log(lo);
    hi = std::log(hi);
  }
  double x = std::uniform_real_distribution<double>(lo, hi)(rng);
  if (p.log_scale) x = std::exp(x);
  if (p.kind == ParamKind::kInt) x = std::round(x);
  return std::min(std::max(x, p.low), p.high);
}

}  // namespace

Assignment SuggestRandom(const ParamSpace& space, std::uint64_t seed,
                         std::size_t draw_index) {
  space.Validate();
  std::mt19937_64 rng(MixSeed(seed, draw_index));
  Assignment a;
  for (const auto& p : space.params) {
    if (p.kind == ParamKind::kCategorical) {
      std::uniform_int_distribution<std::size_t> d(0, p.choices.size() - 1);
      a[p.name] = CategoryValue(p.choices[d(rng)]);
    } else {
      a[p.name] = NumberValue(DrawNumeric(p, rng));
    }
  }
  return a;
}

}  // namespace mcfd
