// hyperopt/importance.cc
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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mcfd/common.h"

namespace mcfd {

namespace {

// Average ranks with ties sharing the mean of their positions.
std::vector<double> Ranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&v](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    double mean_rank = 0.5 * (i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double Pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Numeric view of a parameter for rank statistics; categoricals use their
// choice index.
double ParamAsNumber(const ParamSpec& spec, const ParamValue& v) {
  if (v.is_number) return v.number;
  for (size_t i = 0; i < spec.choices.size(); ++i)
    if (spec.choices[i] == v.category) return static_cast<double>(i);
  return -1.0;
}

std::vector<const TrialRecord*> CompleteTrials(
    const std::vector<TrialRecord>& history) {
  std::vector<const TrialRecord*> out;
  for (const auto& t : history)
    if (t.status == TrialStatus::kComplete && std::isfinite(t.objective))
      out.push_back(&t);
  return out;
}

}  // namespace

double SpearmanCorrelation(const std::vector<double>& x,
                           const std::vector<double>& y) {
  if (x.size() != y.size())
    throw InputError("SpearmanCorrelation: length mismatch");
  if (x.size() < 2) return 0.0;
  return Pearson(Ranks(x), Ranks(y));
}

std::vector<std::pair<std::string, double>> ParamImportance(
    const ParamSpace& space, const std::vector<TrialRecord>& history) {
  space.Validate();
  std::vector<const TrialRecord*> done = CompleteTrials(history);
  if (done.size() < 20)
    throw InputError("ParamImportance: needs at least 20 complete trials");

  std::vector<double> objectives;
  objectives.reserve(done.size());
  for (const auto* t : done) objectives.push_back(t->objective);

  std::vector<std::pair<std::string, double>> out;
  double total = 0.0;
  for (const auto& p : space.params) {
    std::vector<double> values, obj_present;
    for (size_t i = 0; i < done.size(); ++i) {
      auto it = done[i]->params.find(p.name);
      if (it == done[i]->params.end()) continue;
      values.push_back(ParamAsNumber(p, it->second));
      obj_present.push_back(objectives[i]);
    }
    double imp = values.size() >= 2
                     ? std::abs(SpearmanCorrelation(values, obj_present))
                     : 0.0;
    out.push_back({p.name, imp});
    total += imp;
  }
  if (total > 0.0)
    for (auto& [name, imp] : out) imp /= total;
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return out;
}

void ExportParallelCoordinates(const std::string& path,
                               const ParamSpace& space,
                               const std::vector<TrialRecord>& history,
                               double band_lo, double band_hi) {
  space.Validate();
  if (band_lo > band_hi)
    throw InputError("ExportParallelCoordinates: empty highlight band");

  // Axes ordered by importance when enough trials completed.
  std::vector<std::string> columns;
  std::vector<const TrialRecord*> done = CompleteTrials(history);
  if (done.size() >= 20) {
    for (const auto& [name, imp] : ParamImportance(space, history))
      columns.push_back(name);
  } else {
    for (const auto& p : space.params) columns.push_back(p.name);
  }

  std::ofstream out(path);
  if (!out) throw Error(StrCat("ExportParallelCoordinates: cannot open ",
                               path));
  out << "trial_id";
  for (const auto& c : columns) out << "," << c;
  out << ",objective,highlight\n";
  for (const auto* t : done) {
    out << t->trial_id;
    for (const auto& c : columns) {
      out << ",";
      auto it = t->params.find(c);
      if (it == t->params.end()) continue;
      if (it->second.is_number) out << it->second.number;
      else out << it->second.category;
    }
    bool hot = t->objective >= band_lo && t->objective <= band_hi;
    out << "," << t->objective << "," << (hot ? 1 : 0) << "\n";
  }
  if (!out) throw Error(StrCat("ExportParallelCoordinates: write failed: ",
                               path));
}

}  // namespace mcfd
