// scoring/timeline.cc
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

#include "mcfd/scoring.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "mcfd/common.h"
#include "mcfd/hungarian.h"

namespace mcfd {

namespace {

using Interval = std::pair<double, double>;

constexpr double kTimeEps = 1e-9;

void ValidateSegments(const DiarSegments& segs, const char* what) {
  for (const auto& s : segs) {
    if (!(s.end_s >= s.begin_s))
      throw InputError(StrCat(what, ": segment with negative duration"));
    if (s.speaker.empty())
      throw InputError(StrCat(what, ": segment with empty speaker"));
  }
}

// Sorted, pairwise disjoint union of the input intervals.
std::vector<Interval> MergeIntervals(std::vector<Interval> v) {
  std::sort(v.begin(), v.end());
  std::vector<Interval> out;
  for (const auto& iv : v) {
    if (iv.second - iv.first <= kTimeEps) continue;
    if (!out.empty() && iv.first <= out.back().second + kTimeEps) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::vector<std::string> SpeakerNames(const DiarSegments& segs) {
  std::set<std::string> names;
  for (const auto& s : segs) names.insert(s.speaker);
  return std::vector<std::string>(names.begin(), names.end());
}

// Per-speaker merged speech timelines, in SpeakerNames order.
std::vector<std::vector<Interval>> SpeakerTimelines(
    const DiarSegments& segs, const std::vector<std::string>& names) {
  std::vector<std::vector<Interval>> raw(names.size());
  for (const auto& s : segs) {
    size_t i = std::lower_bound(names.begin(), names.end(), s.speaker) -
               names.begin();
    raw[i].push_back({s.begin_s, s.end_s});
  }
  std::vector<std::vector<Interval>> out(names.size());
  for (size_t i = 0; i < names.size(); ++i) out[i] = MergeIntervals(raw[i]);
  return out;
}

bool CoversPoint(const std::vector<Interval>& timeline, double t) {
  auto it = std::upper_bound(timeline.begin(), timeline.end(), t,
                             [](double x, const Interval& iv) {
                               return x < iv.first;
                             });
  if (it == timeline.begin()) return false;
  --it;
  return t < it->second;
}

double TotalDuration(const std::vector<Interval>& v) {
  double d = 0.0;
  for (const auto& iv : v) d += iv.second - iv.first;
  return d;
}

// Total overlap of two disjoint-sorted interval lists.
double IntersectDuration(const std::vector<Interval>& a,
                         const std::vector<Interval>& b) {
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].first, b[j].first);
    double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) d += hi - lo;
    if (a[i].second < b[j].second) ++i; else ++j;
  }
  return d;
}

struct ScoredInterval {
  double duration = 0.0;
  std::vector<int> ref_active;
  std::vector<int> hyp_active;
};

// Cuts the session at every segment and collar boundary and keeps the
// homogeneous pieces that are scored: outside every collar zone and, when
// overlap is not scored, carrying at most one reference speaker.
std::vector<ScoredInterval> BuildScoredIntervals(
    const std::vector<std::vector<Interval>>& ref_tl,
    const std::vector<std::vector<Interval>>& hyp_tl,
    const std::vector<Interval>& collars, bool score_overlap) {
  std::vector<double> cuts;
  auto add_list = [&cuts](const std::vector<std::vector<Interval>>& tls) {
    for (const auto& tl : tls)
      for (const auto& iv : tl) {
        cuts.push_back(iv.first);
        cuts.push_back(iv.second);
      }
  };
  add_list(ref_tl);
  add_list(hyp_tl);
  for (const auto& iv : collars) {
    cuts.push_back(iv.first);
    cuts.push_back(iv.second);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) {
                           return std::abs(a - b) <= kTimeEps;
                         }),
             cuts.end());

  std::vector<ScoredInterval> out;
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    double t0 = cuts[c], t1 = cuts[c + 1];
    if (t1 - t0 <= kTimeEps) continue;
    double mid = 0.5 * (t0 + t1);
    if (CoversPoint(collars, mid)) continue;
    ScoredInterval si;
    si.duration = t1 - t0;
    for (size_t r = 0; r < ref_tl.size(); ++r)
      if (CoversPoint(ref_tl[r], mid)) si.ref_active.push_back((int)r);
    for (size_t h = 0; h < hyp_tl.size(); ++h)
      if (CoversPoint(hyp_tl[h], mid)) si.hyp_active.push_back((int)h);
    if (!score_overlap && si.ref_active.size() >= 2) continue;
    if (si.ref_active.empty() && si.hyp_active.empty()) continue;
    out.push_back(std::move(si));
  }
  return out;
}

}  // namespace

DerResult ComputeDer(const DiarSegments& ref, const DiarSegments& hyp,
                     const DerOptions& opts) {
  if (ref.empty()) throw InputError("ComputeDer: empty reference");
  if (opts.collar_s < 0.0) throw InputError("ComputeDer: negative collar");
  ValidateSegments(ref, "ComputeDer reference");
  ValidateSegments(hyp, "ComputeDer hypothesis");

  std::vector<std::string> ref_names = SpeakerNames(ref);
  std::vector<std::string> hyp_names = SpeakerNames(hyp);
  auto ref_tl = SpeakerTimelines(ref, ref_names);
  auto hyp_tl = SpeakerTimelines(hyp, hyp_names);

  // No-score zones are anchored on reference boundaries only.
  std::vector<Interval> collars;
  if (opts.collar_s > 0.0) {
    for (const auto& s : ref) {
      collars.push_back({s.begin_s - opts.collar_s, s.begin_s + opts.collar_s});
      collars.push_back({s.end_s - opts.collar_s, s.end_s + opts.collar_s});
    }
    collars = MergeIntervals(std::move(collars));
  }

  std::vector<ScoredInterval> scored =
      BuildScoredIntervals(ref_tl, hyp_tl, collars, opts.score_overlap);

  // Speaker mapping maximizing scored overlap, which minimizes the error.
  DerResult res;
  std::vector<int> hyp_of_ref(ref_names.size(), -1);
  if (!hyp_names.empty()) {
    Eigen::MatrixXd overlap =
        Eigen::MatrixXd::Zero(ref_names.size(), hyp_names.size());
    for (const auto& si : scored)
      for (int r : si.ref_active)
        for (int h : si.hyp_active) overlap(r, h) += si.duration;
    hyp_of_ref = HungarianMax(overlap);
    for (size_t r = 0; r < ref_names.size(); ++r) {
      int h = hyp_of_ref[r];
      if (h >= 0 && overlap(r, h) > 0.0)
        res.hyp_to_ref[hyp_names[h]] = ref_names[r];
      else
        hyp_of_ref[r] = -1;
    }
  }

  for (const auto& si : scored) {
    double nr = si.ref_active.size();
    double nh = si.hyp_active.size();
    int correct = 0;
    for (int r : si.ref_active) {
      int h = hyp_of_ref[r];
      if (h >= 0 &&
          std::find(si.hyp_active.begin(), si.hyp_active.end(), h) !=
              si.hyp_active.end())
        ++correct;
    }
    res.ref_speech_s += si.duration * nr;
    res.miss_s += si.duration * std::max(0.0, nr - nh);
    res.fa_s += si.duration * std::max(0.0, nh - nr);
    res.confusion_s += si.duration * (std::min(nr, nh) - correct);
  }

  if (res.ref_speech_s <= 0.0)
    throw InputError("ComputeDer: no scored reference speech");
  res.der = (res.miss_s + res.fa_s + res.confusion_s) / res.ref_speech_s;
  return res;
}

JerResult ComputeJer(const DiarSegments& ref, const DiarSegments& hyp) {
  if (ref.empty()) throw InputError("ComputeJer: empty reference");
  ValidateSegments(ref, "ComputeJer reference");
  ValidateSegments(hyp, "ComputeJer hypothesis");

  std::vector<std::string> ref_names = SpeakerNames(ref);
  std::vector<std::string> hyp_names = SpeakerNames(hyp);
  auto ref_tl = SpeakerTimelines(ref, ref_names);
  auto hyp_tl = SpeakerTimelines(hyp, hyp_names);

  JerResult res;
  std::vector<int> hyp_of_ref(ref_names.size(), -1);
  Eigen::MatrixXd inter(ref_names.size(),
                        std::max<size_t>(hyp_names.size(), 1));
  inter.setZero();
  if (!hyp_names.empty()) {
    for (size_t r = 0; r < ref_names.size(); ++r)
      for (size_t h = 0; h < hyp_names.size(); ++h)
        inter(r, h) = IntersectDuration(ref_tl[r], hyp_tl[h]);
    hyp_of_ref = HungarianMax(inter);
  }

  double total = 0.0;
  for (size_t r = 0; r < ref_names.size(); ++r) {
    int h = hyp_of_ref[r];
    double jer_r = 1.0;
    if (h >= 0 && inter(r, h) > 0.0) {
      double isect = inter(r, h);
      double uni = TotalDuration(ref_tl[r]) + TotalDuration(hyp_tl[h]) - isect;
      jer_r = uni > kTimeEps ? 1.0 - isect / uni : 0.0;
      res.ref_to_hyp[ref_names[r]] = hyp_names[h];
    }
    res.per_ref_speaker[ref_names[r]] = jer_r;
    total += jer_r;
  }
  res.jer = total / ref_names.size();
  return res;
}

}  // namespace mcfd
