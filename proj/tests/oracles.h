// tests/oracles.h
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
//
// Independent brute-force reference scorers. They discretize time on a fixed
// grid (every interval endpoint must be a grid multiple) and exhaust all
// injective speaker mappings instead of solving an assignment problem, so
// they share no code path with the production scorers.

#ifndef MCFD_TESTS_ORACLES_H_
#define MCFD_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mcfd/common.h"
#include "mcfd/rttm.h"

namespace mcfd::test {

namespace oracle_detail {

inline std::vector<std::string> SortedSpeakers(const DiarSegments& segs) {
  std::set<std::string> s;
  for (const auto& seg : segs) s.insert(seg.speaker);
  return {s.begin(), s.end()};
}

inline bool ActiveAt(const DiarSegments& segs, const std::string& speaker,
                     double t) {
  for (const auto& seg : segs)
    if (seg.speaker == speaker && seg.begin_s <= t && t < seg.end_s)
      return true;
  return false;
}

// Every injective partial map from [0, nh) into [0, nr); -1 = unmapped.
inline void EnumerateMaps(int nh, int nr, std::vector<int>& current,
                          std::vector<bool>& used,
                          std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == nh) {
    out.push_back(current);
    return;
  }
  current.push_back(-1);
  EnumerateMaps(nh, nr, current, used, out);
  current.pop_back();
  for (int r = 0; r < nr; ++r) {
    if (used[r]) continue;
    used[r] = true;
    current.push_back(r);
    EnumerateMaps(nh, nr, current, used, out);
    current.pop_back();
    used[r] = false;
  }
}

inline std::vector<std::vector<int>> AllInjectiveMaps(int nh, int nr) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::vector<bool> used(nr, false);
  EnumerateMaps(nh, nr, current, used, out);
  return out;
}

}  // namespace oracle_detail

struct OracleDer {
  double der = 0.0;
  double miss_s = 0.0;
  double fa_s = 0.0;
  double confusion_s = 0.0;
  double ref_speech_s = 0.0;
};

// Grid sweep: each grid cell is classified by its midpoint, cells inside a
// collar zone around any reference segment boundary are discarded, and the
// speaker mapping minimizing the total error is found by trying every
// injective hypothesis-to-reference map.
inline OracleDer BruteForceDer(const DiarSegments& ref, const DiarSegments& hyp,
                               double collar_s, bool score_overlap,
                               double grid_s = 0.01) {
  using namespace oracle_detail;
  auto ref_spk = SortedSpeakers(ref);
  auto hyp_spk = SortedSpeakers(hyp);
  const int nr = static_cast<int>(ref_spk.size());
  const int nh = static_cast<int>(hyp_spk.size());
  if (nr == 0) throw Error("BruteForceDer: empty reference");

  double end = 0.0;
  for (const auto& s : ref) end = std::max(end, s.end_s);
  for (const auto& s : hyp) end = std::max(end, s.end_s);
  end += collar_s + grid_s;
  const int cells = static_cast<int>(std::llround(end / grid_s));

  long long miss = 0, fa = 0, min_nrnh = 0, ref_speech = 0;
  std::vector<std::vector<long long>> pair_cells(
      nr, std::vector<long long>(nh, 0));

  for (int i = 0; i < cells; ++i) {
    double t = (i + 0.5) * grid_s;
    bool in_collar = false;
    for (const auto& seg : ref) {
      if (std::abs(t - seg.begin_s) <= collar_s ||
          std::abs(t - seg.end_s) <= collar_s) {
        in_collar = true;
        break;
      }
    }
    if (in_collar) continue;

    std::vector<int> active_r, active_h;
    for (int r = 0; r < nr; ++r)
      if (ActiveAt(ref, ref_spk[r], t)) active_r.push_back(r);
    for (int h = 0; h < nh; ++h)
      if (ActiveAt(hyp, hyp_spk[h], t)) active_h.push_back(h);
    if (!score_overlap && active_r.size() >= 2) continue;

    long long cr = static_cast<long long>(active_r.size());
    long long ch = static_cast<long long>(active_h.size());
    miss += std::max(0LL, cr - ch);
    fa += std::max(0LL, ch - cr);
    min_nrnh += std::min(cr, ch);
    ref_speech += cr;
    for (int r : active_r)
      for (int h : active_h) ++pair_cells[r][h];
  }

  long long best_correct = 0;
  for (const auto& m : AllInjectiveMaps(nh, nr)) {
    long long correct = 0;
    for (int h = 0; h < nh; ++h)
      if (m[h] >= 0) correct += pair_cells[m[h]][h];
    best_correct = std::max(best_correct, correct);
  }

  OracleDer out;
  out.miss_s = static_cast<double>(miss) * grid_s;
  out.fa_s = static_cast<double>(fa) * grid_s;
  out.confusion_s = static_cast<double>(min_nrnh - best_correct) * grid_s;
  out.ref_speech_s = static_cast<double>(ref_speech) * grid_s;
  if (ref_speech <= 0) throw Error("BruteForceDer: no scored speech");
  out.der = (out.miss_s + out.fa_s + out.confusion_s) / out.ref_speech_s;
  return out;
}

// All Jaccard error means attainable by intersection-maximizing mappings.
// The production scorer must land on one of them: when the maximizer is
// unique (the usual case) the set has a single member.
inline std::vector<double> BruteForceJerCandidates(const DiarSegments& ref,
                                                   const DiarSegments& hyp,
                                                   double grid_s = 0.01) {
  using namespace oracle_detail;
  auto ref_spk = SortedSpeakers(ref);
  auto hyp_spk = SortedSpeakers(hyp);
  const int nr = static_cast<int>(ref_spk.size());
  const int nh = static_cast<int>(hyp_spk.size());
  if (nr == 0) throw Error("BruteForceJerCandidates: empty reference");

  double end = 0.0;
  for (const auto& s : ref) end = std::max(end, s.end_s);
  for (const auto& s : hyp) end = std::max(end, s.end_s);
  end += grid_s;
  const int cells = static_cast<int>(std::llround(end / grid_s));

  std::vector<long long> ref_cells(nr, 0), hyp_cells(nh, 0);
  std::vector<std::vector<long long>> inter(nr, std::vector<long long>(nh, 0));
  for (int i = 0; i < cells; ++i) {
    double t = (i + 0.5) * grid_s;
    std::vector<int> active_r, active_h;
    for (int r = 0; r < nr; ++r)
      if (ActiveAt(ref, ref_spk[r], t)) {
        active_r.push_back(r);
        ++ref_cells[r];
      }
    for (int h = 0; h < nh; ++h)
      if (ActiveAt(hyp, hyp_spk[h], t)) {
        active_h.push_back(h);
        ++hyp_cells[h];
      }
    for (int r : active_r)
      for (int h : active_h) ++inter[r][h];
  }

  // Maps are hyp -> ref; invert the direction by scanning per map.
  long long best_total = -1;
  std::vector<std::vector<int>> maximizers;
  for (const auto& m : AllInjectiveMaps(nh, nr)) {
    long long total = 0;
    for (int h = 0; h < nh; ++h)
      if (m[h] >= 0) total += inter[m[h]][h];
    if (total > best_total) {
      best_total = total;
      maximizers.clear();
    }
    if (total == best_total) maximizers.push_back(m);
  }

  std::vector<double> candidates;
  for (const auto& m : maximizers) {
    std::vector<int> ref_partner(nr, -1);
    for (int h = 0; h < nh; ++h)
      if (m[h] >= 0) ref_partner[m[h]] = h;
    double sum = 0.0;
    for (int r = 0; r < nr; ++r) {
      int h = ref_partner[r];
      double jer_r = 1.0;
      if (ref_cells[r] == 0) {
        jer_r = 0.0;  // degenerate empty timeline
      } else if (h >= 0 && inter[r][h] > 0) {
        double uni = static_cast<double>(ref_cells[r] + hyp_cells[h] -
                                         inter[r][h]);
        jer_r = 1.0 - static_cast<double>(inter[r][h]) / uni;
      }
      sum += jer_r;
    }
    candidates.push_back(sum / nr);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  return candidates;
}

// Word-level edit distance, total errors only.
inline int PlainEditErrors(const std::vector<std::string>& a,
                           const std::vector<std::string>& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  std::vector<int> prev(m + 1), cur(m + 1);
  for (int j = 0; j <= m; ++j) prev[j] = j;
  for (int i = 1; i <= n; ++i) {
    cur[0] = i;
    for (int j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Minimum attainable total word errors over every injective speaker map;
// speakers' word sequences arrive pre-concatenated.
inline double BruteForceSaWer(
    const std::map<std::string, std::vector<std::string>>& ref_words,
    const std::map<std::string, std::vector<std::string>>& hyp_words) {
  using namespace oracle_detail;
  std::vector<const std::vector<std::string>*> rw, hw;
  for (const auto& [name, words] : ref_words) rw.push_back(&words);
  for (const auto& [name, words] : hyp_words) hw.push_back(&words);
  const int nr = static_cast<int>(rw.size());
  const int nh = static_cast<int>(hw.size());

  long long ref_total = 0;
  for (const auto* w : rw) ref_total += static_cast<long long>(w->size());
  if (ref_total == 0) throw Error("BruteForceSaWer: no reference words");

  long long best = -1;
  for (const auto& m : AllInjectiveMaps(nh, nr)) {
    long long errors = 0;
    std::vector<bool> ref_used(nr, false);
    for (int h = 0; h < nh; ++h) {
      if (m[h] >= 0) {
        ref_used[m[h]] = true;
        errors += PlainEditErrors(*rw[m[h]], *hw[h]);
      } else {
        errors += static_cast<long long>(hw[h]->size());  // pure insertions
      }
    }
    for (int r = 0; r < nr; ++r)
      if (!ref_used[r]) errors += static_cast<long long>(rw[r]->size());
    if (best < 0 || errors < best) best = errors;
  }
  return static_cast<double>(best) / static_cast<double>(ref_total);
}

}  // namespace mcfd::test

#endif  // MCFD_TESTS_ORACLES_H_
