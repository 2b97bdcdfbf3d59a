// scoring/sawer.cc
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
#include <numeric>

#include "mcfd/common.h"
#include "mcfd/hungarian.h"

namespace mcfd {

WerCounts LevenshteinWords(const std::vector<std::string>& ref,
                           const std::vector<std::string>& hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<int> dp((n + 1) * (m + 1));
  auto at = [m, &dp](size_t i, size_t j) -> int& {
    return dp[i * (m + 1) + j];
  };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j) {
      int sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int del = at(i - 1, j) + 1;
      int ins = at(i, j - 1) + 1;
      at(i, j) = std::min({sub, del, ins});
    }

  // Backtrace; ties prefer substitution, then deletion, then insertion.
  WerCounts c;
  c.ref_words = static_cast<int>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
        at(i, j) == at(i - 1, j - 1)) {
      --i; --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      ++c.substitutions;
      --i; --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++c.deletions;
      --i;
    } else {
      ++c.insertions;
      --j;
    }
  }
  return c;
}

namespace {

// Time-ordered concatenation of a speaker's utterances, normalized.
std::vector<std::string> SpeakerWords(std::vector<Utterance> utts) {
  std::stable_sort(utts.begin(), utts.end(),
                   [](const Utterance& a, const Utterance& b) {
                     if (a.begin_s != b.begin_s) return a.begin_s < b.begin_s;
                     return a.end_s < b.end_s;
                   });
  std::string joined;
  for (const auto& u : utts) {
    if (!joined.empty()) joined.push_back(' ');
    joined += u.text;
  }
  return SplitWords(NormalizeText(joined));
}

}  // namespace

SaWerResult ComputeSaWer(const SpeakerTranscripts& ref,
                         const SpeakerTranscripts& hyp) {
  if (ref.empty()) throw InputError("ComputeSaWer: empty reference");

  std::vector<std::string> ref_names, hyp_names;
  std::vector<std::vector<std::string>> ref_words, hyp_words;
  for (const auto& [name, utts] : ref) {
    ref_names.push_back(name);
    ref_words.push_back(SpeakerWords(utts));
  }
  for (const auto& [name, utts] : hyp) {
    hyp_names.push_back(name);
    hyp_words.push_back(SpeakerWords(utts));
  }

  size_t total_ref_words = 0;
  for (const auto& w : ref_words) total_ref_words += w.size();
  if (total_ref_words == 0)
    throw InputError("ComputeSaWer: reference has no words");

  const size_t nr = ref_names.size(), nh = hyp_names.size();
  const size_t n = std::max(nr, nh);

  // Square cost matrix where pairing an unmatched reference speaker with a
  // dummy hypothesis costs all its words as deletions and vice versa, so the
  // minimum assignment minimizes the total error count.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<WerCounts>> pair_counts(
      nr, std::vector<WerCounts>(nh));
  for (size_t r = 0; r < n; ++r)
    for (size_t h = 0; h < n; ++h) {
      if (r < nr && h < nh) {
        pair_counts[r][h] = LevenshteinWords(ref_words[r], hyp_words[h]);
        cost(r, h) = pair_counts[r][h].errors();
      } else if (r < nr) {
        cost(r, h) = static_cast<double>(ref_words[r].size());
      } else if (h < nh) {
        cost(r, h) = static_cast<double>(hyp_words[h].size());
      }
    }

  std::vector<int> match = HungarianMin(cost);

  SaWerResult res;
  res.counts.ref_words = static_cast<int>(total_ref_words);
  std::vector<bool> hyp_matched(nh, false);
  for (size_t r = 0; r < nr; ++r) {
    int h = match[r];
    if (h >= 0 && static_cast<size_t>(h) < nh) {
      const WerCounts& c = pair_counts[r][h];
      res.counts.substitutions += c.substitutions;
      res.counts.insertions += c.insertions;
      res.counts.deletions += c.deletions;
      res.ref_to_hyp[ref_names[r]] = hyp_names[h];
      hyp_matched[h] = true;
    } else {
      res.counts.deletions += static_cast<int>(ref_words[r].size());
    }
  }
  for (size_t h = 0; h < nh; ++h)
    if (!hyp_matched[h])
      res.counts.insertions += static_cast<int>(hyp_words[h].size());
  return res;
}

double MacroAverage(const std::vector<double>& values) {
  if (values.empty()) throw InputError("MacroAverage: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace mcfd
