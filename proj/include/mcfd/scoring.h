// mcfd/scoring.h
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

#ifndef MCFD_SCORING_H_
#define MCFD_SCORING_H_

#include <map>
#include <string>
#include <vector>

#include "mcfd/rttm.h"

namespace mcfd {

// ---------------------------------------------------------------------------
// Diarization metrics

struct DerOptions {
  double collar_s = 0.25;     // no-score zone around reference boundaries
  bool score_overlap = true;  // false drops overlapped reference regions
};

struct DerResult {
  double der = 0.0;
  double miss_s = 0.0;
  double fa_s = 0.0;
  double confusion_s = 0.0;
  double ref_speech_s = 0.0;  // scored reference speaker-seconds
  std::map<std::string, std::string> hyp_to_ref;
};

// Timeline diarization error: the session is cut at every segment and collar
// boundary into homogeneous intervals; hypothesis speakers are mapped to
// reference speakers by a maximum-overlap assignment (which also minimizes
// the resulting error); miss, false alarm and confusion are integrated over
// the scored intervals. der = (miss + fa + confusion) / ref_speech_s.
DerResult ComputeDer(const DiarSegments& ref, const DiarSegments& hyp,
                     const DerOptions& opts = {});

struct JerResult {
  double jer = 0.0;
  std::map<std::string, double> per_ref_speaker;  // 1 - IoU each
  std::map<std::string, std::string> ref_to_hyp;
};

// Mean per-reference-speaker Jaccard error of the speech timelines under the
// intersection-maximizing speaker mapping; no collar, overlap always scored.
// An unmatched reference speaker contributes 1.
JerResult ComputeJer(const DiarSegments& ref, const DiarSegments& hyp);

// ---------------------------------------------------------------------------
// Text and attributed word errors

// Lowercases, strips the U+2047 placeholder, collapses whitespace, trims,
// and rewrites the standalone token "aw" to "oh" (never inside words).
std::string NormalizeText(const std::string& s);

std::vector<std::string> SplitWords(const std::string& s);

struct WerCounts {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_words = 0;

  int errors() const { return substitutions + insertions + deletions; }
  double wer() const {
    return ref_words > 0 ? static_cast<double>(errors()) / ref_words : 0.0;
  }
};

// Word-level edit distance with error-type counts.
WerCounts LevenshteinWords(const std::vector<std::string>& ref,
                           const std::vector<std::string>& hyp);

// One utterance of one speaker; words are raw text, normalized on scoring.
struct Utterance {
  double begin_s = 0.0;
  double end_s = 0.0;
  std::string text;
};

using SpeakerTranscripts = std::map<std::string, std::vector<Utterance>>;

struct SaWerResult {
  WerCounts counts;
  std::map<std::string, std::string> ref_to_hyp;

  double wer() const { return counts.wer(); }
};

// Speaker-attributed word error: per speaker, utterances are concatenated in
// time order and normalized; speakers are paired by the minimum-total-edit-
// distance assignment; unmatched hypothesis speakers count as insertions and
// unmatched reference speakers as deletions. WER = errors / reference words.
SaWerResult ComputeSaWer(const SpeakerTranscripts& ref,
                         const SpeakerTranscripts& hyp);

// Unweighted mean over subsets.
double MacroAverage(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Reports

struct ScoreReport {
  double der = 0.0;
  double jer = 0.0;
  double wer = 0.0;
  double miss_s = 0.0;
  double fa_s = 0.0;
  double confusion_s = 0.0;
  double ref_speech_s = 0.0;
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int ref_words = 0;
  bool has_wer = false;  // transcripts are optional
};

// JSON report: {"subsets": {...}, "macro": {...}}. Macro row = unweighted
// means of the subset fractions.
void WriteScoreReportJson(const std::string& path,
                          const std::map<std::string, ScoreReport>& subsets);

// Fixed-width text table, one row per subset plus the macro row.
void WriteScoreTable(const std::string& path,
                     const std::map<std::string, ScoreReport>& subsets);

// Transcript manifest: JSON lines of
// {session_id, speaker, start_time, end_time, words}.
std::map<std::string, SpeakerTranscripts> ReadTranscriptManifest(
    const std::string& path);
void WriteTranscriptManifest(
    const std::string& path,
    const std::map<std::string, SpeakerTranscripts>& by_session);

}  // namespace mcfd

#endif  // MCFD_SCORING_H_
