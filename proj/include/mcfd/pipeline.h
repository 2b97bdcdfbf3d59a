// mcfd/pipeline.h
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

#ifndef MCFD_PIPELINE_H_
#define MCFD_PIPELINE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mcfd/config.h"
#include "mcfd/hyperopt.h"
#include "mcfd/manifest.h"
#include "mcfd/rttm.h"
#include "mcfd/scoring.h"

namespace mcfd {

struct PipelineOptions {
  std::string run_dir;      // required output directory
  int session_workers = 1;  // concurrent sessions
};

enum class FailureKind { kNone, kInput, kInternal };

struct SessionResult {
  std::string session_id;
  std::string subset;
  DiarSegments segments;
  std::vector<std::string> utterance_wavs;
  bool scored = false;
  ScoreReport report;
  FailureKind failure = FailureKind::kNone;
  std::string error;  // stage-tagged message when failed
};

struct PipelineResult {
  std::string run_dir;
  std::vector<SessionResult> sessions;  // manifest order
  std::map<std::string, ScoreReport> subset_reports;
  bool any_scored = false;
};

// Runs dereverberation, channel grouping, activity detection, diarization,
// separation, and scoring per session; a failing stage aborts only its
// session. The run directory receives a config snapshot, per-session
// artifacts (RTTM, utterance WAVs, score reports), aggregate reports, and a
// checksum list of everything written.
PipelineResult RunPipeline(const SessionManifest& manifest,
                           const PipelineConfig& config,
                           const PipelineOptions& opts);

// ---------------------------------------------------------------------------
// Optimizer coupling

struct ObjectiveSpec {
  SessionManifest manifest;
  PipelineConfig config;      // template patched per evaluation
  std::string metric = "der";  // der | jer | sa_wer | macro
  std::string work_dir;       // parent of per-evaluation run directories
  ParamSpace space;           // every name must address a config key
};

// Black-box evaluator: patches the assignment into the config template,
// runs every manifest session in an isolated run directory, and returns the
// macro-averaged metric across subsets. Unknown patch paths fail at
// construction time.
Objective MakeObjective(const ObjectiveSpec& spec);

// ---------------------------------------------------------------------------
// Plot data export

struct RunSummaryRow {
  std::string run_id;
  std::string subset;
  double der = 0.0;
  bool has_wer = false;
  double wer = 0.0;
};

// Reads <dir>/report.json of each run; unscored runs are skipped with a
// warning.
std::vector<RunSummaryRow> CollectRunSummaries(
    const std::vector<std::string>& run_dirs);

// CSV rows (run_id, der, wer, subset); wer empty when unavailable.
void ExportScatterCsv(const std::string& path,
                      const std::vector<RunSummaryRow>& rows);

// 64-bit FNV-1a over a file's bytes, for artifact integrity records.
std::uint64_t Fnv1a64File(const std::string& path);

}  // namespace mcfd

#endif  // MCFD_PIPELINE_H_
