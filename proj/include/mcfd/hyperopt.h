// mcfd/hyperopt.h
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

#ifndef MCFD_HYPEROPT_H_
#define MCFD_HYPEROPT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mcfd {

// ---------------------------------------------------------------------------
// Search space

enum class ParamKind { kFloat, kInt, kCategorical };

struct ParamSpec {
  std::string name;  // dotted config path, e.g. "diarizer.r_value"
  ParamKind kind = ParamKind::kFloat;
  double low = 0.0;   // numeric bounds, inclusive
  double high = 1.0;
  bool log_scale = false;
  std::vector<std::string> choices;  // categorical only
};

struct ParamSpace {
  std::vector<ParamSpec> params;

  const ParamSpec* Find(const std::string& name) const;
  void Validate() const;
};

// The tunable pipeline parameters with their default bounds.
ParamSpace DefaultParamSpace();

struct ParamValue {
  bool is_number = true;
  double number = 0.0;
  std::string category;
};

inline ParamValue NumberValue(double v) { return {true, v, {}}; }
inline ParamValue CategoryValue(std::string c) {
  return {false, 0.0, std::move(c)};
}
bool operator==(const ParamValue& a, const ParamValue& b);

using Assignment = std::map<std::string, ParamValue>;

// ---------------------------------------------------------------------------
// Trials

enum class TrialStatus { kComplete, kFailed, kPruned };

struct TrialRecord {
  int trial_id = 0;
  Assignment params;
  double objective = 0.0;  // finite iff status == kComplete
  TrialStatus status = TrialStatus::kFailed;
  double wall_time_s = 0.0;
};

// Append-only JSON-lines trial store.
void AppendTrial(const std::string& path, const TrialRecord& record);
std::vector<TrialRecord> ReadTrialStore(const std::string& path);

// ---------------------------------------------------------------------------
// Samplers

// Independent uniform draws (uniform in the exponent on log-scale params),
// reproducible for a fixed (seed, draw_index).
Assignment SuggestRandom(const ParamSpace& space, std::uint64_t seed,
                         std::size_t draw_index);

struct TpeOptions {
  double gamma = 0.25;    // good/bad split quantile
  int n_candidates = 24;  // candidates drawn from the good density
  int n_startup = 10;     // random trials before the model kicks in
};

// Tree-structured Parzen estimator step: split completed history at the
// gamma quantile, fit good/bad densities per parameter (Gaussian kernels
// with Scott bandwidth plus a uniform prior component; smoothed counts for
// categoricals), draw candidates from the good density and keep the one
// maximizing the good/bad density ratio. Falls back to random sampling
// while fewer than n_startup trials are complete.
Assignment SuggestTpe(const ParamSpace& space,
                      const std::vector<TrialRecord>& history,
                      const TpeOptions& opts, std::uint64_t seed,
                      std::size_t draw_index);

// ---------------------------------------------------------------------------
// Studies

enum class StudyStrategy { kEndToEnd, kCascaded };

struct StageConfig {
  std::string name;
  std::vector<std::string> active;  // parameters sampled in this stage
  int n_trials = 0;
};

struct StudyConfig {
  StudyStrategy strategy = StudyStrategy::kEndToEnd;
  std::vector<StageConfig> stages;  // cascaded: required; end-to-end: ignored
  int n_trials = 100;               // end-to-end trial budget
  int parallelism = 1;
  std::uint64_t seed = 17;
  std::string sampler = "tpe";  // "tpe" or "random"
  TpeOptions tpe;
  std::string store_path;  // JSONL store; empty keeps history in memory
  Assignment defaults;     // values for parameters frozen in a stage
};

using Objective = std::function<double(const Assignment&)>;

struct StudyResult {
  std::vector<TrialRecord> history;
  TrialRecord best;  // lowest objective among complete trials
};

// Runs the optimization loop: suggest, evaluate (at most `parallelism`
// concurrently), record. An existing store is resumed: only the remaining
// trial budget is evaluated. Evaluator exceptions and non-finite returns
// mark the trial failed; the study continues. Every trial is appended to
// the store before the next suggestion that depends on it.
StudyResult RunStudy(const StudyConfig& cfg, const ParamSpace& space,
                     const Objective& objective);

// Search-space description file:
// {"params": [{"name": "...", "kind": "float|int|categorical",
//              "low": ..., "high": ..., "log": false, "choices": [...]}],
//  "stages": [{"name": "...", "active": ["..."], "trials": N}]}.
// Stages are optional and only used by the cascaded strategy.
struct SpaceFile {
  ParamSpace space;
  std::vector<StageConfig> stages;
};

SpaceFile ReadSpaceFile(const std::string& path);

// ---------------------------------------------------------------------------
// Analysis

// Absolute Spearman rank correlation of each parameter with the objective
// over complete trials, normalized to sum 1 (all zero for a constant
// objective). Requires at least 20 complete trials. Sorted descending.
std::vector<std::pair<std::string, double>> ParamImportance(
    const ParamSpace& space, const std::vector<TrialRecord>& history);

// Rank correlation with average ranks on ties; 0 when either input is
// constant.
double SpearmanCorrelation(const std::vector<double>& x,
                           const std::vector<double>& y);

// CSV with one row per complete trial: trial_id, parameter columns,
// objective, and a highlight flag for objectives inside [band_lo, band_hi].
// Parameter columns are ordered by importance when computable.
void ExportParallelCoordinates(const std::string& path,
                               const ParamSpace& space,
                               const std::vector<TrialRecord>& history,
                               double band_lo = 33.2, double band_hi = 34.5);

}  // namespace mcfd

#endif  // MCFD_HYPEROPT_H_
