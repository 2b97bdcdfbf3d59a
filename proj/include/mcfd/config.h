// mcfd/config.h
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

#ifndef MCFD_CONFIG_H_
#define MCFD_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcfd/chanclust.h"
#include "mcfd/diarizer.h"
#include "mcfd/frontend.h"
#include "mcfd/scoring.h"
#include "mcfd/vad.h"
#include "mcfd/wpe.h"

namespace mcfd {

// Hierarchical run configuration. Every key is pre-declared by the default
// template: loading or setting an unknown key fails, so typos cannot
// silently fall back to defaults. Leaves are addressed by dotted paths
// ("diarizer.r_value") for both environment overrides (MCFD_DIARIZER_R_VALUE)
// and optimizer patching.
class PipelineConfig {
 public:
  PipelineConfig();  // all defaults

  // Parses JSON text and overlays it on the defaults; unknown keys or type
  // mismatches are errors.
  static PipelineConfig FromJsonText(const std::string& text);
  // Reads a JSON file and applies MCFD_* environment overrides on top.
  static PipelineConfig Load(const std::string& path);

  // Applies MCFD_<DOTTED_PATH_UPPERCASED> environment variables to matching
  // leaves (numbers, booleans, and strings).
  void ApplyEnvOverrides();

  bool HasPath(const std::string& dotted) const;
  double GetNumber(const std::string& dotted) const;
  bool GetBool(const std::string& dotted) const;
  std::string GetString(const std::string& dotted) const;
  std::vector<double> GetNumberList(const std::string& dotted) const;

  void SetNumber(const std::string& dotted, double v);
  void SetBool(const std::string& dotted, bool v);
  void SetString(const std::string& dotted, const std::string& v);
  void SetNumberList(const std::string& dotted, const std::vector<double>& v);

  std::uint64_t seed() const;
  int num_workers() const;

  std::string ToJsonText() const;  // pretty snapshot for run directories

  // Typed views consumed by the stages.
  ChannelClusterOptions MakeChanclustOptions() const;
  WpeConfig MakeWpeConfig() const;
  EnergyVadOptions MakeVadOptions() const;
  DiarizerOptions MakeDiarizerOptions(const std::string& session_id) const;
  FrontendConfig MakeFrontendConfig() const;
  DerOptions MakeDerOptions() const;

 private:
  nlohmann::json root_;
};

// Short tunable-parameter names mapped to their dotted config paths; every
// entry resolves to a live key in the default template.
const std::map<std::string, std::string>& TunableParamPaths();

}  // namespace mcfd

#endif  // MCFD_CONFIG_H_
