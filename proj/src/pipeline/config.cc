// pipeline/config.cc
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

#include "mcfd/config.h"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mcfd/common.h"

namespace mcfd {

namespace {

using nlohmann::json;

json DefaultTree() {
  json j;
  j["seed"] = 17;
  j["num_workers"] = 0;

  j["pipeline"]["write_intermediate"] = true;

  j["chanclust"]["enabled"] = true;
  j["chanclust"]["band_low_hz"] = 300.0;
  j["chanclust"]["band_high_hz"] = 3500.0;
  j["chanclust"]["max_clusters"] = 8;

  j["dereverb"]["enabled"] = true;
  j["dereverb"]["block_length_s"] = 40.0;
  j["dereverb"]["block_overlap_s"] = 2.0;
  j["dereverb"]["filter_taps"] = 10;
  j["dereverb"]["prediction_delay"] = 3;
  j["dereverb"]["iterations"] = 10;

  j["vad"]["provider"] = "energy";
  j["vad"]["sidecar_dir"] = "";
  j["vad"]["frame_length_ms"] = 20.0;
  j["vad"]["noise_percentile"] = 10.0;
  j["vad"]["onset_snr_db"] = 6.0;
  j["vad"]["slope_db"] = 3.0;
  j["vad"]["threshold"] = 0.5;
  j["vad"]["drop_threshold"] = 0.25;

  j["diarizer"]["scale_lengths_s"] = {3.0, 1.5, 0.5};
  j["diarizer"]["scale_overlap"] = 0.5;
  j["diarizer"]["r_value"] = 1.0;
  j["diarizer"]["finest_resolution_s"] = 0.05;
  j["diarizer"]["max_speakers"] = 8;
  j["diarizer"]["sigmoid_threshold"] = 0.5;
  j["diarizer"]["presence_gamma"] = 10.0;
  j["diarizer"]["presence_beta"] = 0.5;
  j["diarizer"]["window_s"] = 15.0;
  j["diarizer"]["hop_s"] = 3.0;
  j["diarizer"]["global_average_mix_ratio"] = 0.5;
  j["diarizer"]["global_average_window_length_s"] = 1e9;
  j["diarizer"]["pad_onset"] = 0.1;
  j["diarizer"]["pad_offset"] = 0.1;
  j["diarizer"]["min_duration_on"] = 0.2;
  j["diarizer"]["min_duration_off"] = 0.2;
  j["diarizer"]["embedding"] = "filterbank";
  j["diarizer"]["embedding_sidecar_dir"] = "";
  j["diarizer"]["embedding_sidecar_dimension"] = 0;
  j["diarizer"]["presence_sidecar_dir"] = "";

  j["gssfe"]["enabled"] = true;
  j["gssfe"]["channel_fraction"] = 0.8;
  j["gssfe"]["context_s"] = 5.0;
  j["gssfe"]["em_iterations"] = 20;
  j["gssfe"]["mc_postmask_min_db"] = -12.0;
  j["gssfe"]["wpe_filter_taps"] = 10;
  j["gssfe"]["wpe_prediction_delay"] = 2;
  j["gssfe"]["wpe_iterations"] = 3;
  j["gssfe"]["mono_vad_threshold"] = 0.5;

  j["asr"]["lm_beam_size"] = 4;

  j["scoring"]["collar_s"] = 0.25;
  j["scoring"]["score_overlap"] = true;
  return j;
}

std::vector<std::string> SplitPath(const std::string& dotted) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : dotted) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) throw InputError(StrCat("bad config path: ", dotted));
  return parts;
}

const json* FindNode(const json& root, const std::string& dotted) {
  const json* node = &root;
  for (const auto& part : SplitPath(dotted)) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

json* FindMutable(json& root, const std::string& dotted) {
  json* node = &root;
  for (const auto& part : SplitPath(dotted)) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

// Overlays `user` onto `base`; keys absent from `base` or changing their
// category (number / bool / string / array / object) are rejected.
void MergeChecked(json& base, const json& user, const std::string& prefix) {
  if (!user.is_object())
    throw InputError(StrCat("config: expected object at ",
                            prefix.empty() ? "top level" : prefix));
  for (const auto& [key, value] : user.items()) {
    std::string path = prefix.empty() ? key : StrCat(prefix, ".", key);
    if (!base.contains(key))
      throw InputError(StrCat("config: unknown key ", path));
    json& slot = base[key];
    if (slot.is_object()) {
      MergeChecked(slot, value, path);
      continue;
    }
    bool ok = (slot.is_number() && value.is_number()) ||
              (slot.is_boolean() && value.is_boolean()) ||
              (slot.is_string() && value.is_string()) ||
              (slot.is_array() && value.is_array());
    if (!ok)
      throw InputError(StrCat("config: type mismatch at ", path));
    if (slot.is_number_integer() && value.is_number_float()) {
      double d = value.get<double>();
      if (d != std::floor(d))
        throw InputError(StrCat("config: ", path, " must be an integer"));
      slot = static_cast<int64_t>(d);
    } else {
      slot = value;
    }
  }
}

void CollectLeaves(const json& node, const std::string& prefix,
                   std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      CollectLeaves(value, prefix.empty() ? key : StrCat(prefix, ".", key),
                    out);
  } else {
    out.push_back(prefix);
  }
}

std::string EnvName(const std::string& dotted) {
  std::string name = "MCFD_";
  for (char c : dotted) {
    if (c == '.')
      name.push_back('_');
    else
      name.push_back(
          static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return name;
}

double ParseNumber(const std::string& text, const std::string& what) {
  try {
    size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InputError(StrCat("config: cannot parse number for ", what, ": ",
                            text));
  }
}

}  // namespace

PipelineConfig::PipelineConfig() : root_(DefaultTree()) {}

PipelineConfig PipelineConfig::FromJsonText(const std::string& text) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(StrCat("config: parse error: ", e.what()));
  }
  PipelineConfig cfg;
  MergeChecked(cfg.root_, user, "");
  return cfg;
}

PipelineConfig PipelineConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(StrCat("config: cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  PipelineConfig cfg = FromJsonText(buf.str());
  cfg.ApplyEnvOverrides();
  return cfg;
}

void PipelineConfig::ApplyEnvOverrides() {
  std::vector<std::string> leaves;
  CollectLeaves(root_, "", leaves);
  for (const auto& path : leaves) {
    const char* env = std::getenv(EnvName(path).c_str());
    if (env == nullptr) continue;
    std::string text(env);
    json* slot = FindMutable(root_, path);
    if (slot->is_boolean()) {
      if (text == "true" || text == "1")
        *slot = true;
      else if (text == "false" || text == "0")
        *slot = false;
      else
        throw InputError(StrCat("config: bad boolean for ", EnvName(path),
                                ": ", text));
    } else if (slot->is_number_integer()) {
      double d = ParseNumber(text, path);
      if (d != std::floor(d))
        throw InputError(StrCat("config: ", path, " must be an integer"));
      *slot = static_cast<int64_t>(d);
    } else if (slot->is_number()) {
      *slot = ParseNumber(text, path);
    } else if (slot->is_string()) {
      *slot = text;
    } else if (slot->is_array()) {
      json arr;
      try {
        arr = json::parse(text);
      } catch (const json::exception&) {
        throw InputError(StrCat("config: bad array for ", EnvName(path)));
      }
      if (!arr.is_array())
        throw InputError(StrCat("config: bad array for ", EnvName(path)));
      *slot = arr;
    }
  }
}

bool PipelineConfig::HasPath(const std::string& dotted) const {
  const json* node = FindNode(root_, dotted);
  return node != nullptr && !node->is_object();
}

double PipelineConfig::GetNumber(const std::string& dotted) const {
  const json* node = FindNode(root_, dotted);
  if (node == nullptr || !node->is_number())
    throw InputError(StrCat("config: no numeric key ", dotted));
  return node->get<double>();
}

bool PipelineConfig::GetBool(const std::string& dotted) const {
  const json* node = FindNode(root_, dotted);
  if (node == nullptr || !node->is_boolean())
    throw InputError(StrCat("config: no boolean key ", dotted));
  return node->get<bool>();
}

std::string PipelineConfig::GetString(const std::string& dotted) const {
  const json* node = FindNode(root_, dotted);
  if (node == nullptr || !node->is_string())
    throw InputError(StrCat("config: no string key ", dotted));
  return node->get<std::string>();
}

std::vector<double> PipelineConfig::GetNumberList(
    const std::string& dotted) const {
  const json* node = FindNode(root_, dotted);
  if (node == nullptr || !node->is_array())
    throw InputError(StrCat("config: no list key ", dotted));
  std::vector<double> out;
  for (const auto& v : *node) {
    if (!v.is_number())
      throw InputError(StrCat("config: non-numeric entry in ", dotted));
    out.push_back(v.get<double>());
  }
  return out;
}

void PipelineConfig::SetNumber(const std::string& dotted, double v) {
  json* node = FindMutable(root_, dotted);
  if (node == nullptr || !node->is_number())
    throw InputError(StrCat("config: no numeric key ", dotted));
  if (node->is_number_integer()) {
    if (v != std::floor(v))
      throw InputError(StrCat("config: ", dotted, " must be an integer"));
    *node = static_cast<int64_t>(v);
  } else {
    *node = v;
  }
}

void PipelineConfig::SetBool(const std::string& dotted, bool v) {
  json* node = FindMutable(root_, dotted);
  if (node == nullptr || !node->is_boolean())
    throw InputError(StrCat("config: no boolean key ", dotted));
  *node = v;
}

void PipelineConfig::SetString(const std::string& dotted,
                               const std::string& v) {
  json* node = FindMutable(root_, dotted);
  if (node == nullptr || !node->is_string())
    throw InputError(StrCat("config: no string key ", dotted));
  *node = v;
}

void PipelineConfig::SetNumberList(const std::string& dotted,
                                   const std::vector<double>& v) {
  json* node = FindMutable(root_, dotted);
  if (node == nullptr || !node->is_array())
    throw InputError(StrCat("config: no list key ", dotted));
  *node = v;
}

std::uint64_t PipelineConfig::seed() const {
  return static_cast<std::uint64_t>(GetNumber("seed"));
}

int PipelineConfig::num_workers() const {
  return static_cast<int>(GetNumber("num_workers"));
}

std::string PipelineConfig::ToJsonText() const { return root_.dump(2) + "\n"; }

ChannelClusterOptions PipelineConfig::MakeChanclustOptions() const {
  ChannelClusterOptions o;
  o.band_low_hz = GetNumber("chanclust.band_low_hz");
  o.band_high_hz = GetNumber("chanclust.band_high_hz");
  o.max_clusters = static_cast<int>(GetNumber("chanclust.max_clusters"));
  o.seed = seed();
  return o;
}

WpeConfig PipelineConfig::MakeWpeConfig() const {
  WpeConfig w;
  w.block_length_s = GetNumber("dereverb.block_length_s");
  w.block_overlap_s = GetNumber("dereverb.block_overlap_s");
  w.filter_taps = static_cast<int>(GetNumber("dereverb.filter_taps"));
  w.prediction_delay =
      static_cast<int>(GetNumber("dereverb.prediction_delay"));
  w.iterations = static_cast<int>(GetNumber("dereverb.iterations"));
  w.num_workers = num_workers();
  return w;
}

EnergyVadOptions PipelineConfig::MakeVadOptions() const {
  EnergyVadOptions o;
  o.frame_length_ms = GetNumber("vad.frame_length_ms");
  o.noise_percentile = GetNumber("vad.noise_percentile");
  o.onset_snr_db = GetNumber("vad.onset_snr_db");
  o.slope_db = GetNumber("vad.slope_db");
  return o;
}

DiarizerOptions PipelineConfig::MakeDiarizerOptions(
    const std::string& session_id) const {
  DiarizerOptions o;
  o.scales.scale_lengths_s = GetNumberList("diarizer.scale_lengths_s");
  o.scales.overlap = GetNumber("diarizer.scale_overlap");
  o.scales.r_value = GetNumber("diarizer.r_value");
  o.scales.finest_resolution_s = GetNumber("diarizer.finest_resolution_s");
  o.vad_threshold = GetNumber("vad.threshold");
  o.vad_drop_threshold = GetNumber("vad.drop_threshold");
  o.max_speakers = static_cast<int>(GetNumber("diarizer.max_speakers"));
  o.presence.gamma = GetNumber("diarizer.presence_gamma");
  o.presence.beta = GetNumber("diarizer.presence_beta");
  o.presence.window_s = GetNumber("diarizer.window_s");
  o.presence.hop_s = GetNumber("diarizer.hop_s");
  o.presence.alpha = GetNumber("diarizer.global_average_mix_ratio");
  o.presence.global_window_s =
      GetNumber("diarizer.global_average_window_length_s");
  o.tau = GetNumber("diarizer.sigmoid_threshold");
  o.pad_onset = GetNumber("diarizer.pad_onset");
  o.pad_offset = GetNumber("diarizer.pad_offset");
  o.min_duration_on = GetNumber("diarizer.min_duration_on");
  o.min_duration_off = GetNumber("diarizer.min_duration_off");
  o.seed = seed();
  o.num_workers = num_workers();
  o.session_id = session_id;
  o.presence_sidecar_dir = GetString("diarizer.presence_sidecar_dir");
  return o;
}

FrontendConfig PipelineConfig::MakeFrontendConfig() const {
  FrontendConfig f;
  f.channel_fraction = GetNumber("gssfe.channel_fraction");
  f.wpe.filter_taps = static_cast<int>(GetNumber("gssfe.wpe_filter_taps"));
  f.wpe.prediction_delay =
      static_cast<int>(GetNumber("gssfe.wpe_prediction_delay"));
  f.wpe.iterations = static_cast<int>(GetNumber("gssfe.wpe_iterations"));
  f.gss.em_iterations = static_cast<int>(GetNumber("gssfe.em_iterations"));
  f.gss.seed = seed();
  f.gss.num_workers = num_workers();
  f.postmask_min_db = GetNumber("gssfe.mc_postmask_min_db");
  f.mono_vad_threshold = GetNumber("gssfe.mono_vad_threshold");
  f.num_workers = num_workers();
  return f;
}

DerOptions PipelineConfig::MakeDerOptions() const {
  DerOptions o;
  o.collar_s = GetNumber("scoring.collar_s");
  o.score_overlap = GetBool("scoring.score_overlap");
  return o;
}

const std::map<std::string, std::string>& TunableParamPaths() {
  static const std::map<std::string, std::string> kPaths = {
      {"lm_beam_size", "asr.lm_beam_size"},
      {"r_value", "diarizer.r_value"},
      {"global_average_mix_ratio", "diarizer.global_average_mix_ratio"},
      {"global_average_window_length",
       "diarizer.global_average_window_length_s"},
      {"mc_postmask_min_db", "gssfe.mc_postmask_min_db"},
      {"pad_onset", "diarizer.pad_onset"},
      {"sigmoid_threshold", "diarizer.sigmoid_threshold"},
      {"pad_offset", "diarizer.pad_offset"},
      {"min_duration_on", "diarizer.min_duration_on"},
      {"min_duration_off", "diarizer.min_duration_off"},
      {"drop_threshold", "vad.drop_threshold"},
  };
  return kPaths;
}

}  // namespace mcfd
