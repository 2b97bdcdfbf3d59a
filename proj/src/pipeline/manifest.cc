// pipeline/manifest.cc
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

#include "mcfd/manifest.h"

#include <fstream>
#include <set>

#include "json.hpp"
#include "mcfd/common.h"

namespace mcfd {

namespace {
using nlohmann::json;
}  // namespace

SessionManifest ReadSessionManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError(StrCat("ReadSessionManifest: cannot open ", path));
  SessionManifest manifest;
  std::set<std::string> ids;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(StrCat("ReadSessionManifest: ", path, " line ", lineno,
                              ": ", e.what()));
    }
    SessionEntry entry;
    if (!j.contains("session_id") || !j["session_id"].is_string())
      throw InputError(StrCat("ReadSessionManifest: ", path, " line ", lineno,
                              ": missing session_id"));
    entry.session_id = j["session_id"].get<std::string>();
    if (!ids.insert(entry.session_id).second)
      throw InputError(StrCat("ReadSessionManifest: duplicate session_id ",
                              entry.session_id));
    if (!j.contains("wavs") || !j["wavs"].is_array() || j["wavs"].empty())
      throw InputError(StrCat("ReadSessionManifest: ", path, " line ", lineno,
                              ": missing wavs"));
    for (const auto& w : j["wavs"]) {
      if (w.is_string()) {
        entry.wav_paths.push_back(w.get<std::string>());
        entry.channel_labels.push_back(
            StrCat("ch", entry.channel_labels.size()));
      } else if (w.is_object() && w.contains("path")) {
        entry.wav_paths.push_back(w["path"].get<std::string>());
        entry.channel_labels.push_back(
            w.contains("channel")
                ? w["channel"].get<std::string>()
                : StrCat("ch", entry.channel_labels.size()));
      } else {
        throw InputError(StrCat("ReadSessionManifest: ", path, " line ",
                                lineno, ": bad wav entry"));
      }
    }
    entry.rttm_path = j.value("rttm", "");
    entry.ref_transcripts_path = j.value("ref_transcripts", "");
    entry.hyp_transcripts_path = j.value("hyp_transcripts", "");
    entry.subset = j.value("subset", "default");
    manifest.push_back(std::move(entry));
  }
  if (manifest.empty())
    throw InputError(StrCat("ReadSessionManifest: no sessions in ", path));
  return manifest;
}

void WriteSessionManifest(const std::string& path,
                          const SessionManifest& manifest) {
  std::ofstream out(path);
  if (!out)
    throw Error(StrCat("WriteSessionManifest: cannot open ", path));
  for (const auto& e : manifest) {
    json j;
    j["session_id"] = e.session_id;
    json wavs = json::array();
    for (size_t i = 0; i < e.wav_paths.size(); ++i) {
      json w;
      w["path"] = e.wav_paths[i];
      w["channel"] = i < e.channel_labels.size()
                         ? e.channel_labels[i]
                         : StrCat("ch", i);
      wavs.push_back(std::move(w));
    }
    j["wavs"] = std::move(wavs);
    if (!e.rttm_path.empty()) j["rttm"] = e.rttm_path;
    if (!e.ref_transcripts_path.empty())
      j["ref_transcripts"] = e.ref_transcripts_path;
    if (!e.hyp_transcripts_path.empty())
      j["hyp_transcripts"] = e.hyp_transcripts_path;
    j["subset"] = e.subset;
    out << j.dump() << "\n";
  }
  if (!out)
    throw Error(StrCat("WriteSessionManifest: write failed: ", path));
}

}  // namespace mcfd
