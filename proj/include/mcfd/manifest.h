// mcfd/manifest.h
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

#ifndef MCFD_MANIFEST_H_
#define MCFD_MANIFEST_H_

#include <string>
#include <vector>

namespace mcfd {

struct SessionEntry {
  std::string session_id;
  std::vector<std::string> wav_paths;       // one file per channel group
  std::vector<std::string> channel_labels;  // parallel to wav_paths
  std::string rttm_path;                    // optional diarization reference
  std::string ref_transcripts_path;         // optional transcript manifest
  std::string hyp_transcripts_path;         // optional recognized transcripts
  std::string subset = "default";
};

using SessionManifest = std::vector<SessionEntry>;

// JSON lines, one session per line:
// {"session_id": "...", "wavs": ["a.wav", ...] or
//  [{"path": "a.wav", "channel": "ch0"}, ...], "rttm": "...",
//  "ref_transcripts": "...", "hyp_transcripts": "...", "subset": "..."}.
// session_ids must be unique.
SessionManifest ReadSessionManifest(const std::string& path);
void WriteSessionManifest(const std::string& path,
                          const SessionManifest& manifest);

}  // namespace mcfd

#endif  // MCFD_MANIFEST_H_
