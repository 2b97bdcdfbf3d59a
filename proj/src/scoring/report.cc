// scoring/report.cc
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

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "mcfd/common.h"

namespace mcfd {

namespace {

using nlohmann::json;

json ReportToJson(const ScoreReport& r) {
  json j;
  j["der"] = r.der;
  j["jer"] = r.jer;
  j["miss_s"] = r.miss_s;
  j["fa_s"] = r.fa_s;
  j["confusion_s"] = r.confusion_s;
  j["ref_speech_s"] = r.ref_speech_s;
  if (r.has_wer) {
    j["wer"] = r.wer;
    j["substitutions"] = r.substitutions;
    j["insertions"] = r.insertions;
    j["deletions"] = r.deletions;
    j["ref_words"] = r.ref_words;
  }
  return j;
}

}  // namespace

void WriteScoreReportJson(const std::string& path,
                          const std::map<std::string, ScoreReport>& subsets) {
  if (subsets.empty()) throw InputError("WriteScoreReportJson: no subsets");
  json j;
  std::vector<double> ders, jers, wers;
  for (const auto& [name, r] : subsets) {
    j["subsets"][name] = ReportToJson(r);
    ders.push_back(r.der);
    jers.push_back(r.jer);
    if (r.has_wer) wers.push_back(r.wer);
  }
  j["macro"]["der"] = MacroAverage(ders);
  j["macro"]["jer"] = MacroAverage(jers);
  if (!wers.empty()) j["macro"]["wer"] = MacroAverage(wers);

  std::ofstream out(path);
  if (!out) throw Error(StrCat("WriteScoreReportJson: cannot open ", path));
  out << j.dump(2) << "\n";
  if (!out) throw Error(StrCat("WriteScoreReportJson: write failed: ", path));
}

void WriteScoreTable(const std::string& path,
                     const std::map<std::string, ScoreReport>& subsets) {
  if (subsets.empty()) throw InputError("WriteScoreTable: no subsets");
  std::ofstream out(path);
  if (!out) throw Error(StrCat("WriteScoreTable: cannot open ", path));

  size_t width = 6;
  for (const auto& [name, r] : subsets) width = std::max(width, name.size());
  auto row = [&out, width](const std::string& name, double der, double jer,
                           bool has_wer, double wer) {
    char buf[160];
    if (has_wer) {
      std::snprintf(buf, sizeof(buf), "%-*s  %8.2f  %8.2f  %8.2f\n",
                    static_cast<int>(width), name.c_str(), 100.0 * der,
                    100.0 * jer, 100.0 * wer);
    } else {
      std::snprintf(buf, sizeof(buf), "%-*s  %8.2f  %8.2f  %8s\n",
                    static_cast<int>(width), name.c_str(), 100.0 * der,
                    100.0 * jer, "-");
    }
    out << buf;
  };

  char head[160];
  std::snprintf(head, sizeof(head), "%-*s  %8s  %8s  %8s\n",
                static_cast<int>(width), "subset", "DER%", "JER%", "WER%");
  out << head;

  std::vector<double> ders, jers, wers;
  bool all_wer = true;
  for (const auto& [name, r] : subsets) {
    row(name, r.der, r.jer, r.has_wer, r.wer);
    ders.push_back(r.der);
    jers.push_back(r.jer);
    if (r.has_wer) wers.push_back(r.wer); else all_wer = false;
  }
  row("macro", MacroAverage(ders), MacroAverage(jers), all_wer && !wers.empty(),
      wers.empty() ? 0.0 : MacroAverage(wers));
  if (!out) throw Error(StrCat("WriteScoreTable: write failed: ", path));
}

std::map<std::string, SpeakerTranscripts> ReadTranscriptManifest(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(StrCat("ReadTranscriptManifest: cannot open ",
                                   path));
  std::map<std::string, SpeakerTranscripts> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw InputError(StrCat("ReadTranscriptManifest: ", path, " line ",
                              lineno, ": ", e.what()));
    }
    for (const char* key :
         {"session_id", "speaker", "start_time", "end_time", "words"}) {
      if (!j.contains(key))
        throw InputError(StrCat("ReadTranscriptManifest: ", path, " line ",
                                lineno, ": missing key ", key));
    }
    Utterance u;
    u.begin_s = j["start_time"].get<double>();
    u.end_s = j["end_time"].get<double>();
    u.text = j["words"].get<std::string>();
    if (u.end_s < u.begin_s)
      throw InputError(StrCat("ReadTranscriptManifest: ", path, " line ",
                              lineno, ": negative duration"));
    out[j["session_id"].get<std::string>()][j["speaker"].get<std::string>()]
        .push_back(std::move(u));
  }
  return out;
}

void WriteTranscriptManifest(
    const std::string& path,
    const std::map<std::string, SpeakerTranscripts>& by_session) {
  std::ofstream out(path);
  if (!out) throw Error(StrCat("WriteTranscriptManifest: cannot open ", path));
  for (const auto& [session, speakers] : by_session) {
    for (const auto& [speaker, utts] : speakers) {
      for (const auto& u : utts) {
        json j;
        j["session_id"] = session;
        j["speaker"] = speaker;
        j["start_time"] = u.begin_s;
        j["end_time"] = u.end_s;
        j["words"] = u.text;
        out << j.dump() << "\n";
      }
    }
  }
  if (!out) throw Error(StrCat("WriteTranscriptManifest: write failed: ",
                               path));
}

}  // namespace mcfd
