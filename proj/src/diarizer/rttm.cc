// diarizer/rttm.cc
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

#include "mcfd/rttm.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcfd/common.h"

namespace mcfd {

void SortSegments(DiarSegments& segments) {
  std::sort(segments.begin(), segments.end(),
            [](const DiarSegment& a, const DiarSegment& b) {
              if (a.begin_s != b.begin_s) return a.begin_s < b.begin_s;
              if (a.end_s != b.end_s) return a.end_s < b.end_s;
              return a.speaker < b.speaker;
            });
}

void WriteRttm(std::ostream& out, const std::string& session_id,
               const DiarSegments& segments) {
  DiarSegments sorted = segments;
  SortSegments(sorted);
  char buf[64];
  for (const DiarSegment& s : sorted) {
    std::snprintf(buf, sizeof(buf), "%.3f", s.begin_s);
    out << "SPEAKER " << session_id << " 1 " << buf << " ";
    std::snprintf(buf, sizeof(buf), "%.3f", s.duration());
    out << buf << " <NA> <NA> " << s.speaker << " <NA> <NA>\n";
  }
  if (!out) throw Error("WriteRttm: stream write failed");
}

void WriteRttmFile(const std::string& path, const std::string& session_id,
                   const DiarSegments& segments) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError(StrCat("WriteRttmFile: cannot open ", path));
  WriteRttm(out, session_id, segments);
}

std::map<std::string, DiarSegments> ReadRttm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(StrCat("ReadRttm: cannot open ", path));
  std::map<std::string, DiarSegments> result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == ';') continue;
    std::istringstream ss(line);
    std::string type, session, channel, na1, na2, speaker;
    double begin = 0.0, dur = 0.0;
    ss >> type;
    if (type != "SPEAKER") continue;
    if (!(ss >> session >> channel >> begin >> dur >> na1 >> na2 >> speaker)) {
      throw InputError(StrCat("ReadRttm: malformed line ", line_no, " in ",
                              path));
    }
    if (dur < 0.0) {
      throw InputError(StrCat("ReadRttm: negative duration at line ", line_no,
                              " in ", path));
    }
    result[session].push_back(DiarSegment{begin, begin + dur, speaker});
  }
  for (auto& [session, segs] : result) SortSegments(segs);
  return result;
}

}  // namespace mcfd
