// mcfd/rttm.h
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

#ifndef MCFD_RTTM_H_
#define MCFD_RTTM_H_

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mcfd {

struct DiarSegment {
  double begin_s = 0.0;
  double end_s = 0.0;
  std::string speaker;

  double duration() const { return end_s - begin_s; }
};

using DiarSegments = std::vector<DiarSegment>;

// Sorts by (begin, end, speaker); the canonical order used everywhere a
// segment list is serialized, so equal inputs serialize identically.
void SortSegments(DiarSegments& segments);

// One "SPEAKER <session> 1 <start> <dur> <NA> <NA> <speaker> <NA> <NA>" line
// per segment, times fixed to millisecond precision. Segments are written in
// canonical order; output is byte-deterministic for a fixed segment set.
void WriteRttm(std::ostream& out, const std::string& session_id,
               const DiarSegments& segments);
void WriteRttmFile(const std::string& path, const std::string& session_id,
                   const DiarSegments& segments);

// Parses SPEAKER lines grouped by session; other record types are skipped.
std::map<std::string, DiarSegments> ReadRttm(const std::string& path);

}  // namespace mcfd

#endif  // MCFD_RTTM_H_
