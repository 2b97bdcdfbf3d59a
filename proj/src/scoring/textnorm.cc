// scoring/textnorm.cc
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

#include <cctype>
#include <sstream>

namespace mcfd {

namespace {

// UTF-8 bytes of U+2047 (double question mark), used as an unknown-word
// placeholder in transcripts and removed before scoring.
const char kPlaceholder[] = "\xe2\x81\x87";

std::string StripPlaceholder(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, 3, kPlaceholder) == 0) {
      i += 3;
      continue;
    }
    out.push_back(s[i]);
    ++i;
  }
  return out;
}

}  // namespace

std::vector<std::string> SplitWords(const std::string& s) {
  std::vector<std::string> words;
  std::istringstream in(s);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string NormalizeText(const std::string& s) {
  std::string stripped = StripPlaceholder(s);
  for (char& c : stripped)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::vector<std::string> words = SplitWords(stripped);
  std::string out;
  for (size_t i = 0; i < words.size(); ++i) {
    if (words[i] == "aw") words[i] = "oh";
    if (i > 0) out.push_back(' ');
    out += words[i];
  }
  return out;
}

}  // namespace mcfd
