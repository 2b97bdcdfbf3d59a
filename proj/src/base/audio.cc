// base/audio.cc
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

#include "mcfd/audio.h"

#include <algorithm>

#include "mcfd/common.h"

namespace mcfd {

void AudioSession::Validate() const {
  if (samples.empty()) throw InputError("AudioSession: no channels");
  if (sample_rate <= 0)
    throw InputError(StrCat("AudioSession: bad sample rate ", sample_rate));
  const std::size_t n = samples[0].size();
  for (std::size_t c = 1; c < samples.size(); ++c) {
    if (samples[c].size() != n) {
      throw InputError(StrCat("AudioSession: channel ", c, " has ",
                              samples[c].size(), " samples, expected ", n));
    }
  }
  if (!channel_ids.empty() && channel_ids.size() != samples.size()) {
    throw InputError("AudioSession: channel_ids/channel count mismatch");
  }
}

AudioSession AudioSession::Slice(std::size_t begin, std::size_t end) const {
  AudioSession out;
  out.sample_rate = sample_rate;
  out.channel_ids = channel_ids;
  const std::size_t n = num_samples();
  begin = std::min(begin, n);
  end = std::min(std::max(end, begin), n);
  out.samples.reserve(samples.size());
  for (const auto& ch : samples) {
    out.samples.emplace_back(ch.begin() + begin, ch.begin() + end);
  }
  return out;
}

AudioSession AudioSession::Channel(int c) const {
  AudioSession out;
  out.sample_rate = sample_rate;
  out.samples.push_back(samples.at(c));
  if (static_cast<std::size_t>(c) < channel_ids.size()) {
    out.channel_ids.push_back(channel_ids[c]);
  }
  return out;
}

AudioSession MakeSession(std::vector<std::vector<float>> samples,
                         int sample_rate,
                         std::vector<std::string> channel_ids) {
  AudioSession s;
  s.samples = std::move(samples);
  s.sample_rate = sample_rate;
  if (channel_ids.empty()) {
    for (std::size_t c = 0; c < s.samples.size(); ++c) {
      channel_ids.push_back("ch" + std::to_string(c));
    }
  }
  s.channel_ids = std::move(channel_ids);
  s.Validate();
  return s;
}

}  // namespace mcfd
