// mcfd/wav.h
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

#ifndef MCFD_WAV_H_
#define MCFD_WAV_H_

#include <string>

#include "mcfd/audio.h"

namespace mcfd {

enum class WavFormat { kPcm16, kFloat32 };

// RIFF WAV reader; accepts 16-bit PCM and 32-bit IEEE float, any channel
// count. Unknown chunks are skipped.
AudioSession ReadWav(const std::string& path);

void WriteWav(const std::string& path, const AudioSession& audio,
              WavFormat format = WavFormat::kFloat32);

}  // namespace mcfd

#endif  // MCFD_WAV_H_
