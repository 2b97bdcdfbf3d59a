// base/wav.cc
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

#include "mcfd/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "mcfd/common.h"

namespace mcfd {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T ReadLE(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(buf[i]) << (8 * i);
  }
  return v;
}

template <typename T>
void WriteLE(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  }
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

float Int16ToFloat(int16_t v) { return static_cast<float>(v) / 32768.0f; }

int16_t FloatToInt16(float v) {
  float scaled = v * 32768.0f;
  scaled = std::min(32767.0f, std::max(-32768.0f, scaled));
  return static_cast<int16_t>(std::lrintf(scaled));
}

}  // namespace

AudioSession ReadWav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot open WAV file: " + path);

  char riff[4], wave[4];
  is.read(riff, 4);
  uint32_t riff_size = ReadLE<uint32_t>(is);
  (void)riff_size;
  is.read(wave, 4);
  if (!is || std::memcmp(riff, "RIFF", 4) != 0 ||
      std::memcmp(wave, "WAVE", 4) != 0) {
    throw InputError("not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::vector<char> data;

  while (is) {
    char id[4];
    is.read(id, 4);
    if (!is) break;
    uint32_t size = ReadLE<uint32_t>(is);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = ReadLE<uint16_t>(is);
      channels = ReadLE<uint16_t>(is);
      sample_rate = ReadLE<uint32_t>(is);
      ReadLE<uint32_t>(is);  // byte rate
      ReadLE<uint16_t>(is);  // block align
      bits = ReadLE<uint16_t>(is);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      if (format == kFormatExtensible) {
        // sub-format resolved below from the bit depth
        format = (bits == 32) ? kFormatFloat : kFormatPcm;
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data.resize(size);
      is.read(data.data(), size);
      break;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (!have_fmt || data.empty()) {
    throw InputError("WAV file missing fmt/data chunk: " + path);
  }
  if (channels == 0 || sample_rate == 0) {
    throw InputError("WAV file with zero channels or rate: " + path);
  }

  std::size_t frame_bytes = channels * (bits / 8);
  std::size_t frames = data.size() / frame_bytes;
  std::vector<std::vector<float>> chans(channels,
                                        std::vector<float>(frames, 0.0f));
  const char* p = data.data();
  if (format == kFormatPcm && bits == 16) {
    for (std::size_t t = 0; t < frames; ++t) {
      for (int c = 0; c < channels; ++c) {
        int16_t v;
        std::memcpy(&v, p, 2);
        p += 2;
        chans[c][t] = Int16ToFloat(v);
      }
    }
  } else if (format == kFormatFloat && bits == 32) {
    for (std::size_t t = 0; t < frames; ++t) {
      for (int c = 0; c < channels; ++c) {
        float v;
        std::memcpy(&v, p, 4);
        p += 4;
        chans[c][t] = v;
      }
    }
  } else {
    throw InputError(StrCat("unsupported WAV encoding (format=", format,
                            ", bits=", bits, "): ", path));
  }
  return MakeSession(std::move(chans), static_cast<int>(sample_rate));
}

void WriteWav(const std::string& path, const AudioSession& audio,
              WavFormat format) {
  audio.Validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write WAV file: " + path);

  const int channels = audio.num_channels();
  const std::size_t frames = audio.num_samples();
  const int bytes_per_sample = format == WavFormat::kPcm16 ? 2 : 4;
  const uint32_t data_size =
      static_cast<uint32_t>(frames * channels * bytes_per_sample);

  os.write("RIFF", 4);
  WriteLE<uint32_t>(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLE<uint32_t>(os, 16);
  WriteLE<uint16_t>(os, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  WriteLE<uint16_t>(os, static_cast<uint16_t>(channels));
  WriteLE<uint32_t>(os, static_cast<uint32_t>(audio.sample_rate));
  WriteLE<uint32_t>(os, static_cast<uint32_t>(audio.sample_rate * channels *
                                              bytes_per_sample));
  WriteLE<uint16_t>(os, static_cast<uint16_t>(channels * bytes_per_sample));
  WriteLE<uint16_t>(os, static_cast<uint16_t>(bytes_per_sample * 8));
  os.write("data", 4);
  WriteLE<uint32_t>(os, data_size);

  for (std::size_t t = 0; t < frames; ++t) {
    for (int c = 0; c < channels; ++c) {
      if (format == WavFormat::kPcm16) {
        WriteLE<uint16_t>(os,
                          static_cast<uint16_t>(FloatToInt16(audio.samples[c][t])));
      } else {
        float v = audio.samples[c][t];
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        WriteLE<uint32_t>(os, bits);
      }
    }
  }
  if (!os) throw Error("short write on WAV file: " + path);
}

}  // namespace mcfd
