// tests/test_spectral.cc
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

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "mcfd/audio.h"
#include "mcfd/coherence.h"
#include "mcfd/common.h"
#include "mcfd/cross_psd.h"
#include "mcfd/stft.h"
#include "mcfd/wav.h"
#include "testutil.h"

using namespace mcfd;
using namespace mcfd::test;

namespace {

AudioSession MonoSession(std::vector<float> x, int sample_rate = 16000) {
  AudioSession s;
  s.sample_rate = sample_rate;
  s.samples.push_back(std::move(x));
  s.channel_ids.push_back("ch0");
  return s;
}

std::vector<float> Tone(size_t n, int sample_rate, double freq,
                        double amp = 0.5, double phase = 0.0) {
  std::vector<float> x(n);
  for (size_t i = 0; i < n; ++i)
    x[i] = static_cast<float>(
        amp * std::sin(2.0 * M_PI * freq * i / sample_rate + phase));
  return x;
}

}  // namespace

TEST_CASE("stft shapes at the 64/16 ms default") {
  AudioSession s = MonoSession(WhiteNoise(16000, 1));
  SpectralTensor spec = Stft(s, StftConfig{});
  CHECK(spec.channels == 1);
  CHECK(spec.win_samples == 1024);
  CHECK(spec.hop_samples == 256);
  CHECK(spec.fft_size == 1024);
  CHECK(spec.bins == 513);
  // Centered framing covers the padded signal: (n + 2*512 - 1024)/256 + 1.
  CHECK(spec.frames == 16000 / 256 + 1);
  CHECK(spec.signal_length == 16000);
  CHECK(spec.sample_rate == 16000);
}

TEST_CASE("stft bin and frame coordinate maps") {
  AudioSession s = MonoSession(WhiteNoise(8000, 2));
  SpectralTensor spec = Stft(s, StftConfig{});
  CHECK(spec.bin_hz(0) == doctest::Approx(0.0));
  CHECK(spec.bin_hz(64) == doctest::Approx(1000.0));
  CHECK(spec.bin_hz(512) == doctest::Approx(8000.0));
  CHECK(spec.frame_time_s(0) == doctest::Approx(0.0));
  CHECK(spec.frame_time_s(10) == doctest::Approx(10.0 * 256.0 / 16000.0));
}

TEST_CASE("stft pure tone concentrates on its bin") {
  AudioSession s = MonoSession(Tone(16000, 16000, 1000.0));
  SpectralTensor spec = Stft(s, StftConfig{});
  int t = spec.frames / 2;
  int peak = 0;
  double best = -1.0;
  for (int f = 0; f < spec.bins; ++f) {
    double mag = std::abs(spec.at(0, t, f));
    if (mag > best) {
      best = mag;
      peak = f;
    }
  }
  CHECK(peak == 64);
  // Hann leakage stays within the immediate neighbors.
  double far = std::abs(spec.at(0, t, 80));
  CHECK(far < 1e-3 * best);
}

TEST_CASE("stft istft round trip both windows") {
  for (WindowFn fn : {WindowFn::kHann, WindowFn::kSqrtHann}) {
    CAPTURE(static_cast<int>(fn));
    AudioSession s = MonoSession(WhiteNoise(27311, 3));
    StftConfig cfg;
    cfg.window = fn;
    SpectralTensor spec = Stft(s, cfg);
    AudioSession back = Istft(spec);
    REQUIRE(back.num_samples() == s.num_samples());
    size_t lo = 1024, hi = s.num_samples() - 1024;
    double num = 0.0, den = 0.0;
    for (size_t i = lo; i < hi; ++i) {
      double d = back.samples[0][i] - s.samples[0][i];
      num += d * d;
      den += static_cast<double>(s.samples[0][i]) * s.samples[0][i];
    }
    CHECK(std::sqrt(num / den) < 1e-6);
  }
}

TEST_CASE("stft multichannel keeps channels independent") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(Tone(9000, 16000, 500.0));
  s.samples.push_back(Tone(9000, 16000, 2000.0));
  s.channel_ids = {"a", "b"};
  SpectralTensor spec = Stft(s, StftConfig{});
  AudioSession mono0 = MonoSession(s.samples[0]);
  SpectralTensor ref = Stft(mono0, StftConfig{});
  for (int t = 0; t < spec.frames; t += 7)
    for (int f = 0; f < spec.bins; f += 31)
      CHECK(spec.at(0, t, f) == ref.at(0, t, f));
}

TEST_CASE("stft rejects too short signals and bad hops") {
  AudioSession s = MonoSession(WhiteNoise(100, 4));
  CHECK_THROWS_AS(Stft(s, StftConfig{}), Error);
  AudioSession ok = MonoSession(WhiteNoise(4000, 4));
  StftConfig bad;
  bad.hop_length_ms = 0.0;
  CHECK_THROWS_AS(Stft(ok, bad), Error);
}

TEST_CASE("stft deterministic") {
  AudioSession s = MonoSession(WhiteNoise(12000, 5));
  SpectralTensor a = Stft(s, StftConfig{});
  SpectralTensor b = Stft(s, StftConfig{});
  CHECK(a.data == b.data);
}

TEST_CASE("next pow2 and window basics") {
  CHECK(NextPow2(1024) == 1024);
  CHECK(NextPow2(1025) == 2048);
  CHECK(NextPow2(1) == 1);
  auto hann = MakeWindow(WindowFn::kHann, 8);
  auto root = MakeWindow(WindowFn::kSqrtHann, 8);
  REQUIRE(hann.size() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(hann[i] == doctest::Approx(root[i] * root[i]));
    CHECK(hann[i] >= 0.0);
    CHECK(hann[i] <= 1.0);
  }
}

TEST_CASE("cross psd is hermitian with real nonnegative diagonal") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(WhiteNoise(16000, 6));
  s.samples.push_back(WhiteNoise(16000, 7));
  s.samples.push_back(WhiteNoise(16000, 8));
  s.channel_ids = {"a", "b", "c"};
  SpectralTensor spec = Stft(s, StftConfig{});
  CrossPsd psd = ComputeCrossPsd(spec);
  CHECK(psd.channels == 3);
  CHECK(psd.bins == spec.bins);
  CHECK(psd.frames_averaged == spec.frames);
  for (int f = 1; f < psd.bins; f += 50) {
    const auto& m = psd.matrices[f];
    for (int i = 0; i < 3; ++i) {
      CHECK(m(i, i).imag() == doctest::Approx(0.0).epsilon(1e-9));
      CHECK(m(i, i).real() >= 0.0);
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(m(i, j) - std::conj(m(j, i))) < 1e-9);
    }
  }
}

TEST_CASE("identical channels give unit coherence") {
  auto x = WhiteNoise(16000, 9);
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(x);
  s.samples.push_back(x);
  s.channel_ids = {"a", "b"};
  CoherenceMatrix msc = ComputeMsc(Stft(s, StftConfig{}));
  CHECK(msc.gamma_bar(0, 0) == doctest::Approx(1.0));
  CHECK(msc.gamma_bar(1, 1) == doctest::Approx(1.0));
  CHECK(msc.gamma_bar(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(msc.gamma_bar(1, 0) == doctest::Approx(msc.gamma_bar(0, 1)));
}

TEST_CASE("independent noise decoheres over long averages") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(WhiteNoise(16000 * 8, 10));
  s.samples.push_back(WhiteNoise(16000 * 8, 11));
  s.channel_ids = {"a", "b"};
  CoherenceMatrix msc = ComputeMsc(Stft(s, StftConfig{}));
  CHECK(msc.gamma_bar(0, 1) < 0.1);
  CHECK(msc.gamma_bar(0, 1) >= 0.0);
}

TEST_CASE("coherence invariant to per channel positive scaling") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(WhiteNoise(16000 * 2, 12));
  s.samples.push_back(WhiteNoise(16000 * 2, 13));
  auto mixed = s.samples[0];
  for (size_t i = 0; i < mixed.size(); ++i) mixed[i] += s.samples[1][i];
  s.samples.push_back(mixed);
  s.channel_ids = {"a", "b", "c"};
  CoherenceMatrix base = ComputeMsc(Stft(s, StftConfig{}));

  AudioSession scaled = s;
  const double gains[3] = {3.0, 0.25, 7.5};
  for (int c = 0; c < 3; ++c)
    for (auto& v : scaled.samples[c]) v = static_cast<float>(v * gains[c]);
  CoherenceMatrix after = ComputeMsc(Stft(scaled, StftConfig{}));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(after.gamma_bar(i, j) ==
            doctest::Approx(base.gamma_bar(i, j)).epsilon(1e-6));
}

TEST_CASE("coherence entries bounded and diagonal exactly one") {
  AudioSession s;
  s.sample_rate = 16000;
  for (int c = 0; c < 4; ++c)
    s.samples.push_back(WhiteNoise(16000, 20 + c)),
        s.channel_ids.push_back(StrCat("m", c));
  CoherenceMatrix msc = ComputeMsc(Stft(s, StftConfig{}));
  for (int i = 0; i < 4; ++i) {
    CHECK(msc.gamma_bar(i, i) == 1.0);
    for (int j = 0; j < 4; ++j) {
      CHECK(msc.gamma_bar(i, j) >= 0.0);
      CHECK(msc.gamma_bar(i, j) <= 1.0);
    }
  }
}

TEST_CASE("silent channel zeroes its coherence row") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(WhiteNoise(16000, 30));
  s.samples.push_back(std::vector<float>(16000, 0.0f));
  s.channel_ids = {"live", "dead"};
  CoherenceMatrix msc = ComputeMsc(Stft(s, StftConfig{}));
  CHECK(msc.gamma_bar(1, 1) == 1.0);
  CHECK(msc.gamma_bar(0, 1) == 0.0);
  CHECK(msc.gamma_bar(1, 0) == 0.0);
}

TEST_CASE("coherence band averaging uses bin centers in range") {
  // Synthetic PSD: MSC is 1.0 in low bins and 0.0 higher up; a band covering
  // only the low bins must average to exactly 1.
  CrossPsd psd;
  psd.channels = 2;
  psd.bins = 9;
  psd.sample_rate = 16000;
  psd.fft_size = 16;  // bin spacing 1000 Hz
  psd.frames_averaged = 100;
  for (int f = 0; f < 9; ++f) {
    Eigen::MatrixXcd m(2, 2);
    double c = f <= 3 ? 1.0 : 0.0;  // bins 0..3 fully coherent
    m << 1.0, c, c, 1.0;
    psd.matrices.push_back(m);
  }
  CoherenceMatrix low = ComputeMsc(psd, 500.0, 3500.0);  // bins 1,2,3
  CHECK(low.gamma_bar(0, 1) == doctest::Approx(1.0));
  CoherenceMatrix mixed = ComputeMsc(psd, 500.0, 5500.0);  // bins 1..5
  CHECK(mixed.gamma_bar(0, 1) == doctest::Approx(3.0 / 5.0));
  CHECK(mixed.band_low_hz == 500.0);
  CHECK(mixed.band_high_hz == 5500.0);
}

TEST_CASE("wav files round trip in both sample formats") {
  TempDir tmp("mcfd_wav");
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(WhiteNoise(5000, 50, 0.2));
  s.samples.push_back(WhiteNoise(5000, 51, 0.2));
  s.channel_ids = {"ch0", "ch1"};

  WriteWav(tmp.file("f32.wav"), s, WavFormat::kFloat32);
  AudioSession f32 = ReadWav(tmp.file("f32.wav"));
  REQUIRE(f32.num_channels() == 2);
  REQUIRE(f32.num_samples() == 5000);
  CHECK(f32.sample_rate == 16000);
  for (size_t i = 0; i < 5000; i += 173)
    CHECK(f32.samples[1][i] == s.samples[1][i]);

  WriteWav(tmp.file("i16.wav"), s, WavFormat::kPcm16);
  AudioSession i16 = ReadWav(tmp.file("i16.wav"));
  REQUIRE(i16.num_samples() == 5000);
  for (size_t i = 0; i < 5000; i += 173)
    CHECK(std::abs(i16.samples[0][i] - s.samples[0][i]) <= 1.0 / 32767.0);

  CHECK_THROWS_AS(ReadWav(tmp.file("missing.wav")), Error);
}

TEST_CASE("audio session slice and validate") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples.push_back(WhiteNoise(16000, 40));
  s.samples.push_back(WhiteNoise(16000, 41));
  s.channel_ids = {"a", "b"};
  s.Validate();
  AudioSession cut = s.Slice(4000, 8000);
  CHECK(cut.num_channels() == 2);
  CHECK(cut.num_samples() == 4000);
  CHECK(cut.samples[0][0] == s.samples[0][4000]);
  CHECK(cut.duration_s() == doctest::Approx(0.25));

  AudioSession bad = s;
  bad.samples[1].pop_back();
  CHECK_THROWS_AS(bad.Validate(), Error);
}
