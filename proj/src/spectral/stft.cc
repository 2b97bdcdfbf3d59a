// spectral/stft.cc
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

#include "mcfd/stft.h"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include "mcfd/common.h"

namespace mcfd {

namespace {

// FFTW's planner is not thread-safe; plan creation/destruction is serialized.
std::mutex& FftwMutex() {
  static std::mutex m;
  return m;
}

class FftR2C {
 public:
  explicit FftR2C(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(FftwMutex());
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~FftR2C() {
    std::lock_guard<std::mutex> lock(FftwMutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  FftR2C(const FftR2C&) = delete;
  FftR2C& operator=(const FftR2C&) = delete;

  double* in() { return in_; }
  // Unnormalized transform of in()[0..n); result has n/2+1 bins.
  const fftw_complex* Execute() {
    fftw_execute(plan_);
    return out_;
  }

 private:
  int n_;
  double* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

class FftC2R {
 public:
  explicit FftC2R(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(FftwMutex());
    in_ = fftw_alloc_complex(n / 2 + 1);
    out_ = fftw_alloc_real(n);
    plan_ = fftw_plan_dft_c2r_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~FftC2R() {
    std::lock_guard<std::mutex> lock(FftwMutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  FftC2R(const FftC2R&) = delete;
  FftC2R& operator=(const FftC2R&) = delete;

  fftw_complex* in() { return in_; }
  // Inverse transform; caller divides by n. Clobbers in().
  const double* Execute() {
    fftw_execute(plan_);
    return out_;
  }

 private:
  int n_;
  fftw_complex* in_;
  double* out_;
  fftw_plan plan_;
};

int MsToSamples(double ms, int sample_rate) {
  return static_cast<int>(std::lround(ms * sample_rate / 1000.0));
}

}  // namespace

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> MakeWindow(WindowFn fn, int length) {
  std::vector<double> w(length);
  for (int i = 0; i < length; ++i) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / length);
    w[i] = fn == WindowFn::kHann ? hann : std::sqrt(hann);
  }
  return w;
}

SpectralTensor Stft(const AudioSession& audio, const StftConfig& cfg) {
  audio.Validate();
  if (cfg.hop_length_ms <= 0.0) {
    throw InputError("Stft: hop length must be positive");
  }
  if (cfg.window_length_ms < cfg.hop_length_ms) {
    throw InputError("Stft: window must be >= hop");
  }
  const int fs = audio.sample_rate;
  const int win = MsToSamples(cfg.window_length_ms, fs);
  const int hop = MsToSamples(cfg.hop_length_ms, fs);
  if (win <= 0 || hop <= 0) throw InputError("Stft: degenerate window/hop");
  const std::size_t n = audio.num_samples();
  if (n < static_cast<std::size_t>(win)) {
    throw InputError(StrCat("Stft: signal (", n, " samples) shorter than one ",
                            win, "-sample window"));
  }

  const int fft = NextPow2(win);
  const int bins = fft / 2 + 1;
  const int pad = win / 2;
  const int frames =
      static_cast<int>((n + 2 * static_cast<std::size_t>(pad) - win) / hop) + 1;

  SpectralTensor spec;
  spec.channels = audio.num_channels();
  spec.frames = frames;
  spec.bins = bins;
  spec.sample_rate = fs;
  spec.win_samples = win;
  spec.hop_samples = hop;
  spec.fft_size = fft;
  spec.signal_length = n;
  spec.window_length_ms = cfg.window_length_ms;
  spec.hop_length_ms = cfg.hop_length_ms;
  spec.window = cfg.window;
  spec.data.assign(static_cast<std::size_t>(spec.channels) * frames * bins,
                   std::complex<float>(0.0f, 0.0f));

  const std::vector<double> window = MakeWindow(cfg.window, win);
  FftR2C fft_plan(fft);

  for (int c = 0; c < spec.channels; ++c) {
    const std::vector<float>& x = audio.samples[c];
    for (int t = 0; t < frames; ++t) {
      double* in = fft_plan.in();
      const long start = static_cast<long>(t) * hop - pad;
      for (int i = 0; i < win; ++i) {
        const long idx = start + i;
        const double s =
            (idx >= 0 && idx < static_cast<long>(n)) ? x[idx] : 0.0;
        in[i] = s * window[i];
      }
      std::memset(in + win, 0, sizeof(double) * (fft - win));
      const fftw_complex* out = fft_plan.Execute();
      std::complex<float>* row = &spec.at(c, t, 0);
      for (int f = 0; f < bins; ++f) {
        row[f] = std::complex<float>(static_cast<float>(out[f][0]),
                                     static_cast<float>(out[f][1]));
      }
    }
  }
  return spec;
}

AudioSession Istft(const SpectralTensor& spec) {
  if (spec.channels <= 0 || spec.frames <= 0 || spec.bins <= 0) {
    throw Error("Istft: empty tensor");
  }
  if (spec.bins != spec.fft_size / 2 + 1 || spec.win_samples > spec.fft_size ||
      spec.hop_samples <= 0) {
    throw Error("Istft: inconsistent frame geometry");
  }
  const int win = spec.win_samples;
  const int hop = spec.hop_samples;
  const int pad = win / 2;
  const std::size_t n = spec.signal_length;
  const std::size_t padded = n + 2 * static_cast<std::size_t>(pad);
  // The tensor must cover the padded signal with its frame grid.
  const int expect_frames =
      static_cast<int>((padded - win) / hop) + 1;
  if (spec.frames != expect_frames) {
    throw Error(StrCat("Istft: frame count ", spec.frames,
                       " inconsistent with signal length (expected ",
                       expect_frames, ")"));
  }

  const std::vector<double> window = MakeWindow(spec.window, win);
  FftC2R ifft(spec.fft_size);

  AudioSession out;
  out.sample_rate = spec.sample_rate;
  out.samples.assign(spec.channels, std::vector<float>(n, 0.0f));
  for (int c = 0; c < spec.channels; ++c) {
    out.channel_ids.push_back("ch" + std::to_string(c));
  }

  std::vector<double> acc(padded), norm(padded);
  for (int c = 0; c < spec.channels; ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    std::fill(norm.begin(), norm.end(), 0.0);
    for (int t = 0; t < spec.frames; ++t) {
      fftw_complex* in = ifft.in();
      const std::complex<float>* row = &spec.at(c, t, 0);
      for (int f = 0; f < spec.bins; ++f) {
        in[f][0] = row[f].real();
        in[f][1] = row[f].imag();
      }
      const double* frame = ifft.Execute();
      const std::size_t start = static_cast<std::size_t>(t) * hop;
      for (int i = 0; i < win; ++i) {
        const double sample = frame[i] / spec.fft_size;
        acc[start + i] += window[i] * sample;
        norm[start + i] += window[i] * window[i];
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double d = norm[j + pad];
      out.samples[c][j] =
          d > 1e-10 ? static_cast<float>(acc[j + pad] / d) : 0.0f;
    }
  }
  return out;
}

}  // namespace mcfd
