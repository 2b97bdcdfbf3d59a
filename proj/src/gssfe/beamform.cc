// gssfe/beamform.cc
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

#include "mcfd/beamform.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "mcfd/common.h"

namespace mcfd {

namespace {

SpectralTensor MonoLike(const SpectralTensor& spec) {
  SpectralTensor out = spec;
  out.channels = 1;
  out.data.assign(static_cast<size_t>(spec.frames) * spec.bins,
                  std::complex<float>(0.0f, 0.0f));
  return out;
}

}  // namespace

MvdrResult MvdrExtract(const SpectralTensor& spec, const TfMaskSet& masks) {
  if (masks.num_sources() < 2) {
    throw InputError("MvdrExtract: mask set needs target and complement");
  }
  const Eigen::MatrixXd& target = masks.masks[
      static_cast<size_t>(masks.target_index)];
  if (target.rows() != spec.frames || target.cols() != spec.bins) {
    throw InputError("MvdrExtract: masks not aligned with the tensor");
  }
  const int m = spec.channels;

  MvdrResult result;
  result.target_mask = target;
  result.output = MonoLike(spec);
  result.weights.assign(static_cast<size_t>(spec.bins),
                        Eigen::VectorXcd::Zero(m));
  result.snr_per_reference = Eigen::VectorXd::Zero(m);

  // Per-bin W and covariances are kept to finish reference selection before
  // any output is written.
  std::vector<Eigen::MatrixXcd> w_all(static_cast<size_t>(spec.bins));
  std::vector<Eigen::MatrixXcd> phi_ss_all(static_cast<size_t>(spec.bins));
  std::vector<Eigen::MatrixXcd> phi_nn_all(static_cast<size_t>(spec.bins));
  std::vector<char> usable(static_cast<size_t>(spec.bins), 0);
  int fallback_bins = 0;

  for (int f = 0; f < spec.bins; ++f) {
    Eigen::MatrixXcd phi_ss = Eigen::MatrixXcd::Zero(m, m);
    Eigen::MatrixXcd phi_nn = Eigen::MatrixXcd::Zero(m, m);
    double ss_sum = 0.0, nn_sum = 0.0;
    for (int t = 0; t < spec.frames; ++t) {
      Eigen::VectorXcd x(m);
      for (int c = 0; c < m; ++c) {
        x(c) = std::complex<double>(spec.at(c, t, f));
      }
      const double ms = target(t, f);
      const double mn = 1.0 - ms;
      const Eigen::MatrixXcd outer = x * x.adjoint();
      phi_ss += ms * outer;
      phi_nn += mn * outer;
      ss_sum += ms;
      nn_sum += mn;
    }
    if (ss_sum > 1e-30) phi_ss /= ss_sum;
    if (nn_sum > 1e-30) phi_nn /= nn_sum;

    bool solved = false;
    Eigen::MatrixXcd num;
    const double tr_nn = std::real(phi_nn.trace());
    for (int attempt = 0; attempt < 2 && !solved; ++attempt) {
      Eigen::MatrixXcd reg = phi_nn;
      if (attempt == 1) {
        reg += (1e-6 * std::max(tr_nn, 1e-300) / m) *
               Eigen::MatrixXcd::Identity(m, m);
      }
      Eigen::LDLT<Eigen::MatrixXcd> ldlt(reg);
      if (ldlt.info() != Eigen::Success) continue;
      num = ldlt.solve(phi_ss);
      const std::complex<double> tr = num.trace();
      if (num.allFinite() && std::abs(tr) > 1e-30) {
        num /= tr;
        solved = num.allFinite();
      }
    }
    if (!solved) {
      ++fallback_bins;
      continue;  // masked-reference fallback once the reference is known
    }
    usable[static_cast<size_t>(f)] = 1;
    w_all[static_cast<size_t>(f)] = num;
    phi_ss_all[static_cast<size_t>(f)] = phi_ss;
    phi_nn_all[static_cast<size_t>(f)] = phi_nn;
    for (int r = 0; r < m; ++r) {
      const Eigen::VectorXcd w = num.col(r);
      const double s = std::real(w.dot(phi_ss_all[static_cast<size_t>(f)] * w));
      const double n = std::real(w.dot(phi_nn_all[static_cast<size_t>(f)] * w));
      result.snr_per_reference(r) += s / std::max(n, 1e-30);
    }
  }

  int ref = 0;
  for (int r = 1; r < m; ++r) {
    if (result.snr_per_reference(r) > result.snr_per_reference(ref)) ref = r;
  }
  result.reference = ref;

  for (int f = 0; f < spec.bins; ++f) {
    Eigen::VectorXcd w;
    if (usable[static_cast<size_t>(f)]) {
      w = w_all[static_cast<size_t>(f)].col(ref);
    } else {
      // Masked reference channel: unit weight on the reference, the target
      // mask applied directly.
      w = Eigen::VectorXcd::Zero(m);
      w(ref) = 1.0;
    }
    result.weights[static_cast<size_t>(f)] = w;
    for (int t = 0; t < spec.frames; ++t) {
      std::complex<double> acc(0.0, 0.0);
      for (int c = 0; c < m; ++c) {
        acc += std::conj(w(c)) * std::complex<double>(spec.at(c, t, f));
      }
      if (!usable[static_cast<size_t>(f)]) acc *= target(t, f);
      result.output.at(0, t, f) = std::complex<float>(acc);
    }
  }
  if (fallback_bins > 0) {
    Warn(StrCat("MvdrExtract: ", fallback_bins, " of ", spec.bins,
                " bins fell back to the masked reference channel"));
  }
  return result;
}

SpectralTensor ApplyBeamformer(const SpectralTensor& spec,
                               const std::vector<Eigen::VectorXcd>& weights) {
  if (static_cast<int>(weights.size()) != spec.bins) {
    throw InputError("ApplyBeamformer: one weight vector per bin required");
  }
  SpectralTensor out = MonoLike(spec);
  for (int f = 0; f < spec.bins; ++f) {
    const Eigen::VectorXcd& w = weights[static_cast<size_t>(f)];
    if (static_cast<int>(w.size()) != spec.channels) {
      throw InputError("ApplyBeamformer: weight dimension mismatch");
    }
    for (int t = 0; t < spec.frames; ++t) {
      std::complex<double> acc(0.0, 0.0);
      for (int c = 0; c < spec.channels; ++c) {
        acc += std::conj(w(c)) * std::complex<double>(spec.at(c, t, f));
      }
      out.at(0, t, f) = std::complex<float>(acc);
    }
  }
  return out;
}

void ApplyPostmask(SpectralTensor& spec, const Eigen::MatrixXd& target_mask,
                   double min_gain_db) {
  if (min_gain_db > 0.0) {
    throw InputError("ApplyPostmask: min_gain_db must be <= 0");
  }
  if (target_mask.rows() != spec.frames || target_mask.cols() != spec.bins) {
    throw InputError("ApplyPostmask: mask not aligned with the tensor");
  }
  const double floor = std::pow(10.0, min_gain_db / 20.0);
  for (int c = 0; c < spec.channels; ++c) {
    for (int t = 0; t < spec.frames; ++t) {
      for (int f = 0; f < spec.bins; ++f) {
        spec.at(c, t, f) *=
            static_cast<float>(std::max(target_mask(t, f), floor));
      }
    }
  }
}

}  // namespace mcfd
