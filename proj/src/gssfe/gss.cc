// gssfe/gss.cc
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

#include "mcfd/gss.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>

#include "mcfd/common.h"
#include "mcfd/threading.h"

namespace mcfd {

namespace {

// One frequency bin of the mixture EM. Posteriors gamma are (sources x
// frames) with forbidden entries already zero; they stay zero because the
// E-step re-applies the activity pattern.
void EmBin(const SpectralTensor& spec, int bin,
           const std::vector<std::vector<char>>& activity, int speakers,
           int iterations, uint64_t bin_seed,
           std::vector<Eigen::MatrixXd>* out_masks) {
  const int m = spec.channels;
  const int frames = spec.frames;
  const int sources = speakers + 1;  // + noise
  const int noise = speakers;

  // Direction vectors; a silent frame keeps a zero vector and a flag.
  Eigen::MatrixXcd z(m, frames);
  std::vector<char> has_energy(static_cast<size_t>(frames), 0);
  for (int t = 0; t < frames; ++t) {
    Eigen::VectorXcd x(m);
    for (int c = 0; c < m; ++c) {
      x(c) = std::complex<double>(spec.at(c, t, bin));
    }
    const double norm = x.norm();
    if (norm > 1e-30) {
      z.col(t) = x / norm;
      has_energy[static_cast<size_t>(t)] = 1;
    } else {
      z.col(t).setZero();
    }
  }

  const auto allowed = [&](int k, int t) -> bool {
    if (k == noise) return true;
    return activity[static_cast<size_t>(k)][static_cast<size_t>(t)] != 0;
  };

  // Init: uniform over the sources allowed in the frame, with a tiny seeded
  // perturbation so identical densities cannot freeze ties.
  std::mt19937_64 rng(bin_seed);
  std::uniform_real_distribution<double> jitter(0.0, 1e-3);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(sources, frames);
  for (int t = 0; t < frames; ++t) {
    double sum = 0.0;
    for (int k = 0; k < sources; ++k) {
      if (!allowed(k, t)) continue;
      const double g = 1.0 + jitter(rng);
      gamma(k, t) = g;
      sum += g;
    }
    for (int k = 0; k < sources; ++k) gamma(k, t) /= sum;
  }

  std::vector<Eigen::MatrixXcd> b(
      static_cast<size_t>(sources),
      Eigen::MatrixXcd::Identity(m, m));
  for (int iter = 0; iter < iterations; ++iter) {
    // M-step: B_k = M * sum_t gamma zz^H / (z^H B_prev^-1 z) / sum_t gamma,
    // trace-normalized to M so the scale cannot drift.
    std::vector<Eigen::MatrixXcd> b_next(
        static_cast<size_t>(sources), Eigen::MatrixXcd::Zero(m, m));
    for (int k = 0; k < sources; ++k) {
      Eigen::MatrixXcd reg =
          b[static_cast<size_t>(k)] +
          1e-10 * Eigen::MatrixXcd::Identity(m, m);
      Eigen::LDLT<Eigen::MatrixXcd> ldlt(reg);
      double gamma_sum = 0.0;
      for (int t = 0; t < frames; ++t) {
        const double g = gamma(k, t);
        if (g <= 0.0 || !has_energy[static_cast<size_t>(t)]) continue;
        const double q = std::max(
            std::real(z.col(t).dot(ldlt.solve(z.col(t)))), 1e-10);
        b_next[static_cast<size_t>(k)] +=
            (g / q) * (z.col(t) * z.col(t).adjoint());
        gamma_sum += g;
      }
      if (gamma_sum <= 1e-30) {
        b_next[static_cast<size_t>(k)] = Eigen::MatrixXcd::Identity(m, m);
        continue;
      }
      b_next[static_cast<size_t>(k)] *= static_cast<double>(m) / gamma_sum;
      const double tr =
          std::real(b_next[static_cast<size_t>(k)].trace());
      if (tr > 1e-30) {
        b_next[static_cast<size_t>(k)] *= static_cast<double>(m) / tr;
      } else {
        b_next[static_cast<size_t>(k)] = Eigen::MatrixXcd::Identity(m, m);
      }
    }
    b = std::move(b_next);

    // E-step in the log domain: ln p_k(z) = -ln det B_k - M ln(z^H B_k^-1 z)
    // up to a shared constant; posteriors restricted to allowed sources.
    std::vector<Eigen::LDLT<Eigen::MatrixXcd>> solvers;
    std::vector<double> logdets(static_cast<size_t>(sources));
    solvers.reserve(static_cast<size_t>(sources));
    for (int k = 0; k < sources; ++k) {
      Eigen::MatrixXcd reg =
          b[static_cast<size_t>(k)] +
          1e-10 * Eigen::MatrixXcd::Identity(m, m);
      solvers.emplace_back(reg);
      double logdet = 0.0;
      const auto& d = solvers.back().vectorD();
      for (int i = 0; i < m; ++i) {
        logdet += std::log(std::max(std::real(d(i)), 1e-300));
      }
      logdets[static_cast<size_t>(k)] = logdet;
    }
    for (int t = 0; t < frames; ++t) {
      if (!has_energy[static_cast<size_t>(t)]) {
        // No direction evidence: keep the activity-uniform posterior.
        double sum = 0.0;
        for (int k = 0; k < sources; ++k) {
          gamma(k, t) = allowed(k, t) ? 1.0 : 0.0;
          sum += gamma(k, t);
        }
        for (int k = 0; k < sources; ++k) gamma(k, t) /= sum;
        continue;
      }
      double max_log = -1e300;
      std::vector<double> logp(static_cast<size_t>(sources), -1e300);
      for (int k = 0; k < sources; ++k) {
        if (!allowed(k, t)) continue;
        const double q = std::max(
            std::real(z.col(t).dot(
                solvers[static_cast<size_t>(k)].solve(z.col(t)))),
            1e-10);
        logp[static_cast<size_t>(k)] =
            -logdets[static_cast<size_t>(k)] - m * std::log(q);
        max_log = std::max(max_log, logp[static_cast<size_t>(k)]);
      }
      double sum = 0.0;
      for (int k = 0; k < sources; ++k) {
        const double v = allowed(k, t)
                             ? std::exp(logp[static_cast<size_t>(k)] - max_log)
                             : 0.0;
        gamma(k, t) = v;
        sum += v;
      }
      for (int k = 0; k < sources; ++k) gamma(k, t) /= sum;
    }
  }

  for (int k = 0; k < sources; ++k) {
    for (int t = 0; t < frames; ++t) {
      (*out_masks)[static_cast<size_t>(k)](t, bin) = gamma(k, t);
    }
  }
}

}  // namespace

TfMaskSet GssMasks(const SpectralTensor& spec,
                   const std::vector<std::vector<char>>& activity,
                   const GssOptions& opts) {
  if (spec.channels < 2) {
    throw InputError("GssMasks: at least two channels required");
  }
  if (activity.empty()) {
    throw InputError("GssMasks: at least the target activity row required");
  }
  const int speakers = static_cast<int>(activity.size());
  for (const std::vector<char>& row : activity) {
    if (static_cast<int>(row.size()) != spec.frames) {
      throw InputError(StrCat("GssMasks: activity rows need ", spec.frames,
                              " frames"));
    }
  }
  bool target_active = false;
  for (char a : activity[0]) target_active = target_active || a != 0;
  if (!target_active) throw InputError("GssMasks: empty target annotation");
  if (opts.em_iterations < 1) {
    throw InputError("GssMasks: em_iterations must be >= 1");
  }

  TfMaskSet set;
  set.target_index = 0;
  set.masks.assign(static_cast<size_t>(speakers) + 1,
                   Eigen::MatrixXd::Zero(spec.frames, spec.bins));
  ParallelFor(static_cast<size_t>(spec.bins), opts.num_workers,
              [&](size_t bin) {
                EmBin(spec, static_cast<int>(bin), activity, speakers,
                      opts.em_iterations,
                      MixSeed(opts.seed, static_cast<uint64_t>(bin)),
                      &set.masks);
              });
  return set;
}

}  // namespace mcfd
