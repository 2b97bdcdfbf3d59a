// hyperopt/tpe.cc
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

#include "mcfd/hyperopt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mcfd/common.h"

namespace mcfd {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double Transform(const ParamSpec& p, double x) {
  return p.log_scale ? std::log(x) : x;
}

double Untransform(const ParamSpec& p, double t) {
  double x = p.log_scale ? std::exp(t) : t;
  if (p.kind == ParamKind::kInt) x = std::round(x);
  return std::min(std::max(x, p.low), p.high);
}

// Gaussian kernel density with a uniform prior component over the bounds;
// all in the transformed (log where applicable) domain.
struct Kde {
  std::vector<double> points;
  double sigma = 1.0;
  double lo = 0.0, hi = 1.0;

  Kde(std::vector<double> pts, double t_lo, double t_hi)
      : points(std::move(pts)), lo(t_lo), hi(t_hi) {
    double range = hi - lo;
    double sd = 0.0;
    if (points.size() >= 2) {
      double mean = 0.0;
      for (double v : points) mean += v;
      mean /= points.size();
      for (double v : points) sd += (v - mean) * (v - mean);
      sd = std::sqrt(sd / points.size());
    }
    // Scott bandwidth with a floor so single or clustered points keep a
    // usable kernel width.
    sigma = sd * std::pow(static_cast<double>(std::max<size_t>(
                              points.size(), 1)),
                          -0.2);
    sigma = std::max({sigma, 1e-3 * range, 1e-12});
  }

  double Pdf(double t) const {
    double range = hi - lo;
    if (range <= 0.0) return 1.0;
    double acc = 1.0 / range;  // uniform prior component
    for (double p : points) {
      double z = (t - p) / sigma;
      acc += std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
    }
    return acc / (points.size() + 1);
  }

  double Sample(std::mt19937_64& rng) const {
    if (hi <= lo) return lo;
    std::uniform_int_distribution<std::size_t> pick(0, points.size());
    std::size_t k = pick(rng);
    double t;
    if (k == points.size()) {
      t = std::uniform_real_distribution<double>(lo, hi)(rng);
    } else {
      t = std::normal_distribution<double>(points[k], sigma)(rng);
    }
    return std::min(std::max(t, lo), hi);
  }
};

// Smoothed categorical distribution (count + 1 per choice).
struct CatDist {
  std::vector<double> probs;

  CatDist(const std::vector<std::string>& choices,
          const std::vector<std::string>& observed) {
    probs.assign(choices.size(), 1.0);
    double total = static_cast<double>(choices.size());
    for (const auto& o : observed) {
      for (size_t i = 0; i < choices.size(); ++i)
        if (choices[i] == o) {
          probs[i] += 1.0;
          total += 1.0;
          break;
        }
    }
    for (double& p : probs) p /= total;
  }

  std::size_t Sample(std::mt19937_64& rng) const {
    std::discrete_distribution<std::size_t> d(probs.begin(), probs.end());
    return d(rng);
  }
};

std::vector<const TrialRecord*> CompleteTrials(
    const std::vector<TrialRecord>& history) {
  std::vector<const TrialRecord*> out;
  for (const auto& t : history)
    if (t.status == TrialStatus::kComplete && std::isfinite(t.objective))
      out.push_back(&t);
  return out;
}

}  // namespace

Assignment SuggestTpe(const ParamSpace& space,
                      const std::vector<TrialRecord>& history,
                      const TpeOptions& opts, std::uint64_t seed,
                      std::size_t draw_index) {
  space.Validate();
  if (opts.gamma <= 0.0 || opts.gamma >= 1.0)
    throw InputError("SuggestTpe: gamma must be in (0, 1)");
  if (opts.n_candidates < 1)
    throw InputError("SuggestTpe: n_candidates must be positive");

  std::vector<const TrialRecord*> done = CompleteTrials(history);
  if (static_cast<int>(done.size()) < opts.n_startup)
    return SuggestRandom(space, seed, draw_index);

  std::sort(done.begin(), done.end(),
            [](const TrialRecord* a, const TrialRecord* b) {
              if (a->objective != b->objective)
                return a->objective < b->objective;
              return a->trial_id < b->trial_id;
            });
  size_t n_good = static_cast<size_t>(
      std::ceil(opts.gamma * static_cast<double>(done.size())));
  n_good = std::max<size_t>(1, std::min(n_good, done.size()));

  std::mt19937_64 rng(MixSeed(seed, draw_index));

  // Per-parameter good/bad models.
  struct NumModel {
    Kde good, bad;
  };
  std::map<std::string, NumModel> num_models;
  std::map<std::string, std::pair<CatDist, CatDist>> cat_models;
  for (const auto& p : space.params) {
    if (p.kind == ParamKind::kCategorical) {
      std::vector<std::string> good_obs, bad_obs;
      for (size_t i = 0; i < done.size(); ++i) {
        auto it = done[i]->params.find(p.name);
        if (it == done[i]->params.end() || it->second.is_number) continue;
        (i < n_good ? good_obs : bad_obs).push_back(it->second.category);
      }
      cat_models.emplace(p.name,
                         std::make_pair(CatDist(p.choices, good_obs),
                                        CatDist(p.choices, bad_obs)));
    } else {
      std::vector<double> good_pts, bad_pts;
      for (size_t i = 0; i < done.size(); ++i) {
        auto it = done[i]->params.find(p.name);
        if (it == done[i]->params.end() || !it->second.is_number) continue;
        (i < n_good ? good_pts : bad_pts)
            .push_back(Transform(p, it->second.number));
      }
      double lo = Transform(p, p.low), hi = Transform(p, p.high);
      num_models.emplace(p.name, NumModel{Kde(std::move(good_pts), lo, hi),
                                          Kde(std::move(bad_pts), lo, hi)});
    }
  }

  Assignment best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < opts.n_candidates; ++c) {
    Assignment cand;
    double score = 0.0;
    for (const auto& p : space.params) {
      if (p.kind == ParamKind::kCategorical) {
        const auto& [good, bad] = cat_models.at(p.name);
        std::size_t k = good.Sample(rng);
        cand[p.name] = CategoryValue(p.choices[k]);
        score += std::log(good.probs[k]) - std::log(bad.probs[k]);
      } else {
        const NumModel& m = num_models.at(p.name);
        double t = m.good.Sample(rng);
        double v = Untransform(p, t);
        cand[p.name] = NumberValue(v);
        double tv = Transform(p, v);
        score += std::log(m.good.Pdf(tv)) - std::log(m.bad.Pdf(tv));
      }
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace mcfd
