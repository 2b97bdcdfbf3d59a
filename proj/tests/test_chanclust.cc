// tests/test_chanclust.cc
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

#include <Eigen/Core>
#include <vector>

#include "doctest.h"
#include "mcfd/chanclust.h"
#include "mcfd/common.h"
#include "mcfd/nmesc.h"
#include "testutil.h"

using namespace mcfd;
using namespace mcfd::test;

namespace {

// Three microphone arrays (4 + 3 + 2 mics) in separate rooms: each array
// hears only its own source, delayed and attenuated per mic, plus
// independent sensor noise.
AudioSession ThreeArraySession(uint64_t seed, double seconds = 4.0) {
  const int fs = 16000;
  const size_t n = static_cast<size_t>(seconds * fs);
  std::vector<std::vector<float>> sources = {
      BandNoise(n, fs, 300.0, 3000.0, MixSeed(seed, 1), 64, 0.3),
      BandNoise(n, fs, 400.0, 3200.0, MixSeed(seed, 2), 64, 0.3),
      BandNoise(n, fs, 350.0, 2800.0, MixSeed(seed, 3), 64, 0.3)};
  const int sizes[3] = {4, 3, 2};
  AudioSession s;
  s.sample_rate = fs;
  int mic = 0;
  for (int a = 0; a < 3; ++a) {
    for (int m = 0; m < sizes[a]; ++m, ++mic) {
      std::vector<float> ch = Delayed(sources[a], 3 * m, 1.0 - 0.05 * m);
      auto noise = WhiteNoise(n, MixSeed(seed, 100 + mic), 0.002);
      for (size_t i = 0; i < n; ++i) ch[i] += noise[i];
      s.samples.push_back(std::move(ch));
      s.channel_ids.push_back(StrCat("a", a, "m", m));
    }
  }
  return s;
}

Eigen::MatrixXd BlockAffinity(const std::vector<int>& sizes, double in_block,
                              double cross, uint64_t seed) {
  int n = 0;
  for (int s : sizes) n += s;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  Eigen::MatrixXd a(n, n);
  int r0 = 0;
  std::vector<int> owner(n);
  for (size_t b = 0, i = 0; b < sizes.size(); ++b)
    for (int k = 0; k < sizes[b]; ++k, ++i) owner[i] = static_cast<int>(b);
  (void)r0;
  for (int i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double v = (owner[i] == owner[j] ? in_block : cross) + jitter(rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

}  // namespace

TEST_CASE("nmesc recovers block structure and relabels by first use") {
  Eigen::MatrixXd a = BlockAffinity({4, 3, 2}, 0.9, 0.05, 11);
  NmescInfo info;
  ClusterAssignment got = Nmesc(a, NmescOptions{}, &info);
  CHECK(got.num_clusters == 3);
  std::vector<int> truth = {0, 0, 0, 0, 1, 1, 1, 2, 2};
  CHECK(AdjustedRandIndex(got.labels, truth) == doctest::Approx(1.0));
  // First-use relabeling: the first row always takes label 0 and new labels
  // appear in increasing order.
  CHECK(got.labels[0] == 0);
  int seen = 0;
  for (int l : got.labels) {
    CHECK(l <= seen);
    seen = std::max(seen, l + 1);
  }
  CHECK(info.chosen_p >= 1);
  CHECK(info.eigengaps.size() >= 2);
}

TEST_CASE("nmesc finds a single cluster in a uniform graph") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Constant(6, 6, 0.95);
  for (int i = 0; i < 6; ++i) a(i, i) = 1.0;
  ClusterAssignment got = Nmesc(a);
  CHECK(got.num_clusters == 1);
  for (int l : got.labels) CHECK(l == 0);
}

TEST_CASE("nmesc cluster count never reaches the channel count") {
  // Near-diagonal affinity pushes toward many clusters; the estimate is
  // still capped at N-1 and max_clusters.
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(5, 5);
  a.array() += 0.01;
  ClusterAssignment got = Nmesc(a);
  CHECK(got.num_clusters <= 4);

  NmescOptions capped;
  capped.max_clusters = 2;
  Eigen::MatrixXd blocks = BlockAffinity({3, 3, 3}, 0.9, 0.05, 12);
  ClusterAssignment lim = Nmesc(blocks, capped);
  CHECK(lim.num_clusters <= 2);
}

TEST_CASE("nmesc deterministic for a fixed seed") {
  Eigen::MatrixXd a = BlockAffinity({5, 4}, 0.8, 0.1, 13);
  ClusterAssignment x = Nmesc(a);
  ClusterAssignment y = Nmesc(a);
  CHECK(x.labels == y.labels);
  CHECK(x.num_clusters == y.num_clusters);
}

TEST_CASE("nmesc input validation") {
  CHECK_THROWS_AS(Nmesc(Eigen::MatrixXd()), InputError);
  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(Nmesc(rect), InputError);
  Eigen::MatrixXd asym(3, 3);
  asym.setIdentity();
  asym(0, 1) = 0.9;  // (1,0) stays 0
  CHECK_THROWS_AS(Nmesc(asym), InputError);
}

TEST_CASE("kmeans splits well separated points and keeps clusters non-empty") {
  Eigen::MatrixXd pts(6, 2);
  pts << 0.0, 0.1, 0.1, -0.1, -0.1, 0.0,  //
      5.0, 5.1, 5.1, 4.9, 4.9, 5.0;
  std::vector<int> got = KMeans(pts, 2, 17);
  CHECK(got[0] == got[1]);
  CHECK(got[0] == got[2]);
  CHECK(got[3] == got[4]);
  CHECK(got[3] == got[5]);
  CHECK(got[0] != got[3]);

  std::vector<int> all = KMeans(pts, 6, 17);
  std::vector<bool> hit(6, false);
  for (int l : all) hit[l] = true;
  for (bool h : hit) CHECK(h);

  CHECK_THROWS_AS(KMeans(pts, 0, 17), InputError);
  CHECK_THROWS_AS(KMeans(pts, 7, 17), InputError);
}

TEST_CASE("cluster channels separates three arrays") {
  AudioSession s = ThreeArraySession(21);
  ChannelClusterResult res = ClusterChannels(s);
  CHECK(res.assignment.num_clusters == 3);
  std::vector<int> truth = {0, 0, 0, 0, 1, 1, 1, 2, 2};
  CHECK(AdjustedRandIndex(res.assignment.labels, truth) ==
        doctest::Approx(1.0));
  // In-array coherence far above cross-array coherence.
  CHECK(res.msc.gamma_bar(0, 1) > 0.6);
  CHECK(res.msc.gamma_bar(0, 5) < 0.3);
  REQUIRE(res.clustered.num_channels() == 3);
  CHECK(res.clustered.channel_ids[0] == "cluster0");
  CHECK(res.clustered.channel_ids[2] == "cluster2");
  CHECK(res.clustered.num_samples() == s.num_samples());
}

TEST_CASE("cluster channels deterministic") {
  AudioSession s = ThreeArraySession(22, 2.0);
  ChannelClusterResult a = ClusterChannels(s);
  ChannelClusterResult b = ClusterChannels(s);
  CHECK(a.assignment.labels == b.assignment.labels);
  CHECK(a.clustered.samples == b.clustered.samples);
}

TEST_CASE("average cluster channels takes exact member means") {
  AudioSession s;
  s.sample_rate = 16000;
  s.samples = {{1.0f, 2.0f, 3.0f},
               {3.0f, 4.0f, 5.0f},
               {10.0f, 20.0f, 30.0f}};
  s.channel_ids = {"a", "b", "c"};
  ClusterAssignment asg;
  asg.labels = {0, 0, 1};
  asg.num_clusters = 2;
  AudioSession avg = AverageClusterChannels(s, asg);
  REQUIRE(avg.num_channels() == 2);
  CHECK(avg.samples[0][0] == doctest::Approx(2.0));
  CHECK(avg.samples[0][2] == doctest::Approx(4.0));
  CHECK(avg.samples[1][1] == doctest::Approx(20.0));
  CHECK(avg.channel_ids[0] == "cluster0");
  CHECK(avg.channel_ids[1] == "cluster1");

  ClusterAssignment bad;
  bad.labels = {0, 0};  // wrong size
  bad.num_clusters = 1;
  CHECK_THROWS_AS(AverageClusterChannels(s, bad), InputError);

  ClusterAssignment hole;
  hole.labels = {0, 0, 0};
  hole.num_clusters = 2;  // cluster 1 has no members
  CHECK_THROWS_AS(AverageClusterChannels(s, hole), InputError);
}

TEST_CASE("two channel sessions collapse to one cluster") {
  // With two channels the count estimate is capped below the channel count,
  // so distinct rooms still fold into a single averaged stream.
  AudioSession s;
  const int fs = 16000;
  s.sample_rate = fs;
  s.samples.push_back(BandNoise(fs * 2, fs, 300.0, 3000.0, 31, 48, 0.3));
  s.samples.push_back(BandNoise(fs * 2, fs, 300.0, 3000.0, 32, 48, 0.3));
  s.channel_ids = {"x", "y"};
  ChannelClusterResult res = ClusterChannels(s);
  CHECK(res.assignment.num_clusters == 1);
  CHECK(res.clustered.num_channels() == 1);
}
