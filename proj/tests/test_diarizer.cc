// tests/test_diarizer.cc
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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mcfd/common.h"
#include "mcfd/diarizer.h"
#include "mcfd/embedding.h"
#include "mcfd/rttm.h"
#include "mcfd/vad.h"
#include "testutil.h"

using namespace mcfd;
using namespace mcfd::test;

namespace {

Eigen::VectorXd Basis(int i, int dim) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v(i) = 1.0;
  return v;
}

// One scale whose segments are 1 s windows around the given centers.
ScaleEmbeddings MakeScale(const std::vector<double>& centers,
                          const std::vector<Eigen::VectorXd>& vectors) {
  ScaleEmbeddings scale;
  scale.grid.centers = centers;
  for (double c : centers) scale.grid.bounds.push_back({c - 0.5, c + 0.5});
  scale.vectors.resize(static_cast<int>(vectors.size()),
                       static_cast<int>(vectors[0].size()));
  for (size_t i = 0; i < vectors.size(); ++i) {
    scale.vectors.row(static_cast<int>(i)) = vectors[i].transpose();
  }
  return scale;
}

double Sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double TotalDuration(const DiarSegments& segs) {
  double sum = 0.0;
  for (const DiarSegment& s : segs) sum += s.duration();
  return sum;
}

std::string RttmString(const std::string& session, const DiarSegments& segs) {
  std::ostringstream out;
  WriteRttm(out, session, segs);
  return out.str();
}

}  // namespace

TEST_CASE("diarizer: scale weights hit both endpoints exactly") {
  for (double r : {0.5, 1.0, 1.4, 2.5}) {
    for (int k : {2, 3, 5, 8}) {
      const std::vector<double> w = ScaleWeights(r, k);
      REQUIRE(static_cast<int>(w.size()) == k);
      CHECK(w[0] == r);
      CHECK(w[static_cast<size_t>(k - 1)] == 1.0);
    }
  }

  const std::vector<double> uniform = ScaleWeights(1.0, 3);
  CHECK(uniform == std::vector<double>{1.0, 1.0, 1.0});

  const std::vector<double> up = ScaleWeights(1.4, 3);
  CHECK(up[0] == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(up[1] == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(up[2] == doctest::Approx(1.0).epsilon(1e-12));

  // r < 1 gives the longer scales less weight.
  const std::vector<double> down = ScaleWeights(0.6, 3);
  CHECK(down[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(down[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(down[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(down[0] < down[2]);

  CHECK_THROWS_AS(ScaleWeights(0.0, 3), InputError);
  CHECK_THROWS_AS(ScaleWeights(-1.0, 3), InputError);
  CHECK_THROWS_AS(ScaleWeights(1.0, 1), InputError);
}

TEST_CASE("diarizer: multiscale segmentation windows each speech span") {
  ScaleConfig cfg;

  SUBCASE("6 s span at the 3 s scale gives centers 1.5, 3.0, 4.5") {
    const std::vector<SegmentGrid> grids =
        MultiscaleSegment({{0.0, 6.0}}, cfg);
    REQUIRE(grids.size() == 3);
    REQUIRE(grids[0].size() == 3);
    CHECK(grids[0].centers[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(grids[0].centers[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(grids[0].centers[2] == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(grids[0].bounds[0].begin_s == doctest::Approx(0.0));
    CHECK(grids[0].bounds[2].end_s == doctest::Approx(6.0));
    // 1.5 s scale, hop 0.75: starts 0 .. 4.5 -> 7 windows.
    CHECK(grids[1].size() == 7);
    // 0.5 s scale, hop 0.25: starts 0 .. 5.5 -> 23 windows.
    CHECK(grids[2].size() == 23);
  }

  SUBCASE("a tail not reached by the hop gets a flush window") {
    const std::vector<SegmentGrid> grids =
        MultiscaleSegment({{0.0, 7.0}}, cfg);
    REQUIRE(grids[0].size() == 4);
    CHECK(grids[0].bounds[3].begin_s == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(grids[0].bounds[3].end_s == doctest::Approx(7.0).epsilon(1e-12));
    for (const TimeSpan& b : grids[0].bounds) {
      CHECK(b.duration() == doctest::Approx(3.0).epsilon(1e-12));
    }
  }

  SUBCASE("a span shorter than every scale yields one segment per scale") {
    const std::vector<SegmentGrid> grids =
        MultiscaleSegment({{1.0, 1.3}}, cfg);
    for (const SegmentGrid& g : grids) {
      REQUIRE(g.size() == 1);
      CHECK(g.bounds[0].begin_s == doctest::Approx(1.0));
      CHECK(g.bounds[0].end_s == doctest::Approx(1.3));
      CHECK(g.centers[0] == doctest::Approx(1.15));
    }
  }

  SUBCASE("empty speech is a valid empty grid") {
    const std::vector<SegmentGrid> grids = MultiscaleSegment({}, cfg);
    REQUIRE(grids.size() == 3);
    for (const SegmentGrid& g : grids) CHECK(g.size() == 0);
  }

  SUBCASE("centers are strictly increasing across multiple spans") {
    const std::vector<SegmentGrid> grids =
        MultiscaleSegment({{0.0, 4.0}, {10.0, 12.5}, {20.0, 20.2}}, cfg);
    for (const SegmentGrid& g : grids) {
      for (int i = 1; i < g.size(); ++i) {
        CHECK(g.centers[static_cast<size_t>(i)] >
              g.centers[static_cast<size_t>(i - 1)]);
      }
    }
  }

  SUBCASE("invalid spans and configs are rejected") {
    CHECK_THROWS_AS(MultiscaleSegment({{2.0, 2.0}}, cfg), InputError);
    CHECK_THROWS_AS(MultiscaleSegment({{0.0, 3.0}, {2.5, 5.0}}, cfg),
                    InputError);
    ScaleConfig bad = cfg;
    bad.scale_lengths_s = {1.0, 2.0};
    CHECK_THROWS_AS(MultiscaleSegment({{0.0, 6.0}}, bad), InputError);
    bad = cfg;
    bad.overlap = 1.0;
    CHECK_THROWS_AS(MultiscaleSegment({{0.0, 6.0}}, bad), InputError);
    bad = cfg;
    bad.r_value = 0.0;
    CHECK_THROWS_AS(bad.Validate(), InputError);
    bad = cfg;
    bad.finest_resolution_s = 0.0;
    CHECK_THROWS_AS(bad.Validate(), InputError);
    bad = cfg;
    bad.scale_lengths_s.clear();
    CHECK_THROWS_AS(bad.Validate(), InputError);
  }
}

TEST_CASE("diarizer: nearest-center lookup breaks ties toward the earlier") {
  const std::vector<double> centers = {1.0, 3.0, 10.0};
  const std::vector<int> idx =
      NearestCenter(centers, {0.0, 1.0, 2.0, 2.6, 6.5, 6.51, 99.0});
  CHECK(idx == std::vector<int>{0, 0, 0, 1, 1, 2, 2});
  CHECK_THROWS_AS(NearestCenter({}, {1.0}), InputError);
}

TEST_CASE("diarizer: pair interpolation normalizes squared weights") {
  const int dim = 4;
  const Eigen::VectorXd u = Basis(0, dim);
  const Eigen::VectorXd w = Basis(1, dim);

  SUBCASE("equidistant orthonormal neighbors blend as (e_L + e_R) / sqrt 2") {
    ScaleEmbeddings emb = MakeScale({0.0, 2.0}, {u, w});
    const Eigen::MatrixXd out = InterpolateEmbeddings(emb, {1.0});
    const Eigen::VectorXd want = (u + w) / std::sqrt(2.0);
    CHECK((out.row(0).transpose() - want).norm() < 1e-12);
  }

  SUBCASE("equal neighbors give sqrt 2 times the vector, not renormalized") {
    ScaleEmbeddings emb = MakeScale({0.0, 2.0}, {u, u});
    const Eigen::MatrixXd out = InterpolateEmbeddings(emb, {1.0});
    CHECK((out.row(0).transpose() - std::sqrt(2.0) * u).norm() < 1e-12);
    CHECK(out.row(0).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  SUBCASE("squared weights sum to one at any interior position") {
    ScaleEmbeddings emb = MakeScale({0.0, 1.0}, {u, w});
    for (double t : {0.1, 0.3, 0.5, 0.77, 0.9}) {
      const Eigen::MatrixXd out = InterpolateEmbeddings(emb, {t});
      // Orthonormal neighbors turn the weight-norm identity into an output
      // norm of exactly one.
      CHECK(out.row(0).squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("a target on the left center takes the right embedding verbatim") {
    ScaleEmbeddings emb = MakeScale({1.0, 2.0}, {u, w});
    const Eigen::MatrixXd out = InterpolateEmbeddings(emb, {1.0});
    CHECK((out.row(0).transpose() - w).norm() < 1e-12);
  }

  SUBCASE("targets outside the hull copy the nearest embedding") {
    ScaleEmbeddings emb = MakeScale({1.0, 2.0}, {u, w});
    const Eigen::MatrixXd out = InterpolateEmbeddings(emb, {0.2, 5.0});
    CHECK((out.row(0).transpose() - u).norm() == 0.0);
    CHECK((out.row(1).transpose() - w).norm() == 0.0);
  }

  SUBCASE("a single segment serves every target") {
    ScaleEmbeddings emb = MakeScale({3.0}, {w});
    const Eigen::MatrixXd out = InterpolateEmbeddings(emb, {0.0, 3.0, 9.0});
    for (int i = 0; i < 3; ++i) {
      CHECK((out.row(i).transpose() - w).norm() == 0.0);
    }
  }

  SUBCASE("mismatched rows are rejected") {
    ScaleEmbeddings emb = MakeScale({0.0, 2.0}, {u, w});
    emb.vectors.conservativeResize(1, dim);
    CHECK_THROWS_AS(InterpolateEmbeddings(emb, {1.0}), InputError);
    CHECK_THROWS_AS(InterpolateEmbeddings(ScaleEmbeddings{}, {1.0}),
                    InputError);
  }
}

TEST_CASE("diarizer: supervector drops the least-correlated channel") {
  const int dim = 4;
  const Eigen::VectorXd u = Basis(0, dim);
  const Eigen::VectorXd w = Basis(3, dim);

  SUBCASE("single channel passes through untouched") {
    Eigen::VectorXd v(2);
    v << 2.0, 0.0;  // deliberately not unit norm
    const Eigen::VectorXd out = MultichannelSupervector({v});
    CHECK((out - v).norm() == 0.0);
  }

  SUBCASE("two channels keep exactly one, renormalized") {
    Eigen::VectorXd b(dim);
    b << 3.0, 4.0, 0.0, 0.0;
    const Eigen::VectorXd out = MultichannelSupervector({u, b});
    REQUIRE(out.size() == dim);
    Eigen::VectorXd want(dim);
    want << 0.6, 0.8, 0.0, 0.0;  // b is closer to the mean, u is dropped
    CHECK((out - want).norm() < 1e-12);
  }

  SUBCASE("the odd channel out is excluded") {
    const Eigen::VectorXd out = MultichannelSupervector({u, u, w});
    REQUIRE(out.size() == 2 * dim);
    Eigen::VectorXd want(2 * dim);
    want << u / std::sqrt(2.0), u / std::sqrt(2.0);
    CHECK((out - want).norm() < 1e-12);
    CHECK(out.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("output length is channels minus one times the dimension") {
    const std::vector<Eigen::VectorXd> five(5, u);
    CHECK(MultichannelSupervector(five).size() == 4 * dim);
  }

  SUBCASE("mismatched dimensions and empty input are rejected") {
    CHECK_THROWS_AS(MultichannelSupervector({}), InputError);
    Eigen::VectorXd shorter = Basis(0, 3);
    CHECK_THROWS_AS(MultichannelSupervector({u, shorter}), InputError);
  }
}

TEST_CASE("diarizer: initial clustering reproduces the weighted affinity") {
  const int dim = 4;
  const Eigen::VectorXd u = Basis(0, dim);

  SUBCASE("affinity is the rescaled weighted mean cosine across scales") {
    const double theta = 0.5 * M_PI;  // orthogonal pair on the fine scale
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(0) = std::cos(theta);
    v(1) = std::sin(theta);
    MultiScaleEmbeddings emb;
    emb.push_back(MakeScale({5.0}, {Basis(2, dim)}));  // coarse: one segment
    emb.push_back(MakeScale({0.0, 10.0}, {u, v}));
    Eigen::MatrixXd affinity;
    InitialClustering(emb, {1.4, 1.0}, 4, 17, &affinity);
    REQUIRE(affinity.rows() == 2);
    // Both fine segments map to the lone coarse segment, so the coarse term
    // contributes cosine 1 everywhere.
    const double want = ((1.4 * 1.0 + 1.0 * std::cos(theta)) / 2.4 + 1.0) / 2.0;
    CHECK(affinity(0, 1) == doctest::Approx(want).epsilon(1e-12));
    CHECK(affinity(1, 0) == doctest::Approx(want).epsilon(1e-12));
    CHECK(affinity(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(affinity(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("identical embeddings collapse to one speaker") {
    MultiScaleEmbeddings emb;
    emb.push_back(MakeScale({0.0, 1.0, 2.0, 3.0, 4.0, 5.0},
                            std::vector<Eigen::VectorXd>(6, u)));
    const ClusterAssignment got = InitialClustering(emb, {1.0}, 8, 17);
    CHECK(got.num_clusters == 1);
    CHECK(got.labels == std::vector<int>(6, 0));
  }

  SUBCASE("two separated blobs come back as two speakers") {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> jitter(0.0, 0.05);
    std::vector<double> centers;
    std::vector<Eigen::VectorXd> vectors;
    std::vector<int> truth;
    for (int i = 0; i < 12; ++i) {
      const int spk = i < 6 ? 0 : 1;
      Eigen::VectorXd e = Basis(spk, dim);
      for (int d = 0; d < dim; ++d) e(d) += jitter(rng);
      e.normalize();
      centers.push_back(static_cast<double>(i));
      vectors.push_back(e);
      truth.push_back(spk);
    }
    MultiScaleEmbeddings emb;
    emb.push_back(MakeScale(centers, vectors));
    const ClusterAssignment got = InitialClustering(emb, {1.0}, 8, 17);
    CHECK(got.num_clusters == 2);
    CHECK(AdjustedRandIndex(got.labels, truth) == doctest::Approx(1.0));
  }

  SUBCASE("different scale weights still partition the same elements") {
    std::mt19937_64 rng(405);
    std::normal_distribution<double> jitter(0.0, 0.03);
    auto noisy = [&](int which) {
      Eigen::VectorXd e = Basis(which, dim);
      for (int d = 0; d < dim; ++d) e(d) += jitter(rng);
      e.normalize();
      return e;
    };
    MultiScaleEmbeddings emb(3);
    emb[0] = MakeScale({1.0, 5.0}, {noisy(0), noisy(1)});
    emb[1] = MakeScale({0.5, 2.5, 4.5}, {noisy(0), noisy(0), noisy(1)});
    std::vector<double> fine_centers;
    std::vector<Eigen::VectorXd> fine_vectors;
    for (int i = 0; i < 8; ++i) {
      fine_centers.push_back(0.4 * i);
      fine_vectors.push_back(noisy(i < 4 ? 0 : 1));
    }
    emb[2] = MakeScale(fine_centers, fine_vectors);
    for (const std::vector<double>& w :
         {std::vector<double>{1.0, 1.0, 1.0},
          std::vector<double>{1.4, 1.2, 1.0}}) {
      const ClusterAssignment got = InitialClustering(emb, w, 8, 17);
      REQUIRE(got.labels.size() == 8);
      CHECK(got.num_clusters >= 1);
      CHECK(got.num_clusters <= 8);
      for (int label : got.labels) {
        CHECK(label >= 0);
        CHECK(label < got.num_clusters);
      }
    }
  }

  SUBCASE("one segment is one speaker") {
    MultiScaleEmbeddings emb;
    emb.push_back(MakeScale({1.0}, {u}));
    Eigen::MatrixXd affinity;
    const ClusterAssignment got = InitialClustering(emb, {1.0}, 8, 17,
                                                    &affinity);
    CHECK(got.num_clusters == 1);
    CHECK(got.labels == std::vector<int>{0});
    CHECK(affinity(0, 0) == 1.0);
  }

  SUBCASE("bad inputs are rejected") {
    MultiScaleEmbeddings emb;
    emb.push_back(MakeScale({0.0, 1.0}, {u, u}));
    CHECK_THROWS_AS(InitialClustering({}, {1.0}, 4, 17), InputError);
    CHECK_THROWS_AS(InitialClustering(emb, {1.0, 2.0}, 4, 17), InputError);
    CHECK_THROWS_AS(InitialClustering(emb, {0.0}, 4, 17), InputError);
  }
}

TEST_CASE("diarizer: profile mixing is exact at both endpoints") {
  Eigen::MatrixXd local(2, 2), global(2, 2);
  local << 1.0, 2.0, 3.0, 4.0;
  global << 5.0, 6.0, 7.0, 8.0;

  CHECK((MixProfiles(local, global, 1.0) - local).norm() == 0.0);
  CHECK((MixProfiles(local, global, 0.0) - global).norm() == 0.0);
  const Eigen::MatrixXd mid = MixProfiles(local, global, 0.5);
  CHECK((mid - 0.5 * (local + global)).norm() < 1e-12);

  CHECK_THROWS_AS(MixProfiles(local, global, -0.1), InputError);
  CHECK_THROWS_AS(MixProfiles(local, global, 1.1), InputError);
  CHECK_THROWS_AS(MixProfiles(local, Eigen::MatrixXd::Zero(3, 2), 0.5),
                  InputError);
}

TEST_CASE("diarizer: speaker profiles mix local and global window means") {
  const int dim = 4;
  const Eigen::VectorXd a = Basis(0, dim);
  const Eigen::VectorXd b = Basis(1, dim);
  Eigen::VectorXd c(dim);
  c << 0.6, 0.8, 0.0, 0.0;

  // Speaker 0 owns the two early segments (a then b); speaker 1 owns the two
  // late ones (both c).
  MultiScaleEmbeddings emb;
  emb.push_back(MakeScale({1.0, 2.0, 10.0, 11.0}, {a, b, c, c}));
  const std::vector<int> labels = {0, 0, 1, 1};

  SUBCASE("local window misses a speaker, global mean fills in") {
    const SpeakerProfiles got =
        ComputeSpeakerProfiles(emb, labels, 2, 1.5, 0.5, 100.0, 2.0);
    REQUIRE(got.scales.size() == 1);
    REQUIRE(got.num_speakers == 2);
    // Speaker 0: local mean and global mean are both (a+b)/2, so any mix
    // normalizes to the diagonal direction.
    const Eigen::VectorXd diag = ((a + b) / 2.0).normalized();
    CHECK((got.scales[0].col(0) - diag).norm() < 1e-12);
    // Speaker 1 is absent locally; both mix terms are the global mean c.
    CHECK((got.scales[0].col(1) - c).norm() < 1e-12);
    CHECK(got.active == std::vector<bool>{true, true});
  }

  SUBCASE("alpha endpoints select the local and the global mean exactly") {
    // Local window around 1.0 holds only segment a; global holds a and b.
    const SpeakerProfiles local_only =
        ComputeSpeakerProfiles(emb, labels, 2, 1.0, 1.0, 100.0, 0.6);
    CHECK((local_only.scales[0].col(0) - a).norm() < 1e-12);
    const SpeakerProfiles global_only =
        ComputeSpeakerProfiles(emb, labels, 2, 1.0, 0.0, 100.0, 0.6);
    const Eigen::VectorXd diag = ((a + b) / 2.0).normalized();
    CHECK((global_only.scales[0].col(0) - diag).norm() < 1e-12);
  }

  SUBCASE("a speaker absent everywhere gets a zero, inactive column") {
    const SpeakerProfiles got =
        ComputeSpeakerProfiles(emb, labels, 3, 1.5, 0.5, 100.0, 2.0);
    CHECK(got.scales[0].col(2).norm() == 0.0);
    CHECK(got.active == std::vector<bool>{true, true, false});
  }

  SUBCASE("columns are unit-normalized after mixing") {
    const SpeakerProfiles got =
        ComputeSpeakerProfiles(emb, labels, 2, 5.0, 0.3, 100.0, 9.0);
    for (int s = 0; s < 2; ++s) {
      CHECK(got.scales[0].col(s).norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("bad windows and labels are rejected") {
    CHECK_THROWS_AS(
        ComputeSpeakerProfiles(emb, labels, 2, 1.0, 0.5, 1.0, 2.0),
        InputError);
    CHECK_THROWS_AS(
        ComputeSpeakerProfiles(emb, {0, 0, 1}, 2, 1.0, 0.5, 100.0, 2.0),
        InputError);
    CHECK_THROWS_AS(
        ComputeSpeakerProfiles(emb, labels, 0, 1.0, 0.5, 100.0, 2.0),
        InputError);
    CHECK_THROWS_AS(
        ComputeSpeakerProfiles({}, labels, 2, 1.0, 0.5, 100.0, 2.0),
        InputError);
  }
}

TEST_CASE("diarizer: presence scores match the sigmoid of the cosine") {
  const int dim = 4;
  const Eigen::VectorXd u = Basis(0, dim);
  const Eigen::VectorXd w = Basis(1, dim);

  // Two well-separated single-speaker regions: u-segments early, w-segments
  // around t = 100 s.
  MultiScaleEmbeddings emb;
  emb.push_back(
      MakeScale({1.0, 2.0, 3.0, 101.0, 102.0, 103.0}, {u, u, u, w, w, w}));
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  const std::vector<double> weights = {1.0};
  const std::vector<double> frame_centers = {1.5, 2.5, 50.0, 101.5};
  const std::vector<char> frame_speech = {1, 1, 0, 1};
  PresenceOptions opts;  // gamma 10, beta 0.5, window 15 s, hop 3 s

  const Eigen::MatrixXd p = PresenceScores(emb, labels, 2, weights,
                                           frame_centers, frame_speech, opts);
  REQUIRE(p.rows() == 2);
  REQUIRE(p.cols() == 4);

  SUBCASE("a frame on its own speaker's profile scores sigmoid(gamma/2)") {
    CHECK(p(0, 0) == doctest::Approx(Sigmoid(5.0)).epsilon(1e-9));
    CHECK(p(0, 1) == doctest::Approx(Sigmoid(5.0)).epsilon(1e-9));
    CHECK(p(1, 3) == doctest::Approx(Sigmoid(5.0)).epsilon(1e-9));
  }

  SUBCASE("a frame orthogonal to a profile scores sigmoid(-gamma/2)") {
    CHECK(p(1, 0) == doctest::Approx(Sigmoid(-5.0)).epsilon(1e-9));
    CHECK(p(1, 1) == doctest::Approx(Sigmoid(-5.0)).epsilon(1e-9));
    CHECK(p(0, 3) == doctest::Approx(Sigmoid(-5.0)).epsilon(1e-9));
    CHECK(p(1, 0) < 0.5);
  }

  SUBCASE("non-speech frames are exactly zero") {
    CHECK(p(0, 2) == 0.0);
    CHECK(p(1, 2) == 0.0);
  }

  SUBCASE("entries stay inside the unit interval") {
    for (int s = 0; s < 2; ++s) {
      for (int i = 0; i < 4; ++i) {
        CHECK(p(s, i) >= 0.0);
        CHECK(p(s, i) <= 1.0);
      }
    }
  }

  SUBCASE("a speaker with no segments anywhere scores exactly zero") {
    const Eigen::MatrixXd q =
        PresenceScores(emb, {0, 0, 0, 0, 0, 0}, 2, weights, frame_centers,
                       frame_speech, opts);
    for (int i = 0; i < 4; ++i) CHECK(q(1, i) == 0.0);
  }

  SUBCASE("bad metadata is rejected") {
    CHECK_THROWS_AS(PresenceScores(emb, labels, 2, {1.0, 1.0}, frame_centers,
                                   frame_speech, opts),
                    InputError);
    CHECK_THROWS_AS(PresenceScores(emb, labels, 2, weights, {1.0},
                                   frame_speech, opts),
                    InputError);
    PresenceOptions bad = opts;
    bad.hop_s = 0.0;
    CHECK_THROWS_AS(PresenceScores(emb, labels, 2, weights, frame_centers,
                                   frame_speech, bad),
                    InputError);
    CHECK_THROWS_AS(PresenceScores(emb, labels, 2, {0.0}, frame_centers,
                                   frame_speech, opts),
                    InputError);
  }
}

TEST_CASE("diarizer: presence matrices round trip through the sidecar file") {
  TempDir dir("presence");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m(3, 7);
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 7; ++t) m(s, t) = unit(rng);
  }

  const std::string path = dir.file("sess.ch0.pres");
  WritePresenceMatrix(path, m);
  const Eigen::MatrixXd got = ReadPresenceMatrix(path);
  REQUIRE(got.rows() == 3);
  REQUIRE(got.cols() == 7);
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 7; ++t) {
      CHECK(got(s, t) == static_cast<double>(static_cast<float>(m(s, t))));
    }
  }

  // Header: two little-endian uint32 counts, then the payload.
  std::ifstream in(path, std::ios::binary);
  uint32_t speakers = 0, frames = 0;
  in.read(reinterpret_cast<char*>(&speakers), 4);
  in.read(reinterpret_cast<char*>(&frames), 4);
  CHECK(speakers == 3);
  CHECK(frames == 7);
  in.seekg(0, std::ios::end);
  CHECK(in.tellg() == 8 + 3 * 7 * 4);

  std::ofstream(path, std::ios::binary | std::ios::trunc) << "short";
  CHECK_THROWS_AS(ReadPresenceMatrix(path), InputError);
  CHECK_THROWS_AS(ReadPresenceMatrix(dir.file("missing.pres")), InputError);
}

TEST_CASE("diarizer: thresholding and voting need a strict majority") {
  const double res = 0.05;

  SUBCASE("one channel turns a probability run into one segment") {
    Eigen::MatrixXd p(1, 3);
    p << 0.9, 0.9, 0.1;
    const DiarSegments segs = ThresholdAndVote({p}, 0.5, res);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].begin_s == doctest::Approx(0.0));
    CHECK(segs[0].end_s == doctest::Approx(2 * res).epsilon(1e-12));
    CHECK(segs[0].speaker == "spk0");
  }

  SUBCASE("two of three channels carry the vote") {
    Eigen::MatrixXd yes(1, 1), no(1, 1);
    yes << 0.9;
    no << 0.1;
    CHECK(ThresholdAndVote({yes, yes, no}, 0.5, res).size() == 1);
    CHECK(ThresholdAndVote({yes, no, no}, 0.5, res).empty());
  }

  SUBCASE("a tied vote drops the frame") {
    Eigen::MatrixXd yes(1, 1), no(1, 1);
    yes << 0.9;
    no << 0.1;
    CHECK(ThresholdAndVote({yes, no}, 0.5, res).empty());
    CHECK(ThresholdAndVote({yes, yes}, 0.5, res).size() == 1);
  }

  SUBCASE("the comparison against tau is strict") {
    Eigen::MatrixXd p(1, 2);
    p << 0.5, 0.5 + 1e-9;
    const DiarSegments segs = ThresholdAndVote({p}, 0.5, res);
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].begin_s == doctest::Approx(res).epsilon(1e-12));
  }

  SUBCASE("speakers are labeled by row index") {
    Eigen::MatrixXd p(3, 2);
    p << 0.9, 0.9, 0.1, 0.1, 0.2, 0.9;
    const DiarSegments segs = ThresholdAndVote({p}, 0.5, res);
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].speaker == "spk0");
    CHECK(segs[1].speaker == "spk2");
  }

  SUBCASE("raising tau never increases the total active duration") {
    std::mt19937_64 rng(7071);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::MatrixXd> presence(3, Eigen::MatrixXd(2, 40));
    for (Eigen::MatrixXd& p : presence) {
      for (int s = 0; s < 2; ++s) {
        for (int i = 0; i < 40; ++i) p(s, i) = unit(rng);
      }
    }
    double prev = 1e9;
    for (double tau : {0.1, 0.25, 0.4, 0.55, 0.7, 0.85}) {
      const double total =
          TotalDuration(ThresholdAndVote(presence, tau, res));
      CHECK(total <= prev + 1e-12);
      prev = total;
    }
  }

  SUBCASE("bad shapes and thresholds are rejected") {
    Eigen::MatrixXd a(1, 2), b(2, 2);
    a << 0.9, 0.9;
    b << 0.9, 0.9, 0.9, 0.9;
    CHECK_THROWS_AS(ThresholdAndVote({a, b}, 0.5, res), InputError);
    CHECK_THROWS_AS(ThresholdAndVote({}, 0.5, res), InputError);
    CHECK_THROWS_AS(ThresholdAndVote({a}, 0.0, res), InputError);
    CHECK_THROWS_AS(ThresholdAndVote({a}, 1.0, res), InputError);
  }
}

TEST_CASE("diarizer: post-processing pads, merges, then deletes") {
  SUBCASE("zero pads and tolerant thresholds leave segments alone") {
    const DiarSegments segs = {{1.0, 2.0, "spk0"}, {5.0, 6.0, "spk1"}};
    const DiarSegments got = PostprocessSegments(segs, 0.0, 0.0, 0.0, 0.0,
                                                 100.0);
    REQUIRE(got.size() == 2);
    CHECK(got[0].begin_s == 1.0);
    CHECK(got[0].end_s == 2.0);
    CHECK(got[1].speaker == "spk1");
  }

  SUBCASE("a short same-speaker gap merges") {
    const DiarSegments got = PostprocessSegments(
        {{1.0, 2.0, "spk0"}, {2.1, 3.0, "spk0"}}, 0.0, 0.0, 0.0, 0.2, 100.0);
    REQUIRE(got.size() == 1);
    CHECK(got[0].begin_s == doctest::Approx(1.0));
    CHECK(got[0].end_s == doctest::Approx(3.0));
  }

  SUBCASE("the same gap across speakers does not merge") {
    const DiarSegments got = PostprocessSegments(
        {{1.0, 2.0, "spk0"}, {2.1, 3.0, "spk1"}}, 0.0, 0.0, 0.0, 0.2, 100.0);
    CHECK(got.size() == 2);
  }

  SUBCASE("short segments are deleted after merging") {
    const DiarSegments got = PostprocessSegments(
        {{5.0, 5.1, "spk0"}, {8.0, 9.0, "spk0"}}, 0.0, 0.0, 0.2, 0.0, 100.0);
    REQUIRE(got.size() == 1);
    CHECK(got[0].begin_s == doctest::Approx(8.0));
  }

  SUBCASE("padding happens before merging") {
    // The raw gap of 0.5 s survives min_duration_off 0.3, but pads of 0.15 s
    // on each side shrink it to 0.2 s, which merges.
    const DiarSegments got = PostprocessSegments(
        {{1.0, 2.0, "spk0"}, {2.5, 3.5, "spk0"}}, 0.15, 0.15, 0.0, 0.3,
        100.0);
    REQUIRE(got.size() == 1);
    CHECK(got[0].begin_s == doctest::Approx(0.85));
    CHECK(got[0].end_s == doctest::Approx(3.65));
  }

  SUBCASE("pads clip to the session bounds") {
    const DiarSegments got = PostprocessSegments(
        {{0.05, 1.0, "spk0"}, {9.5, 9.98, "spk0"}}, 0.2, 0.2, 0.0, 0.0, 10.0);
    REQUIRE(got.size() == 2);
    CHECK(got[0].begin_s == 0.0);
    CHECK(got[1].end_s == 10.0);
  }

  SUBCASE("same-speaker overlaps merge even with a zero gap threshold") {
    const DiarSegments got = PostprocessSegments(
        {{1.0, 3.0, "spk0"}, {2.0, 4.0, "spk0"}}, 0.0, 0.0, 0.0, 0.0, 100.0);
    REQUIRE(got.size() == 1);
    CHECK(got[0].begin_s == doctest::Approx(1.0));
    CHECK(got[0].end_s == doctest::Approx(4.0));
  }

  SUBCASE("with zero pads a second pass is a no-op") {
    std::mt19937_64 rng(3131);
    std::uniform_real_distribution<double> t(0.0, 60.0);
    std::uniform_real_distribution<double> dur(0.05, 2.0);
    DiarSegments raw;
    for (int i = 0; i < 60; ++i) {
      const double b = t(rng);
      raw.push_back({b, b + dur(rng), StrCat("spk", i % 3)});
    }
    const DiarSegments once =
        PostprocessSegments(raw, 0.0, 0.0, 0.25, 0.3, 60.0);
    const DiarSegments twice =
        PostprocessSegments(once, 0.0, 0.0, 0.25, 0.3, 60.0);
    REQUIRE(once.size() == twice.size());
    for (size_t i = 0; i < once.size(); ++i) {
      CHECK(once[i].begin_s == twice[i].begin_s);
      CHECK(once[i].end_s == twice[i].end_s);
      CHECK(once[i].speaker == twice[i].speaker);
    }
    // Per-speaker segments are disjoint with gaps of at least the merge
    // threshold, which is what makes the second pass inert.
    for (size_t i = 0; i < once.size(); ++i) {
      for (size_t j = i + 1; j < once.size(); ++j) {
        if (once[i].speaker != once[j].speaker) continue;
        const double lo = std::max(once[i].begin_s, once[j].begin_s);
        const double hi = std::min(once[i].end_s, once[j].end_s);
        CHECK(hi <= lo);
      }
    }
  }

  SUBCASE("negative parameters are rejected") {
    CHECK_THROWS_AS(
        PostprocessSegments({{1.0, 2.0, "spk0"}}, -0.1, 0.0, 0.0, 0.0, 10.0),
        InputError);
    CHECK_THROWS_AS(
        PostprocessSegments({{1.0, 2.0, "spk0"}}, 0.0, 0.0, 0.0, -0.1, 10.0),
        InputError);
  }
}

TEST_CASE("diarizer: rttm files round trip in canonical order") {
  TempDir dir("rttm");

  SUBCASE("one line per segment with millisecond times") {
    const std::string text =
        RttmString("sess", {{1.5, 2.75, "spk0"}});
    CHECK(text == "SPEAKER sess 1 1.500 1.250 <NA> <NA> spk0 <NA> <NA>\n");
  }

  SUBCASE("output bytes do not depend on the input order") {
    const DiarSegments forward = {{1.0, 2.0, "spk0"},
                                  {1.0, 3.0, "spk1"},
                                  {4.0, 5.0, "spk0"}};
    DiarSegments reversed(forward.rbegin(), forward.rend());
    CHECK(RttmString("s", forward) == RttmString("s", reversed));
  }

  SUBCASE("a written file parses back to the same segments") {
    const DiarSegments segs = {{0.25, 1.5, "alice"},
                               {1.0, 2.0, "bob"},
                               {3.125, 4.75, "alice"}};
    const std::string path = dir.file("two.rttm");
    WriteRttmFile(path, "meeting", segs);
    const std::map<std::string, DiarSegments> got = ReadRttm(path);
    REQUIRE(got.size() == 1);
    const DiarSegments& back = got.at("meeting");
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
      CHECK(back[i].begin_s == doctest::Approx(segs[i].begin_s).epsilon(1e-9));
      CHECK(back[i].end_s == doctest::Approx(segs[i].end_s).epsilon(1e-9));
      CHECK(back[i].speaker == segs[i].speaker);
    }
  }

  SUBCASE("comments and other record types are skipped") {
    const std::string path = dir.file("mixed.rttm");
    std::ofstream out(path);
    out << "; a comment line\n"
        << "LEXEME sess 1 0.0 1.0 <NA> <NA> word <NA> <NA>\n"
        << "SPEAKER sess 1 2.000 1.000 <NA> <NA> spk0 <NA> <NA>\n";
    out.close();
    const std::map<std::string, DiarSegments> got = ReadRttm(path);
    REQUIRE(got.at("sess").size() == 1);
    CHECK(got.at("sess")[0].begin_s == doctest::Approx(2.0));
  }

  SUBCASE("malformed lines fail loudly") {
    const std::string truncated = dir.file("bad.rttm");
    std::ofstream(truncated) << "SPEAKER sess 1 2.000\n";
    CHECK_THROWS_AS(ReadRttm(truncated), InputError);
    const std::string negative = dir.file("neg.rttm");
    std::ofstream(negative)
        << "SPEAKER sess 1 2.000 -1.000 <NA> <NA> spk0 <NA> <NA>\n";
    CHECK_THROWS_AS(ReadRttm(negative), InputError);
    CHECK_THROWS_AS(ReadRttm(dir.file("missing.rttm")), InputError);
  }
}

TEST_CASE("diarizer: embedding sidecars serve exact spans") {
  TempDir dir("emb");
  const int dim = 4;

  EmbeddingSidecar sc;
  sc.begin_s = {0.0, 1.5};
  sc.end_s = {1.5, 3.0};
  sc.vectors.resize(2, dim);
  sc.vectors << 1.0, 0.0, 0.0, 0.0, 0.0, 0.6, 0.8, 0.0;

  SUBCASE("rows round trip at float precision") {
    const std::string path = dir.file("sess.ch0.scale0.emb");
    WriteEmbeddingSidecar(path, sc);
    const EmbeddingSidecar got = ReadEmbeddingSidecar(path, dim);
    REQUIRE(got.vectors.rows() == 2);
    CHECK(got.begin_s[1] == 1.5);
    CHECK(got.end_s[1] == 3.0);
    // Bitwise equal after one pass through the file's float32 rows.
    const Eigen::MatrixXd stored =
        sc.vectors.cast<float>().cast<double>();
    CHECK((got.vectors - stored).norm() == 0.0);
  }

  SUBCASE("a provider indexes every scale file of its session") {
    // The channel id itself contains a dot, as array microphone names do.
    WriteEmbeddingSidecar(dir.file("sess.U01.CH1.scale0.emb"), sc);
    EmbeddingSidecar other = sc;
    other.vectors(0, 0) = 0.0;
    other.vectors(0, 3) = 1.0;
    WriteEmbeddingSidecar(dir.file("sess.U01.CH1.scale1.emb"), other);

    const SidecarEmbeddingProvider provider(dir.path(), "sess", dim);
    CHECK(provider.dimension() == dim);
    AudioSession ch = MakeSession({std::vector<float>(48000, 0.0f)}, 16000,
                                  {"U01.CH1"});
    const Eigen::VectorXd v = provider.Compute(ch, 1.5, 3.0);
    CHECK(v(1) == doctest::Approx(0.6).epsilon(1e-7));
    CHECK(v(2) == doctest::Approx(0.8).epsilon(1e-7));
    // Identical spans resolve to identical vectors.
    CHECK((provider.Compute(ch, 1.5, 3.0) - v).norm() == 0.0);
    // The scale1 file's differing row lives under different bounds keys but
    // the same channel, so both files contribute rows.
    CHECK_THROWS_AS(provider.Compute(ch, 0.25, 0.5), InputError);
  }

  SUBCASE("unknown sessions and junk files fail loudly") {
    WriteEmbeddingSidecar(dir.file("sess.ch0.scale0.emb"), sc);
    CHECK_THROWS_AS(SidecarEmbeddingProvider(dir.path(), "nosuch", dim),
                    InputError);
    const std::string junk = dir.file("sess.ch1.scale0.emb");
    std::ofstream(junk, std::ios::binary) << "12345";
    CHECK_THROWS_AS(ReadEmbeddingSidecar(junk, dim), InputError);
  }

  SUBCASE("row bookkeeping must be consistent when writing") {
    EmbeddingSidecar bad = sc;
    bad.begin_s.pop_back();
    CHECK_THROWS_AS(WriteEmbeddingSidecar(dir.file("x.emb"), bad),
                    InputError);
  }
}

TEST_CASE("diarizer: filterbank embeddings separate spectral speakers") {
  const int fs = 16000;
  const FilterbankEmbeddingProvider provider;
  CHECK(provider.dimension() == 80);

  auto embed = [&](const std::vector<float>& x) {
    AudioSession one = MakeSession({x}, fs);
    return provider.Compute(one, 0.0,
                            static_cast<double>(x.size()) / fs);
  };

  const size_t n = fs;  // 1 s spans
  const Eigen::VectorXd a1 = embed(BandNoise(n, fs, 250.0, 700.0, 31));
  const Eigen::VectorXd a2 = embed(BandNoise(n, fs, 250.0, 700.0, 32));
  const Eigen::VectorXd b1 = embed(BandNoise(n, fs, 2500.0, 3600.0, 33));
  const Eigen::VectorXd b2 = embed(BandNoise(n, fs, 2500.0, 3600.0, 34));

  SUBCASE("vectors are unit norm and deterministic") {
    CHECK(a1.norm() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(b2.norm() == doctest::Approx(1.0).epsilon(1e-5));
    const Eigen::VectorXd again =
        embed(BandNoise(n, fs, 250.0, 700.0, 31));
    CHECK((again - a1).norm() == 0.0);
  }

  SUBCASE("within-speaker cosine beats between-speaker cosine") {
    const double within_a = a1.dot(a2);
    const double within_b = b1.dot(b2);
    const double cross = std::max({a1.dot(b1), a1.dot(b2), a2.dot(b1),
                                   a2.dot(b2)});
    CHECK(within_a > cross);
    CHECK(within_b > cross);
  }

  SUBCASE("too-short spans and multichannel input are rejected") {
    AudioSession one = MakeSession({WhiteNoise(fs, 5, 0.1)}, fs);
    CHECK_THROWS_AS(provider.Compute(one, 0.0, 0.01), InputError);
    AudioSession two =
        MakeSession({WhiteNoise(fs, 5, 0.1), WhiteNoise(fs, 6, 0.1)}, fs);
    CHECK_THROWS_AS(provider.Compute(two, 0.0, 1.0), InputError);
  }
}

TEST_CASE("diarizer: whole sessions come back with stable speaker maps") {
  SynthSessionSpec spec;
  spec.duration_s = 60.0;
  spec.channels = 3;
  spec.seed = 7;
  const SynthSession synth = MakeSynthSession(spec);
  const FilterbankEmbeddingProvider embedder;
  const EnergyVadProvider vad;
  DiarizerOptions opts;
  opts.session_id = "synth";

  const DiarizationResult result = Diarize(synth.audio, embedder, vad, opts);

  SUBCASE("two talkers are found and labeled on the spk<i> scheme") {
    CHECK(result.num_speakers == 2);
    REQUIRE(!result.segments.empty());
    for (const DiarSegment& s : result.segments) {
      CHECK((s.speaker == "spk0" || s.speaker == "spk1"));
      CHECK(s.begin_s < s.end_s);
      CHECK(s.begin_s >= 0.0);
      CHECK(s.end_s <= spec.duration_s + 1e-9);
    }
  }

  SUBCASE("per-speaker segments are disjoint after post-processing") {
    for (size_t i = 0; i < result.segments.size(); ++i) {
      for (size_t j = i + 1; j < result.segments.size(); ++j) {
        if (result.segments[i].speaker != result.segments[j].speaker) {
          continue;
        }
        const double lo = std::max(result.segments[i].begin_s,
                                   result.segments[j].begin_s);
        const double hi = std::min(result.segments[i].end_s,
                                   result.segments[j].end_s);
        CHECK(hi <= lo);
      }
    }
  }

  SUBCASE("presence matrices exist per channel with entries in [0,1]") {
    REQUIRE(result.presence.size() == 3);
    for (const Eigen::MatrixXd& p : result.presence) {
      CHECK(p.rows() == result.num_speakers);
      CHECK(p.minCoeff() >= 0.0);
      CHECK(p.maxCoeff() <= 1.0);
    }
  }

  SUBCASE("labels cover the finest grid and the grids match the scales") {
    REQUIRE(result.grids.size() == 3);
    CHECK(static_cast<int>(result.finest_labels.size()) ==
          result.grids[2].size());
  }

  SUBCASE("a rerun produces byte-identical rttm output") {
    const DiarizationResult again = Diarize(synth.audio, embedder, vad, opts);
    CHECK(RttmString("synth", again.segments) ==
          RttmString("synth", result.segments));
  }

  SUBCASE("digital silence diarizes to nothing") {
    AudioSession quiet = MakeSession(
        {std::vector<float>(16000, 0.0f), std::vector<float>(16000, 0.0f)},
        16000);
    const DiarizationResult nothing = Diarize(quiet, embedder, vad, opts);
    CHECK(nothing.num_speakers == 0);
    CHECK(nothing.segments.empty());
    CHECK(nothing.presence.empty());
  }
}

TEST_CASE("diarizer: sidecar presence matrices replace the cosine scorer") {
  // One talker: the same noise burst heard twice, separated by silence.
  const int fs = 16000;
  std::vector<float> x(2 * fs, 0.0f);
  const std::vector<float> burst1 = BandNoise(static_cast<size_t>(0.8 * fs),
                                              fs, 400.0, 1500.0, 51);
  const std::vector<float> burst2 = BandNoise(static_cast<size_t>(0.8 * fs),
                                              fs, 400.0, 1500.0, 51);
  AddInto(x, burst1, 0);
  AddInto(x, burst2, static_cast<size_t>(1.2 * fs));
  AudioSession audio = MakeSession({x}, fs, {"ch0"});

  const FilterbankEmbeddingProvider embedder;
  const EnergyVadProvider vad;
  TempDir dir("pres");
  DiarizerOptions opts;
  opts.session_id = "burst";
  opts.presence_sidecar_dir = dir.path();

  const int frames = 40;  // 2 s at the 0.05 s decision grid

  // Sidecar shapes must match this session's clustering, so learn the
  // speaker count from a scorer-driven run first.
  DiarizerOptions scorer_opts = opts;
  scorer_opts.presence_sidecar_dir.clear();
  const int learned =
      Diarize(audio, embedder, vad, scorer_opts).num_speakers;
  REQUIRE(learned >= 1);

  SUBCASE("well-formed matrices drive the segment decisions") {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(learned, frames);
    for (int i = 0; i < 16; ++i) p(0, i) = 0.9;  // first burst only
    WritePresenceMatrix(dir.file("burst.ch0.pres"), p);
    const DiarizationResult result = Diarize(audio, embedder, vad, opts);
    REQUIRE(result.num_speakers == learned);
    REQUIRE(result.segments.size() == 1);
    CHECK(result.segments[0].speaker == "spk0");
    CHECK(result.segments[0].begin_s == doctest::Approx(0.0));
    // Frames 0..15 end at 0.8 s; the default 0.1 s offset pad reaches 0.9.
    CHECK(result.segments[0].end_s == doctest::Approx(0.9).epsilon(1e-9));
  }

  SUBCASE("a shape mismatch is rejected with the file named") {
    WritePresenceMatrix(dir.file("burst.ch0.pres"),
                        Eigen::MatrixXd::Zero(learned, frames - 1));
    CHECK_THROWS_WITH_AS(Diarize(audio, embedder, vad, opts),
                         doctest::Contains("presence sidecar"), InputError);
  }
}
