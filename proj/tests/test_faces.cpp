#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "voiceface/faces.hpp"
#include "voiceface/rng.hpp"

using namespace voiceface;

namespace {

FaceDetection det(std::vector<float> embedding, double t = 0.0, int track = -1) {
  FaceDetection d;
  d.timestamp_s = t;
  d.frame_index = static_cast<long>(t * 25.0);
  d.bbox = {0.1, 0.1, 0.2, 0.2};
  d.embedding = std::move(embedding);
  d.track_id = track;
  return d;
}

std::vector<float> axis_embedding(int axis, float scale = 1.0f) {
  std::vector<float> e(kFaceEmbeddingDim, 0.0f);
  e[axis] = scale;
  return e;
}

// Connected components by breadth-first search over an explicit adjacency
// check, with unit-normalization done in double from scratch.
std::vector<std::vector<int>> oracle_components(const std::vector<FaceDetection>& dets,
                                                double threshold, bool use_tracks) {
  const int n = static_cast<int>(dets.size());
  std::vector<std::vector<double>> u(n);
  for (int i = 0; i < n; ++i) {
    double n2 = 0.0;
    for (float v : dets[i].embedding) {
      n2 += static_cast<double>(v) * static_cast<double>(v);
    }
    const double len = std::sqrt(n2);
    for (float v : dets[i].embedding) {
      u[i].push_back(len > 0.0 ? static_cast<double>(v) / len : 0.0);
    }
  }
  auto adjacent = [&](int i, int j) {
    if (use_tracks && dets[i].track_id >= 0 && dets[i].track_id == dets[j].track_id) {
      return true;
    }
    double d = 0.0;
    for (int k = 0; k < kFaceEmbeddingDim; ++k) {
      d += u[i][k] * u[j][k];
    }
    return d >= threshold;
  };

  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> components;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> queue = {s};
    comp[s] = static_cast<int>(components.size());
    std::vector<int> members;
    while (!queue.empty()) {
      const int i = queue.back();
      queue.pop_back();
      members.push_back(i);
      for (int j = 0; j < n; ++j) {
        if (comp[j] < 0 && adjacent(i, j)) {
          comp[j] = comp[s];
          queue.push_back(j);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  // Order like the library: size descending, then earliest member.
  std::sort(components.begin(), components.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a.front() < b.front();
            });
  return components;
}

std::vector<FaceDetection> random_detections(Rng& rng, int n, int num_identities,
                                             double sigma, bool with_tracks) {
  // Identity prototypes on distinct axes are exactly orthogonal, so the
  // clustering difficulty is controlled entirely by sigma.
  std::vector<FaceDetection> dets;
  for (int i = 0; i < n; ++i) {
    const int who = rng.uniform_int(num_identities);
    std::vector<float> e(kFaceEmbeddingDim, 0.0f);
    e[who] = 1.0f;
    for (auto& v : e) {
      v += static_cast<float>(sigma * rng.gaussian());
    }
    const int track = with_tracks && rng.uniform() < 0.5 ? who : -1;
    dets.push_back(det(std::move(e), 0.2 * i, track));
  }
  return dets;
}

}  // namespace

TEST_CASE("face clustering equals connected components from a reference search") {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + rng.uniform_int(40);
    const double sigma = rng.uniform(0.0, 0.4);
    const bool tracks = trial % 3 == 0;
    const double threshold = rng.uniform(0.3, 0.95);
    const auto dets = random_detections(rng, n, 4, sigma, tracks);

    const auto got = cluster_faces(dets, threshold, tracks);
    const auto want = oracle_components(dets, threshold, tracks);

    REQUIRE(got.clusters.size() == want.size());
    for (std::size_t c = 0; c < want.size(); ++c) {
      CHECK(got.clusters[c].cluster_id == static_cast<int>(c));
      CHECK(got.clusters[c].detection_indices == want[c]);
      for (int i : want[c]) {
        CHECK(got.assignment[i] == static_cast<int>(c));
      }
    }
  }
}

TEST_CASE("cluster ids order by size then earliest detection") {
  // Three of identity B (indices 1,2,4), two of A (0,3), one of C (5).
  std::vector<FaceDetection> dets;
  dets.push_back(det(axis_embedding(0), 0.0));
  dets.push_back(det(axis_embedding(1), 0.1));
  dets.push_back(det(axis_embedding(1), 0.2));
  dets.push_back(det(axis_embedding(0), 0.3));
  dets.push_back(det(axis_embedding(1), 0.4));
  dets.push_back(det(axis_embedding(2), 0.5));

  const auto got = cluster_faces(dets);
  REQUIRE(got.clusters.size() == 3);
  CHECK(got.clusters[0].detection_indices == std::vector<int>{1, 2, 4});
  CHECK(got.clusters[1].detection_indices == std::vector<int>{0, 3});
  CHECK(got.clusters[2].detection_indices == std::vector<int>{5});
  CHECK(got.assignment == std::vector<int>{1, 0, 0, 1, 0, 2});

  // Size ties break by earliest member index.
  std::vector<FaceDetection> tied;
  tied.push_back(det(axis_embedding(3), 0.0));
  tied.push_back(det(axis_embedding(4), 0.1));
  const auto two = cluster_faces(tied);
  REQUIRE(two.clusters.size() == 2);
  CHECK(two.clusters[0].detection_indices == std::vector<int>{0});
  CHECK(two.clusters[1].detection_indices == std::vector<int>{1});
}

TEST_CASE("similarity uses normalized embeddings, not raw magnitudes") {
  // Same direction at wildly different scales still lands in one cluster.
  std::vector<FaceDetection> dets;
  dets.push_back(det(axis_embedding(0, 0.01f)));
  dets.push_back(det(axis_embedding(0, 100.0f)));
  const auto got = cluster_faces(dets);
  CHECK(got.clusters.size() == 1);
}

TEST_CASE("track ids pre-merge detections that similarity would split") {
  // Two orthogonal embeddings, same track: one cluster when tracks are on.
  std::vector<FaceDetection> dets;
  dets.push_back(det(axis_embedding(0), 0.0, 7));
  dets.push_back(det(axis_embedding(1), 0.1, 7));
  dets.push_back(det(axis_embedding(2), 0.2, -1));  // untracked

  const auto merged = cluster_faces(dets, 0.85, true);
  REQUIRE(merged.clusters.size() == 2);
  CHECK(merged.clusters[0].detection_indices == std::vector<int>{0, 1});

  const auto split = cluster_faces(dets, 0.85, false);
  CHECK(split.clusters.size() == 3);

  // Negative track ids never merge with each other.
  std::vector<FaceDetection> untracked;
  untracked.push_back(det(axis_embedding(0), 0.0, -1));
  untracked.push_back(det(axis_embedding(1), 0.1, -1));
  CHECK(cluster_faces(untracked, 0.85, true).clusters.size() == 2);
}

TEST_CASE("face clustering validates dimensions and handles empty input") {
  CHECK(cluster_faces({}).clusters.empty());
  CHECK(cluster_faces({}).assignment.empty());

  std::vector<FaceDetection> bad;
  bad.push_back(det(std::vector<float>(64, 1.0f)));
  CHECK_THROWS_AS(cluster_faces(bad), DimensionError);
}

TEST_CASE("jobs count does not change face clusters") {
  Rng rng(31415);
  const auto dets = random_detections(rng, 60, 5, 0.2, true);
  const auto one = cluster_faces(dets, 0.8, true, 1);
  const auto four = cluster_faces(dets, 0.8, true, 4);
  REQUIRE(one.clusters.size() == four.clusters.size());
  CHECK(one.assignment == four.assignment);
  for (std::size_t c = 0; c < one.clusters.size(); ++c) {
    CHECK(one.clusters[c].detection_indices == four.clusters[c].detection_indices);
  }
}

TEST_CASE("default threshold matches the documented operating point") {
  CHECK(kFaceSimilarityThreshold == 0.85);
}

TEST_CASE("presence index counts detections in half-open intervals") {
  std::vector<FaceDetection> dets;
  // Cluster of identity 0 at t = 0.0, 0.5, 1.0, 1.5; identity 1 at 0.25, 0.75.
  for (int i = 0; i < 4; ++i) {
    dets.push_back(det(axis_embedding(0), 0.5 * i));
  }
  dets.push_back(det(axis_embedding(1), 0.25));
  dets.push_back(det(axis_embedding(1), 0.75));

  const auto clusters = cluster_faces(dets);
  REQUIRE(clusters.clusters.size() == 2);
  const FacePresenceIndex index(clusters, dets);

  CHECK(index.num_clusters() == 2);
  CHECK(index.count_in(0, 0.0, 2.0) == 4);
  CHECK(index.count_in(0, 0.0, 1.0) == 2);   // end exclusive: drops t=1.0
  CHECK(index.count_in(0, 0.5, 0.5) == 0);   // empty interval
  CHECK(index.count_in(0, 1.5, 10.0) == 1);  // start inclusive: keeps t=1.5
  CHECK(index.count_in(1, 0.0, 1.0) == 2);
  CHECK(index.total_in(0.0, 1.0) == 4);
  CHECK(index.total_in(0.7, 0.8) == 1);

  CHECK_THROWS_AS(index.count_in(5, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(index.count_in(-1, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(index.count_in(0, 1.0, 0.5), ConfigError);
}

TEST_CASE("presence index agrees with a linear scan on random data") {
  Rng rng(555);
  const auto dets = random_detections(rng, 80, 3, 0.1, false);
  const auto clusters = cluster_faces(dets, 0.8, false);
  const FacePresenceIndex index(clusters, dets);

  for (int trial = 0; trial < 50; ++trial) {
    double a = rng.uniform(0.0, 16.0);
    double b = rng.uniform(0.0, 16.0);
    if (b < a) {
      std::swap(a, b);
    }
    long total = 0;
    for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
      long want = 0;
      for (int i : clusters.clusters[c].detection_indices) {
        if (dets[i].timestamp_s >= a && dets[i].timestamp_s < b) {
          ++want;
        }
      }
      CHECK(index.count_in(static_cast<int>(c), a, b) == want);
      total += want;
    }
    CHECK(index.total_in(a, b) == total);
  }
}
