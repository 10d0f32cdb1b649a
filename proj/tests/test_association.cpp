#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "voiceface/association.hpp"
#include "voiceface/rng.hpp"

using namespace voiceface;

namespace {

// Fixtures drive the presence index directly through hand-built clusters;
// the embedding contents never matter here, only timestamps and membership.
std::vector<FaceDetection> dets_at(const std::vector<double>& times) {
  std::vector<FaceDetection> dets;
  for (double t : times) {
    FaceDetection d;
    d.timestamp_s = t;
    d.frame_index = static_cast<long>(t * 25.0);
    dets.push_back(std::move(d));
  }
  return dets;
}

FaceClusterResult manual_clusters(const std::vector<std::vector<int>>& members,
                                  int num_dets) {
  FaceClusterResult r;
  r.assignment.assign(num_dets, -1);
  for (std::size_t c = 0; c < members.size(); ++c) {
    FaceCluster fc;
    fc.cluster_id = static_cast<int>(c);
    fc.detection_indices = members[c];
    for (int i : members[c]) {
      r.assignment[i] = static_cast<int>(c);
    }
    r.clusters.push_back(std::move(fc));
  }
  return r;
}

SpeechCluster speech(int id, std::vector<int> segment_ids) {
  SpeechCluster c;
  c.cluster_id = id;
  c.segment_ids = std::move(segment_ids);
  return c;
}

}  // namespace

TEST_CASE("a cluster overlapping exactly one face takes that face") {
  // First speech cluster [1,3): only face 1 is ever on screen there.
  const auto dets = dets_at({1.2, 1.8, 2.4, 5.0, 5.5});
  const auto faces = manual_clusters({{3, 4}, {0, 1, 2}}, 5);
  const FacePresenceIndex presence(faces, dets);

  const std::vector<SpeechSegment> segments = {{1.0, 3.0, 0}, {4.8, 6.0, 1}};
  const auto result =
      associate({speech(0, {0}), speech(1, {1})}, segments, presence);

  REQUIRE(result.associations.size() == 2);
  CHECK(result.associations[0].face_cluster_id == std::optional<int>(1));
  CHECK(result.associations[0].scores == std::vector<long>{0, 3});
  CHECK(result.associations[0].opportunities == 3);
  // The second cluster sees only face 0.
  CHECK(result.associations[1].face_cluster_id == std::optional<int>(0));
}

TEST_CASE("with two faces on screen the more frequent one wins") {
  // During [0,4): face 0 appears 5 times, face 1 twice.
  const auto dets = dets_at({0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5});
  const auto faces = manual_clusters({{0, 2, 3, 5, 6}, {1, 4}}, 7);
  const FacePresenceIndex presence(faces, dets);

  const std::vector<SpeechSegment> segments = {{0.0, 4.0, 0}};
  const auto result = associate({speech(0, {0})}, segments, presence);
  CHECK(result.associations[0].face_cluster_id == std::optional<int>(0));
  CHECK(result.associations[0].scores == std::vector<long>{5, 2});
  CHECK(result.associations[0].opportunities == 7);
}

TEST_CASE("zero support within the extent means off-screen") {
  const auto dets = dets_at({10.0, 11.0});
  const auto faces = manual_clusters({{0, 1}}, 2);
  const FacePresenceIndex presence(faces, dets);

  const std::vector<SpeechSegment> segments = {{0.0, 2.0, 0}};
  const auto result = associate({speech(0, {0})}, segments, presence);
  CHECK(!result.associations[0].face_cluster_id.has_value());
  REQUIRE(result.timeline.entries.size() == 1);
  CHECK(!result.timeline.entries[0].face_cluster_id.has_value());
}

TEST_CASE("equal counts resolve to the lowest face cluster id") {
  const auto dets = dets_at({1.0, 1.5, 2.0, 2.5});
  const auto faces = manual_clusters({{0, 1}, {2, 3}}, 4);
  const FacePresenceIndex presence(faces, dets);

  const std::vector<SpeechSegment> segments = {{0.0, 3.0, 0}};
  const auto result = associate({speech(0, {0})}, segments, presence);
  CHECK(result.associations[0].scores == std::vector<long>{2, 2});
  CHECK(result.associations[0].face_cluster_id == std::optional<int>(0));
}

TEST_CASE("the extent is the union of member segments, not their hull") {
  // Segments [0,1) and [2,3); every detection falls in the (1,2) gap.
  const auto dets = dets_at({1.2, 1.4, 1.6, 1.8});
  const auto faces = manual_clusters({{0, 1, 2, 3}}, 4);
  const FacePresenceIndex presence(faces, dets);

  const std::vector<SpeechSegment> segments = {{0.0, 1.0, 0}, {2.0, 3.0, 1}};
  const auto result = associate({speech(0, {0, 1})}, segments, presence);
  // A convex-hull extent would have scored 4 here.
  CHECK(result.associations[0].scores == std::vector<long>{0});
  CHECK(result.associations[0].opportunities == 0);
  CHECK(!result.associations[0].face_cluster_id.has_value());
}

TEST_CASE("min_coverage keeps marginal winners off screen") {
  // Face 0: 4 of 10 detections in the extent; face 1: 6.
  std::vector<double> times;
  for (int i = 0; i < 10; ++i) {
    times.push_back(0.1 * i);
  }
  const auto dets = dets_at(times);
  const auto faces = manual_clusters({{0, 1, 2, 3}, {4, 5, 6, 7, 8, 9}}, 10);
  const FacePresenceIndex presence(faces, dets);
  const std::vector<SpeechSegment> segments = {{0.0, 1.0, 0}};
  const std::vector<SpeechCluster> clusters = {speech(0, {0})};

  // Winner covers 6/10 = 0.6 of the opportunities.
  CHECK(associate(clusters, segments, presence, 0.0)
            .associations[0]
            .face_cluster_id == std::optional<int>(1));
  CHECK(associate(clusters, segments, presence, 0.6)
            .associations[0]
            .face_cluster_id == std::optional<int>(1));  // >= is inclusive
  CHECK(!associate(clusters, segments, presence, 0.61)
             .associations[0]
             .face_cluster_id.has_value());
  CHECK(!associate(clusters, segments, presence, 1.0)
             .associations[0]
             .face_cluster_id.has_value());
}

TEST_CASE("doubling the sampling rate changes no assignment") {
  Rng rng(40);
  std::vector<double> times;
  for (int i = 0; i < 30; ++i) {
    times.push_back(rng.uniform(0.0, 10.0));
  }
  auto dets = dets_at(times);
  std::vector<std::vector<int>> members(3);
  for (int i = 0; i < 30; ++i) {
    members[i % 3].push_back(i);
  }
  const auto faces = manual_clusters(members, 30);
  const std::vector<SpeechSegment> segments = {{0.0, 3.0, 0}, {4.0, 7.0, 1}, {8.0, 10.0, 2}};
  const std::vector<SpeechCluster> clusters = {speech(0, {0, 2}), speech(1, {1})};

  const auto base =
      associate(clusters, segments, FacePresenceIndex(faces, dets), 0.3);

  // Duplicate every detection: counts double, fractions stay put.
  auto doubled_members = members;
  auto doubled_dets = dets;
  for (int i = 0; i < 30; ++i) {
    doubled_members[i % 3].push_back(30 + i);
    doubled_dets.push_back(dets[i]);
  }
  const auto dense = manual_clusters(doubled_members, 60);
  const auto scaled =
      associate(clusters, segments, FacePresenceIndex(dense, doubled_dets), 0.3);

  REQUIRE(base.associations.size() == scaled.associations.size());
  for (std::size_t i = 0; i < base.associations.size(); ++i) {
    CHECK(base.associations[i].face_cluster_id == scaled.associations[i].face_cluster_id);
    CHECK(scaled.associations[i].opportunities == 2 * base.associations[i].opportunities);
  }
}

TEST_CASE("association matches a brute-force count on random scenarios") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    // Random disjoint segments.
    const int num_segments = 1 + rng.uniform_int(8);
    std::vector<SpeechSegment> segments;
    double t = 0.0;
    for (int s = 0; s < num_segments; ++s) {
      t += rng.uniform(0.3, 1.0);
      const double len = rng.uniform(1.0, 3.0);
      segments.push_back({t, t + len, s});
      t += len;
    }

    // Random partition of segments into clusters.
    const int num_clusters = 1 + rng.uniform_int(num_segments);
    std::vector<SpeechCluster> clusters(num_clusters);
    for (int c = 0; c < num_clusters; ++c) {
      clusters[c].cluster_id = c;
    }
    for (int s = 0; s < num_segments; ++s) {
      clusters[rng.uniform_int(num_clusters)].segment_ids.push_back(s);
    }
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const SpeechCluster& c) {
                                    return c.segment_ids.empty();
                                  }),
                   clusters.end());

    // Random detections spread over the whole span, random face identity.
    const int num_faces = 1 + rng.uniform_int(4);
    const int num_dets = rng.uniform_int(60);
    std::vector<double> times;
    std::vector<std::vector<int>> members(num_faces);
    for (int i = 0; i < num_dets; ++i) {
      times.push_back(rng.uniform(0.0, t + 1.0));
      members[rng.uniform_int(num_faces)].push_back(i);
    }
    const auto dets = dets_at(times);
    const auto faces = manual_clusters(members, num_dets);
    const double min_coverage = trial % 4 == 0 ? 0.0 : rng.uniform(0.0, 1.0);

    const auto got = associate(clusters, segments, FacePresenceIndex(faces, dets),
                               min_coverage);

    REQUIRE(got.associations.size() == clusters.size());
    std::size_t total_entries = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      // Count detections per face over the member intervals directly.
      std::vector<long> scores(num_faces, 0);
      long opportunities = 0;
      for (int seg_id : clusters[c].segment_ids) {
        for (int i = 0; i < num_dets; ++i) {
          if (times[i] >= segments[seg_id].start_s && times[i] < segments[seg_id].end_s) {
            ++scores[faces.assignment[i]];
            ++opportunities;
          }
        }
      }
      int best = -1;
      long best_score = 0;
      for (int f = 0; f < num_faces; ++f) {
        if (scores[f] > best_score) {
          best_score = scores[f];
          best = f;
        }
      }
      std::optional<int> want;
      if (best >= 0 &&
          static_cast<double>(best_score) >= min_coverage * static_cast<double>(opportunities)) {
        want = best;
      }

      CHECK(got.associations[c].scores == scores);
      CHECK(got.associations[c].opportunities == opportunities);
      CHECK(got.associations[c].face_cluster_id == want);
      total_entries += clusters[c].segment_ids.size();

      // Each member segment carries the cluster verdict, exact interval.
      for (int seg_id : clusters[c].segment_ids) {
        const auto it = std::find_if(
            got.timeline.entries.begin(), got.timeline.entries.end(),
            [&](const TimelineEntry& e) {
              return e.speech_cluster_id == clusters[c].cluster_id &&
                     e.start_s == segments[seg_id].start_s;
            });
        REQUIRE(it != got.timeline.entries.end());
        CHECK(it->end_s == segments[seg_id].end_s);
        CHECK(it->face_cluster_id == want);
      }
    }
    CHECK(got.timeline.entries.size() == total_entries);
    for (std::size_t e = 1; e < got.timeline.entries.size(); ++e) {
      CHECK(got.timeline.entries[e - 1].start_s <= got.timeline.entries[e].start_s);
    }
  }
}

TEST_CASE("association validates its inputs") {
  const auto dets = dets_at({1.0});
  const auto faces = manual_clusters({{0}}, 1);
  const FacePresenceIndex presence(faces, dets);
  const std::vector<SpeechSegment> segments = {{0.0, 2.0, 0}};

  CHECK_THROWS_AS(associate({speech(0, {0})}, segments, presence, -0.1), ConfigError);
  CHECK_THROWS_AS(associate({speech(0, {0})}, segments, presence, 1.1), ConfigError);
  CHECK_THROWS_AS(associate({speech(0, {3})}, segments, presence), ConfigError);
  CHECK_THROWS_AS(associate({speech(0, {-1})}, segments, presence), ConfigError);
}

TEST_CASE("speech clusters sharing a face merge; off-screen never does") {
  SpeakerTimeline timeline;
  auto add = [&](double start, double end, int cluster, std::optional<int> face) {
    TimelineEntry e;
    e.start_s = start;
    e.end_s = end;
    e.speech_cluster_id = cluster;
    e.face_cluster_id = face;
    timeline.entries.push_back(e);
  };

  // Clusters 0 and 2 share face 7; cluster 1 has its own face; 3 and 4 are
  // both off-screen and must stay apart.
  add(0.0, 1.0, 0, 7);
  add(1.5, 2.5, 1, 3);
  add(3.0, 4.0, 2, 7);
  add(4.5, 5.5, 3, std::nullopt);
  add(6.0, 7.0, 4, std::nullopt);

  const auto merged = merge_speech_clusters_by_face(timeline);
  REQUIRE(merged.size() == 2);
  CHECK(merged.at(7) == std::set<int>{0, 2});
  CHECK(merged.at(3) == std::set<int>{1});

  // All off-screen: nothing to merge.
  SpeakerTimeline silent;
  silent.entries.push_back(TimelineEntry{0.0, 1.0, 0, std::nullopt});
  silent.entries.push_back(TimelineEntry{2.0, 3.0, 1, std::nullopt});
  CHECK(merge_speech_clusters_by_face(silent).empty());

  CHECK(merge_speech_clusters_by_face(SpeakerTimeline{}).empty());
}
