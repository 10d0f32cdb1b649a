#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/faces.hpp"
#include "voiceface/speech_clustering.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

// Per speech cluster: the chosen face cluster plus raw counts, kept for
// inspection. `face_cluster_id` empty means the speaker stayed off screen.
struct ClusterAssociation {
  int speech_cluster_id = -1;
  std::optional<int> face_cluster_id;
  std::vector<long> scores;  // co-occurrence count per face cluster id
  long opportunities = 0;    // face detections of any identity in the extent
};

struct AssociationResult {
  std::vector<ClusterAssociation> associations;
  SpeakerTimeline timeline;
};

// Assigns each speech cluster the face cluster whose detections co-occur most
// with the cluster's extent, i.e. the union of its member segments. Scores
// count detections inside the member intervals (half-open). The winner must
// have a nonzero score and cover at least `min_coverage` of all detections
// seen in the extent; otherwise the cluster is tagged off-screen. Score ties
// go to the lowest face cluster id.
inline AssociationResult associate(const std::vector<SpeechCluster>& clusters,
                                   const std::vector<SpeechSegment>& segments,
                                   const FacePresenceIndex& presence,
                                   double min_coverage = 0.0) {
  if (min_coverage < 0.0 || min_coverage > 1.0) {
    throw ConfigError("min_coverage must lie in [0, 1]");
  }
  AssociationResult result;
  const int f = presence.num_clusters();
  for (const SpeechCluster& cluster : clusters) {
    ClusterAssociation assoc;
    assoc.speech_cluster_id = cluster.cluster_id;
    assoc.scores.assign(static_cast<std::size_t>(f), 0);
    for (int seg_id : cluster.segment_ids) {
      if (seg_id < 0 || seg_id >= static_cast<int>(segments.size())) {
        throw ConfigError("speech cluster references unknown segment " + std::to_string(seg_id));
      }
      const SpeechSegment& seg = segments[static_cast<std::size_t>(seg_id)];
      for (int c = 0; c < f; ++c) {
        assoc.scores[static_cast<std::size_t>(c)] += presence.count_in(c, seg.start_s, seg.end_s);
      }
      assoc.opportunities += presence.total_in(seg.start_s, seg.end_s);
    }

    int best = -1;
    long best_score = 0;
    for (int c = 0; c < f; ++c) {
      const long s = assoc.scores[static_cast<std::size_t>(c)];
      if (s > best_score) {  // strict: ties keep the lowest id
        best_score = s;
        best = c;
      }
    }
    if (best >= 0 && static_cast<double>(best_score) >=
                         min_coverage * static_cast<double>(assoc.opportunities)) {
      assoc.face_cluster_id = best;
    }

    for (int seg_id : cluster.segment_ids) {
      const SpeechSegment& seg = segments[static_cast<std::size_t>(seg_id)];
      TimelineEntry entry;
      entry.start_s = seg.start_s;
      entry.end_s = seg.end_s;
      entry.speech_cluster_id = cluster.cluster_id;
      entry.face_cluster_id = assoc.face_cluster_id;
      result.timeline.entries.push_back(entry);
    }
    result.associations.push_back(std::move(assoc));
  }

  std::sort(result.timeline.entries.begin(), result.timeline.entries.end(),
            [](const TimelineEntry& a, const TimelineEntry& b) {
              if (a.start_s != b.start_s) return a.start_s < b.start_s;
              return a.speech_cluster_id < b.speech_cluster_id;
            });
  return result;
}

// Groups speech clusters that resolved to the same face: since several
// speech clusters can map to one face cluster, this acts as the final stage
// of speech clustering. Off-screen clusters are never grouped with each
// other — nothing says they share a speaker.
inline std::map<int, std::set<int>> merge_speech_clusters_by_face(
    const SpeakerTimeline& timeline) {
  std::map<int, std::set<int>> by_face;
  for (const TimelineEntry& entry : timeline.entries) {
    if (entry.face_cluster_id.has_value()) {
      by_face[*entry.face_cluster_id].insert(entry.speech_cluster_id);
    }
  }
  return by_face;
}

}  // namespace voiceface
