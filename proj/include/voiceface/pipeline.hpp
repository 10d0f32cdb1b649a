#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "voiceface/association.hpp"
#include "voiceface/config.hpp"
#include "voiceface/error.hpp"
#include "voiceface/faces.hpp"
#include "voiceface/frontend.hpp"
#include "voiceface/parallel.hpp"
#include "voiceface/rng.hpp"
#include "voiceface/speech_activity.hpp"
#include "voiceface/speech_clustering.hpp"
#include "voiceface/synthetic.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/timeline_io.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vlad.hpp"

namespace voiceface {

// Everything the inference pass produces, kept around for inspection; the
// timeline alone is the product.
struct PipelineResult {
  SpeechPosterior posterior;
  std::vector<SpeechSegment> segments;
  std::vector<FeatureSequence> segment_features;  // indexed by segment_id
  std::vector<VladEmbedding> segment_embeddings;
  ClusterResult speech_clusters;
  FaceClusterResult face_clusters;
  AssociationResult association;
  SpeakerTimeline timeline;
};

// Inference pass over precomputed features: speech detection -> smoothing ->
// per-segment VLAD -> conservative speech clustering -> face clustering ->
// co-occurrence association. An external posterior detector may replace the
// energy gate. With no speech found the result is an empty timeline, not an
// error.
inline PipelineResult run_pipeline(const FeatureSequence& features,
                                   const std::vector<FaceDetection>& detections,
                                   const VladCodebook& codebook, const PipelineConfig& cfg,
                                   const SpeechDetector* external_sad = nullptr) {
  cfg.validate();
  PipelineResult result;

  EnergySpeechDetector energy(cfg.sad);
  const SpeechDetector& detector = external_sad ? *external_sad : energy;
  result.posterior = detect_speech(features, detector);
  result.segments = smooth_to_segments(result.posterior, cfg.sad_threshold);
  if (result.segments.empty()) {
    result.face_clusters = cluster_faces(detections, cfg.face_threshold, cfg.face_use_tracks,
                                         cfg.jobs);
    return result;
  }

  result.segment_features.resize(result.segments.size());
  result.segment_embeddings.resize(result.segments.size());
  const long n = static_cast<long>(result.segments.size());
  VladOptions vopts;
  vopts.power_normalization = cfg.power_normalization;
  // Segments are independent; slots are preassigned, so the thread split
  // cannot reorder anything.
  for_each_chunk(n, cfg.jobs, [&](long, long begin, long end) {
    for (long i = begin; i < end; ++i) {
      const SpeechSegment& seg = result.segments[static_cast<std::size_t>(i)];
      FeatureSequence sliced = slice_features(features, seg.start_s, seg.end_s);
      VladEmbedding emb = encode(sliced, codebook, vopts);
      emb.segment_id = seg.segment_id;
      result.segment_features[static_cast<std::size_t>(i)] = std::move(sliced);
      result.segment_embeddings[static_cast<std::size_t>(i)] = std::move(emb);
    }
  });

  result.speech_clusters =
      cluster_segments(result.segment_embeddings, cfg.speech_cluster_threshold, cfg.jobs);
  for (SpeechCluster& cluster : result.speech_clusters.clusters) {
    cluster.embedding = recompute_cluster_embedding(cluster, codebook, result.segment_features,
                                                    result.segments, vopts);
  }

  result.face_clusters =
      cluster_faces(detections, cfg.face_threshold, cfg.face_use_tracks, cfg.jobs);
  FacePresenceIndex presence(result.face_clusters, detections);
  result.association =
      associate(result.speech_clusters.clusters, result.segments, presence, cfg.min_coverage);
  result.timeline = result.association.timeline;
  return result;
}

// Same pass starting from raw audio through the front-end.
inline PipelineResult run_pipeline(const AudioBuffer& audio,
                                   const std::vector<FaceDetection>& detections,
                                   const VladCodebook& codebook, const PipelineConfig& cfg,
                                   const SpeechDetector* external_sad = nullptr) {
  const FeatureSequence features = compute_features(audio, cfg.frontend);
  return run_pipeline(features, detections, codebook, cfg, external_sad);
}

// Plain-text diagnostics bundle next to the timeline: segment list,
// dendrogram, face cluster sizes, per-cluster association scores. `dir`
// must already exist.
inline void write_diagnostics(const PipelineResult& result, const std::string& dir) {
  {
    auto out = detail::open_output(dir + "/segments.txt");
    out << "# segment_id start_s end_s\n";
    for (const SpeechSegment& s : result.segments) {
      out << s.segment_id << ' ' << detail::format_double(s.start_s) << ' '
          << detail::format_double(s.end_s) << '\n';
    }
  }
  write_dendrogram(result.speech_clusters, dir + "/dendrogram.txt");
  {
    auto out = detail::open_output(dir + "/faces.txt");
    out << "# face_cluster_id num_detections\n";
    for (const FaceCluster& c : result.face_clusters.clusters) {
      out << c.cluster_id << ' ' << c.detection_indices.size() << '\n';
    }
  }
  {
    auto out = detail::open_output(dir + "/association.txt");
    out << "# speech_cluster -> face cluster, with per-face co-occurrence counts\n";
    for (const ClusterAssociation& a : result.association.associations) {
      out << "cluster " << a.speech_cluster_id << " face=";
      if (a.face_cluster_id.has_value()) {
        out << *a.face_cluster_id;
      } else {
        out << kOffScreenTag;
      }
      out << " opportunities=" << a.opportunities << " scores=";
      for (std::size_t f = 0; f < a.scores.size(); ++f) {
        out << (f ? "," : "") << a.scores[f];
      }
      out << '\n';
    }
  }
}

// Summary line per speaker for human consumption: total attributed speech
// time under each face cluster (and off screen).
inline std::string speaking_time_summary(const PipelineResult& result) {
  std::map<int, double> by_face;  // -1 collects off-screen time
  for (const TimelineEntry& e : result.timeline.entries) {
    by_face[e.face_cluster_id.value_or(-1)] += e.end_s - e.start_s;
  }
  std::string out;
  for (const auto& [face, seconds] : by_face) {
    if (face < 0) continue;
    out += "face " + std::to_string(face) + ": " + detail::format_double(seconds) + " s\n";
  }
  if (by_face.count(-1)) {
    out += std::string(kOffScreenTag) + ": " + detail::format_double(by_face[-1]) + " s\n";
  }
  return out;
}

// Turn-level same/different embedding pairs from a synthetic scenario, for
// ROC studies. Turns are encoded with the given codebook; if the full pair
// count exceeds max_pairs a seeded shuffle picks the subset.
inline std::vector<PairLabel> make_speaker_pairs(const Scenario& scenario,
                                                 const VladCodebook& codebook,
                                                 std::size_t max_pairs, std::uint64_t seed,
                                                 const VladOptions& opts = {}) {
  std::vector<VladEmbedding> turn_embeddings;
  std::vector<int> turn_speakers;
  for (const TruthTurn& turn : scenario.truth.turns) {
    FeatureSequence sliced = slice_features(scenario.features, turn.start_s, turn.end_s);
    if (sliced.num_frames() == 0) continue;
    turn_embeddings.push_back(encode(sliced, codebook, opts));
    turn_speakers.push_back(turn.speaker_id);
  }
  std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
  for (std::size_t i = 0; i < turn_embeddings.size(); ++i) {
    for (std::size_t j = i + 1; j < turn_embeddings.size(); ++j) {
      index_pairs.emplace_back(i, j);
    }
  }
  if (index_pairs.size() > max_pairs) {
    Rng rng(seed);
    for (std::size_t i = 0; i < max_pairs; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.uniform_int(static_cast<int>(index_pairs.size() - i)));
      std::swap(index_pairs[i], index_pairs[j]);
    }
    index_pairs.resize(max_pairs);
    std::sort(index_pairs.begin(), index_pairs.end());
  }
  std::vector<PairLabel> pairs;
  pairs.reserve(index_pairs.size());
  for (const auto& [i, j] : index_pairs) {
    PairLabel p;
    p.a = turn_embeddings[i];
    p.b = turn_embeddings[j];
    p.same_speaker = turn_speakers[i] == turn_speakers[j];
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace voiceface
