#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voiceface/error.hpp"

namespace voiceface {

inline constexpr int kFaceEmbeddingDim = 128;

// ─── Audio ───────────────────────────────────────────────────────────────

// Mono audio, samples normalized to [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = 0;

  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

// ─── Faces ───────────────────────────────────────────────────────────────

// Normalized [0,1] image coordinates.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool inside_unit_square() const {
    return x >= 0.0 && y >= 0.0 && width >= 0.0 && height >= 0.0 &&
           x + width <= 1.0 + 1e-12 && y + height <= 1.0 + 1e-12;
  }
};

// One timestamped face observation with its identity embedding.
// track_id is an optional upstream tracker label; -1 when absent.
struct FaceDetection {
  double timestamp_s = 0.0;
  long frame_index = 0;
  BoundingBox bbox;
  std::vector<float> embedding;
  int track_id = -1;
};

inline void validate(const FaceDetection& d) {
  if (static_cast<int>(d.embedding.size()) != kFaceEmbeddingDim) {
    throw DimensionError("face embedding must have " +
                         std::to_string(kFaceEmbeddingDim) + " entries, got " +
                         std::to_string(d.embedding.size()));
  }
  if (d.timestamp_s < 0.0) {
    throw ParseError("face detection timestamp must be non-negative");
  }
  if (d.frame_index < 0) {
    throw ParseError("face detection frame index must be non-negative");
  }
  if (!d.bbox.inside_unit_square()) {
    throw ParseError("face bounding box outside unit square");
  }
  for (float v : d.embedding) {
    if (!std::isfinite(v)) {
      throw ParseError("face embedding has non-finite entry");
    }
  }
}

// ─── Features ────────────────────────────────────────────────────────────

enum class FeatureKind { kRaw, kMelSpectra, kLogMel, kMfcc };

inline const char* to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::kRaw: return "raw";
    case FeatureKind::kMelSpectra: return "mel";
    case FeatureKind::kLogMel: return "logmel";
    case FeatureKind::kMfcc: return "mfcc";
  }
  return "unknown";
}

inline FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "raw") return FeatureKind::kRaw;
  if (s == "mel") return FeatureKind::kMelSpectra;
  if (s == "logmel") return FeatureKind::kLogMel;
  if (s == "mfcc") return FeatureKind::kMfcc;
  throw ConfigError("unknown feature kind: " + s);
}

// Time-ordered fixed-dimension feature frames, stored row-major.
// fingerprint identifies the front-end configuration that produced the
// frames; VLAD codebooks refuse to encode features from a different one.
struct FeatureSequence {
  std::vector<double> data;
  int dim = 0;
  double hop_s = 0.0;
  double start_s = 0.0;
  FeatureKind kind = FeatureKind::kRaw;
  std::string fingerprint;

  int num_frames() const {
    return dim > 0 ? static_cast<int>(data.size()) / dim : 0;
  }

  std::span<const double> frame(int i) const {
    return std::span<const double>(data.data() + static_cast<std::size_t>(i) * dim, dim);
  }

  void push_frame(std::span<const double> f) {
    data.insert(data.end(), f.begin(), f.end());
  }
};

// ─── Speech segments and timelines ───────────────────────────────────────

struct SpeechSegment {
  double start_s = 0.0;
  double end_s = 0.0;  // exclusive
  int segment_id = -1;

  double duration_s() const { return end_s - start_s; }
};

// One timeline row. face_cluster_id empty means the speaker is off-screen;
// the serialized form uses the literal tag OFF_SCREEN.
struct TimelineEntry {
  double start_s = 0.0;
  double end_s = 0.0;
  int speech_cluster_id = -1;
  std::optional<int> face_cluster_id;
};

struct SpeakerTimeline {
  std::vector<TimelineEntry> entries;
};

inline bool operator==(const TimelineEntry& a, const TimelineEntry& b) {
  return a.start_s == b.start_s && a.end_s == b.end_s &&
         a.speech_cluster_id == b.speech_cluster_id &&
         a.face_cluster_id == b.face_cluster_id;
}

inline bool operator==(const SpeakerTimeline& a, const SpeakerTimeline& b) {
  return a.entries == b.entries;
}

// ─── Ratings ─────────────────────────────────────────────────────────────

enum class Rating { kCorrect, kIncorrect, kPartiallyCorrect, kUnsure };

inline const char* to_string(Rating r) {
  switch (r) {
    case Rating::kCorrect: return "Correct";
    case Rating::kIncorrect: return "Incorrect";
    case Rating::kPartiallyCorrect: return "PartiallyCorrect";
    case Rating::kUnsure: return "Unsure";
  }
  return "unknown";
}

inline Rating rating_from_string(const std::string& s) {
  if (s == "Correct") return Rating::kCorrect;
  if (s == "Incorrect") return Rating::kIncorrect;
  if (s == "PartiallyCorrect") return Rating::kPartiallyCorrect;
  if (s == "Unsure") return Rating::kUnsure;
  throw ParseError("unknown rating verdict: " + s);
}

// Three rater verdicts for one clip.
struct RatingRecord {
  std::string clip_id;
  std::array<Rating, 3> ratings{};
};

// ─── VLAD embeddings ─────────────────────────────────────────────────────

// Fixed-size segment embedding (K blocks of D residual dimensions).
struct VladEmbedding {
  std::vector<double> values;
  int segment_id = -1;

  int dim() const { return static_cast<int>(values.size()); }
};

struct PairLabel {
  VladEmbedding a;
  VladEmbedding b;
  bool same_speaker = false;
};

// Concatenates feature sequences frame-wise. All inputs must agree on
// dimension, kind, hop, and fingerprint; timing metadata comes from the
// first sequence.
inline FeatureSequence concat_features(const std::vector<const FeatureSequence*>& parts) {
  FeatureSequence out;
  bool first = true;
  for (const FeatureSequence* p : parts) {
    if (first) {
      out.dim = p->dim;
      out.hop_s = p->hop_s;
      out.start_s = p->start_s;
      out.kind = p->kind;
      out.fingerprint = p->fingerprint;
      first = false;
    } else if (p->dim != out.dim || p->kind != out.kind ||
               p->fingerprint != out.fingerprint) {
      throw DimensionError("cannot concatenate features from different front-ends");
    }
    out.data.insert(out.data.end(), p->data.begin(), p->data.end());
  }
  return out;
}

// Copies the frames whose span lies inside [start_s, end_s), assuming the
// interval sits on the sequence's own hop grid (rounding absorbs float
// drift from repeated hop additions).
inline FeatureSequence slice_features(const FeatureSequence& seq, double start_s, double end_s) {
  if (seq.dim <= 0 || seq.hop_s <= 0.0) {
    throw DimensionError("cannot slice an empty feature sequence");
  }
  if (end_s < start_s) {
    throw DimensionError("feature slice ends before it starts");
  }
  long lo = std::lround((start_s - seq.start_s) / seq.hop_s);
  long hi = std::lround((end_s - seq.start_s) / seq.hop_s);
  lo = std::max<long>(lo, 0);
  hi = std::min<long>(hi, seq.num_frames());
  FeatureSequence out;
  out.dim = seq.dim;
  out.hop_s = seq.hop_s;
  out.start_s = seq.start_s + static_cast<double>(lo) * seq.hop_s;
  out.kind = seq.kind;
  out.fingerprint = seq.fingerprint;
  if (lo < hi) {
    out.data.assign(seq.data.begin() + lo * seq.dim, seq.data.begin() + hi * seq.dim);
  }
  return out;
}

}  // namespace voiceface
