#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

// Dense per-frame speech probabilities at a fixed 100 values per second.
struct SpeechPosterior {
  std::vector<double> probs;
  double start_s = 0.0;

  static constexpr double kRateHz = 100.0;
};

inline constexpr double kPosteriorHopS = 0.010;
inline constexpr long kMinSegmentFrames = 100;  // 1.0 s
inline constexpr long kMinGapFrames = 25;       // 0.25 s

// ─── Detectors ───────────────────────────────────────────────────────────

// Per-frame energy on a dB-like scale, derived from the feature kind:
// mel spectra sum directly, log-mel is exponentiated back, MFCC uses the
// zeroth cepstral coefficient (proportional to mean log band energy), and
// raw feature vectors use their mean square.
inline double frame_energy_db(const FeatureSequence& features, int frame) {
  const auto x = features.frame(frame);
  constexpr double kEps = 1e-10;
  switch (features.kind) {
    case FeatureKind::kRaw: {
      double ms = 0.0;
      for (double v : x) ms += v * v;
      ms /= static_cast<double>(x.size());
      return 10.0 * std::log10(ms + kEps);
    }
    case FeatureKind::kMelSpectra: {
      double mean = 0.0;
      for (double v : x) mean += v;
      mean /= static_cast<double>(x.size());
      return 10.0 * std::log10(std::max(mean, 0.0) + kEps);
    }
    case FeatureKind::kLogMel: {
      double mean = 0.0;
      for (double v : x) mean += std::exp(v);
      mean /= static_cast<double>(x.size());
      return 10.0 * std::log10(mean + kEps);
    }
    case FeatureKind::kMfcc:
      return 10.0 / std::log(10.0) * x[0];
  }
  return 0.0;
}

class SpeechDetector {
 public:
  virtual ~SpeechDetector() = default;
  virtual SpeechPosterior detect(const FeatureSequence& features) const = 0;
};

struct EnergySadConfig {
  double margin_db = 9.0;
  // The log-mel energy measure carries the window/filterbank gain (~+30 dB
  // over plain signal dB), so the cap has to sit above realistic noise
  // floors in that scale; -20 here corresponds to roughly -50 dBFS input.
  double noise_floor_cap_db = -20.0;
  double noise_percentile = 0.10;
};

// Threshold detector: a frame is speech when its energy exceeds the noise
// floor by margin_db. The floor is the 10th percentile of frame energies,
// capped from above so that uniformly loud input still registers as speech.
class EnergySpeechDetector : public SpeechDetector {
 public:
  explicit EnergySpeechDetector(const EnergySadConfig& cfg = {}) : cfg_(cfg) {}

  SpeechPosterior detect(const FeatureSequence& features) const override {
    const int n = features.num_frames();
    SpeechPosterior post;
    post.start_s = features.start_s;
    post.probs.resize(n);
    if (n == 0) {
      return post;
    }
    std::vector<double> energies(n);
    for (int i = 0; i < n; ++i) {
      energies[i] = frame_energy_db(features, i);
    }
    std::vector<double> sorted = energies;
    std::sort(sorted.begin(), sorted.end());
    const int idx = std::min<int>(n - 1, static_cast<int>(cfg_.noise_percentile * n));
    const double floor_db = std::min(sorted[idx], cfg_.noise_floor_cap_db);
    const double threshold_db = floor_db + cfg_.margin_db;
    for (int i = 0; i < n; ++i) {
      post.probs[i] = energies[i] >= threshold_db ? 1.0 : 0.0;
    }
    return post;
  }

 private:
  EnergySadConfig cfg_;
};

// Replays externally computed probabilities. Tolerates an off-by-two frame
// count (different framing conventions); larger mismatches are an error.
class PrecomputedSpeechDetector : public SpeechDetector {
 public:
  explicit PrecomputedSpeechDetector(SpeechPosterior posterior)
      : posterior_(std::move(posterior)) {
    for (double p : posterior_.probs) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ParseError("speech probability outside [0,1]");
      }
    }
  }

  SpeechPosterior detect(const FeatureSequence& features) const override {
    const long want = features.num_frames();
    const long have = static_cast<long>(posterior_.probs.size());
    if (std::labs(want - have) > 2) {
      throw DimensionError("precomputed posterior has " + std::to_string(have) +
                           " frames, features have " + std::to_string(want));
    }
    SpeechPosterior post;
    post.start_s = features.start_s;
    post.probs.assign(posterior_.probs.begin(),
                      posterior_.probs.begin() + std::min(want, have));
    post.probs.resize(want, 0.0);
    return post;
  }

 private:
  SpeechPosterior posterior_;
};

inline SpeechPosterior detect_speech(const FeatureSequence& features,
                                     const SpeechDetector& detector) {
  if (std::abs(features.hop_s - kPosteriorHopS) > 1e-9) {
    throw ConfigError("speech detection needs features at 10 ms hop, got " +
                      detail::format_double(features.hop_s));
  }
  SpeechPosterior post = detector.detect(features);
  if (static_cast<int>(post.probs.size()) != features.num_frames()) {
    throw DimensionError("detector produced wrong frame count");
  }
  return post;
}

// ─── Smoothing ───────────────────────────────────────────────────────────

// Densely thresholded frames become segments in three ordered steps:
//  1. probs >= on_threshold form raw runs on the 10 ms grid;
//  2. runs whose gap is shorter than 0.25 s are collapsed into one;
//  3. runs shorter than 1.0 s are discarded.
// Output segments are disjoint, each at least 1 s, gaps at least 0.25 s,
// with end times exclusive.
inline std::vector<SpeechSegment> smooth_to_segments(const SpeechPosterior& posterior,
                                                     double on_threshold = 0.5) {
  struct Run {
    long begin;
    long end;  // frame index, exclusive
  };

  std::vector<Run> runs;
  const long n = static_cast<long>(posterior.probs.size());
  for (long i = 0; i < n;) {
    if (posterior.probs[i] >= on_threshold) {
      long j = i;
      while (j < n && posterior.probs[j] >= on_threshold) {
        ++j;
      }
      runs.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }

  std::vector<Run> merged;
  for (const Run& r : runs) {
    if (!merged.empty() && r.begin - merged.back().end < kMinGapFrames) {
      merged.back().end = r.end;
    } else {
      merged.push_back(r);
    }
  }

  std::vector<SpeechSegment> segments;
  for (const Run& r : merged) {
    if (r.end - r.begin >= kMinSegmentFrames) {
      SpeechSegment s;
      s.segment_id = static_cast<int>(segments.size());
      s.start_s = posterior.start_s + static_cast<double>(r.begin) * kPosteriorHopS;
      s.end_s = posterior.start_s + static_cast<double>(r.end) * kPosteriorHopS;
      segments.push_back(s);
    }
  }
  return segments;
}

// ─── Posterior files ─────────────────────────────────────────────────────

// One probability per line.
inline SpeechPosterior read_posterior(const std::string& path) {
  auto in = detail::open_input(path);
  SpeechPosterior post;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    if (tok.size() != 1) {
      throw ParseError("posterior line must hold a single probability", line_no);
    }
    const double p = detail::parse_double(tok[0], "probability", line_no);
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ParseError("probability outside [0,1]: " + tok[0], line_no);
    }
    post.probs.push_back(p);
  }
  return post;
}

inline void write_posterior(const SpeechPosterior& post, const std::string& path) {
  auto out = detail::open_output(path);
  for (double p : post.probs) {
    out << detail::format_double(p) << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace voiceface
