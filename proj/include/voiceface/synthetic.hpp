#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/faces.hpp"
#include "voiceface/frontend.hpp"
#include "voiceface/rng.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vec_math.hpp"

namespace voiceface {

// ─── scenario configuration ───

struct ScenarioConfig {
  int num_speakers = 5;
  int num_turns = 20;
  double turn_length_min_s = 2.0;
  double turn_length_max_s = 5.0;
  double gap_min_s = 0.4;
  double gap_max_s = 1.2;
  double camera_on_speaker_prob = 0.9;
  double camera_cut_rate_hz = 0.25;
  double face_noise_sigma = 0.05;       // expected total embedding noise norm
  double voice_feature_separation = 4.0;  // mean separation in units of sigma
  double face_sample_rate_hz = 5.0;
  double offscreen_prob = 0.2;  // camera off the speaker AND showing nobody
  std::uint64_t seed = 1;

  // plumbing for the feature-space generator and the waveform renderer
  int feature_dim = 20;
  double voice_feature_sigma = 1.0;
  int sample_rate_hz = 16000;

  void validate() const {
    auto prob = [](double p, const char* what) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError(std::string(what) + " must lie in [0, 1]");
      }
    };
    prob(camera_on_speaker_prob, "camera_on_speaker_prob");
    prob(offscreen_prob, "offscreen_prob");
    if (num_speakers < 1) throw ConfigError("num_speakers must be at least 1");
    if (num_turns < 1) throw ConfigError("num_turns must be at least 1");
    if (!(turn_length_min_s > 0.0) || turn_length_max_s < turn_length_min_s) {
      throw ConfigError("turn length range must be positive");
    }
    if (!(gap_min_s > 0.0) || gap_max_s < gap_min_s) {
      throw ConfigError("gap range must be positive");
    }
    if (!(camera_cut_rate_hz >= 0.0)) throw ConfigError("camera_cut_rate_hz must be nonnegative");
    if (!(face_sample_rate_hz > 0.0)) throw ConfigError("face_sample_rate_hz must be positive");
    if (!(face_noise_sigma >= 0.0)) throw ConfigError("face_noise_sigma must be nonnegative");
    if (!(voice_feature_separation >= 0.0)) {
      throw ConfigError("voice_feature_separation must be nonnegative");
    }
    if (!(voice_feature_sigma > 0.0)) throw ConfigError("voice_feature_sigma must be positive");
    if (feature_dim < 1) throw ConfigError("feature_dim must be at least 1");
    if (num_speakers > feature_dim) {
      throw ConfigError("num_speakers must not exceed feature_dim");
    }
    if (num_speakers > kFaceEmbeddingDim) {
      throw ConfigError("num_speakers must not exceed the face embedding dimension");
    }
    if (sample_rate_hz < 1000) throw ConfigError("sample_rate_hz too low");
  }
};

// ─── ground truth ───

struct TruthTurn {
  double start_s = 0.0;
  double end_s = 0.0;
  int speaker_id = -1;
  bool onscreen = false;  // did the camera show this turn's speaker at all
};

struct GroundTruth {
  std::vector<TruthTurn> turns;        // disjoint, ascending
  std::vector<int> speaker_face_map;   // speaker_id -> face identity id
  std::vector<int> detection_identities;  // parallel to the generated tracks
  double duration_s = 0.0;
  int num_speakers = 0;
};

struct Scenario {
  FeatureSequence features;
  std::vector<FaceDetection> detections;
  GroundTruth truth;
};

namespace detail {

// Random orthonormal directions via Gram-Schmidt over Gaussian draws.
inline std::vector<std::vector<double>> orthonormal_directions(int count, int dim, Rng& rng) {
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.gaussian();
    for (const auto& d : dirs) {
      const double proj = dot(v, d);
      for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= proj * d[static_cast<std::size_t>(i)];
    }
    const double len = norm(v);
    if (len < 1e-8) continue;  // essentially parallel draw; try again
    for (double& x : v) x /= len;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

constexpr double kSilenceLogLevel = -8.0;  // log-mel floor for synthesized gaps
constexpr double kNominalFps = 25.0;       // frame index clock for detections

}  // namespace detail

// Generates a fully labeled scenario: a log-mel-like feature stream in which
// each speaker occupies a distinct Gaussian cloud, face detections sampled at
// face_sample_rate_hz, and the turn-level ground truth. The camera model is a
// Poisson shot-cut process; within each (turn x shot) piece the camera either
// shows the speaker (camera_on_speaker_prob), shows nobody (offscreen_prob of
// the remainder), or cuts to a random other identity. Deterministic per seed.
inline Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  Scenario out;
  GroundTruth& truth = out.truth;
  truth.num_speakers = cfg.num_speakers;
  truth.speaker_face_map.resize(static_cast<std::size_t>(cfg.num_speakers));
  for (int s = 0; s < cfg.num_speakers; ++s) {
    truth.speaker_face_map[static_cast<std::size_t>(s)] = s;
  }

  // Turn schedule: alternating gap / turn, no speaker twice in a row.
  double t = rng.uniform() * (cfg.gap_max_s - cfg.gap_min_s) + cfg.gap_min_s;
  int prev = -1;
  for (int i = 0; i < cfg.num_turns; ++i) {
    int spk = rng.uniform_int(cfg.num_speakers);
    while (cfg.num_speakers > 1 && spk == prev) {
      spk = rng.uniform_int(cfg.num_speakers);
    }
    prev = spk;
    const double len =
        cfg.turn_length_min_s + rng.uniform() * (cfg.turn_length_max_s - cfg.turn_length_min_s);
    truth.turns.push_back(TruthTurn{t, t + len, spk, false});
    t += len;
    t += cfg.gap_min_s + rng.uniform() * (cfg.gap_max_s - cfg.gap_min_s);
  }
  truth.duration_s = t;

  // Voice models: well separated means, shared isotropic sigma.
  const auto voice_dirs = detail::orthonormal_directions(cfg.num_speakers, cfg.feature_dim, rng);
  std::vector<std::vector<double>> voice_means(static_cast<std::size_t>(cfg.num_speakers));
  const double scale = cfg.voice_feature_separation * cfg.voice_feature_sigma;
  for (int s = 0; s < cfg.num_speakers; ++s) {
    voice_means[static_cast<std::size_t>(s)] = voice_dirs[static_cast<std::size_t>(s)];
    for (double& x : voice_means[static_cast<std::size_t>(s)]) x *= scale;
  }

  // Feature stream on the 10 ms grid; a frame belongs to the turn covering
  // its center. Gaps sit near a constant low log level so the energy gate in
  // speech_activity separates them cleanly.
  FeatureSequence& seq = out.features;
  seq.dim = cfg.feature_dim;
  seq.hop_s = 0.01;
  seq.start_s = 0.0;
  seq.kind = FeatureKind::kLogMel;
  seq.fingerprint = "synthetic:v1:dim=" + std::to_string(cfg.feature_dim);
  const long num_frames = std::lround(truth.duration_s * 100.0);
  std::size_t turn_ptr = 0;
  std::vector<double> frame(static_cast<std::size_t>(cfg.feature_dim));
  for (long i = 0; i < num_frames; ++i) {
    const double center = (static_cast<double>(i) + 0.5) * 0.01;
    while (turn_ptr < truth.turns.size() && truth.turns[turn_ptr].end_s <= center) ++turn_ptr;
    const bool voiced =
        turn_ptr < truth.turns.size() && truth.turns[turn_ptr].start_s <= center;
    if (voiced) {
      const auto& mean = voice_means[static_cast<std::size_t>(truth.turns[turn_ptr].speaker_id)];
      for (int d = 0; d < cfg.feature_dim; ++d) {
        frame[static_cast<std::size_t>(d)] =
            mean[static_cast<std::size_t>(d)] + cfg.voice_feature_sigma * rng.gaussian();
      }
    } else {
      for (int d = 0; d < cfg.feature_dim; ++d) {
        frame[static_cast<std::size_t>(d)] = detail::kSilenceLogLevel + 0.1 * rng.gaussian();
      }
    }
    seq.push_frame(frame);
  }

  // Camera: piecewise-constant visibility on the pieces cut by turn
  // boundaries and Poisson shot cuts.
  std::vector<double> bounds{0.0, truth.duration_s};
  for (const TruthTurn& turn : truth.turns) {
    bounds.push_back(turn.start_s);
    bounds.push_back(turn.end_s);
  }
  if (cfg.camera_cut_rate_hz > 0.0) {
    double cut = rng.exponential(cfg.camera_cut_rate_hz);
    while (cut < truth.duration_s) {
      bounds.push_back(cut);
      cut += rng.exponential(cfg.camera_cut_rate_hz);
    }
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  struct Piece {
    double start_s, end_s;
    int visible = -1;  // face identity, -1 for empty frame
  };
  std::vector<Piece> pieces;
  turn_ptr = 0;
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    Piece piece{bounds[b], bounds[b + 1], -1};
    const double center = 0.5 * (piece.start_s + piece.end_s);
    while (turn_ptr < truth.turns.size() && truth.turns[turn_ptr].end_s <= center) ++turn_ptr;
    const bool in_turn =
        turn_ptr < truth.turns.size() && truth.turns[turn_ptr].start_s <= center;
    if (in_turn) {
      const int spk = truth.turns[turn_ptr].speaker_id;
      if (rng.uniform() < cfg.camera_on_speaker_prob) {
        piece.visible = truth.speaker_face_map[static_cast<std::size_t>(spk)];
      } else if (rng.uniform() >= cfg.offscreen_prob && cfg.num_speakers > 1) {
        int other = rng.uniform_int(cfg.num_speakers - 1);
        if (other >= spk) ++other;
        piece.visible = truth.speaker_face_map[static_cast<std::size_t>(other)];
      }
    } else if (rng.uniform() >= cfg.offscreen_prob) {
      const int who = rng.uniform_int(cfg.num_speakers);
      piece.visible = truth.speaker_face_map[static_cast<std::size_t>(who)];
    }
    pieces.push_back(piece);
  }

  // Face prototypes and sampled detections. Noise is drawn per component at
  // sigma/sqrt(dim) so face_noise_sigma is the expected total perturbation
  // norm of a unit-length prototype.
  const auto prototypes =
      detail::orthonormal_directions(cfg.num_speakers, kFaceEmbeddingDim, rng);
  const double component_sigma =
      cfg.face_noise_sigma / std::sqrt(static_cast<double>(kFaceEmbeddingDim));
  std::size_t piece_ptr = 0;
  for (long k = 0;; ++k) {
    const double ts = (static_cast<double>(k) + 0.5) / cfg.face_sample_rate_hz;
    if (ts >= truth.duration_s) break;
    while (piece_ptr < pieces.size() && pieces[piece_ptr].end_s <= ts) ++piece_ptr;
    if (piece_ptr >= pieces.size()) break;
    const Piece& piece = pieces[piece_ptr];
    if (piece.visible < 0) continue;
    FaceDetection det;
    det.timestamp_s = ts;
    det.frame_index = std::lround(ts * detail::kNominalFps);
    det.bbox.x = 0.1 + 0.6 * rng.uniform();
    det.bbox.y = 0.1 + 0.6 * rng.uniform();
    det.bbox.width = 0.2;
    det.bbox.height = 0.2;
    det.track_id = static_cast<int>(piece_ptr);  // one track per piece
    det.embedding.resize(kFaceEmbeddingDim);
    const auto& proto = prototypes[static_cast<std::size_t>(piece.visible)];
    for (int d = 0; d < kFaceEmbeddingDim; ++d) {
      det.embedding[static_cast<std::size_t>(d)] =
          proto[static_cast<std::size_t>(d)] + component_sigma * rng.gaussian();
    }
    validate(det);
    out.detections.push_back(std::move(det));
    truth.detection_identities.push_back(piece.visible);
  }

  // A turn is on-screen when at least one detection of its speaker's face
  // landed inside it.
  for (std::size_t i = 0; i < out.detections.size(); ++i) {
    const double ts = out.detections[i].timestamp_s;
    for (TruthTurn& turn : truth.turns) {
      if (ts < turn.start_s || ts >= turn.end_s) continue;
      if (truth.detection_identities[i] ==
          truth.speaker_face_map[static_cast<std::size_t>(turn.speaker_id)]) {
        turn.onscreen = true;
      }
      break;
    }
  }
  return out;
}

// Renders the ground-truth schedule as an actual waveform so the full
// front-end can be exercised: each speaker is a small stack of harmonics on a
// speaker-specific fundamental, gaps carry only the -50 dB noise bed.
inline AudioBuffer render_waveform(const ScenarioConfig& cfg, const GroundTruth& truth) {
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  AudioBuffer audio;
  audio.sample_rate_hz = cfg.sample_rate_hz;
  const long n = std::lround(truth.duration_s * cfg.sample_rate_hz);
  audio.samples.assign(static_cast<std::size_t>(n), 0.0f);
  const double noise_amp = std::pow(10.0, -50.0 / 20.0);
  for (long i = 0; i < n; ++i) {
    audio.samples[static_cast<std::size_t>(i)] = static_cast<float>(noise_amp * rng.gaussian());
  }
  constexpr double kHarmonicAmps[3] = {0.25, 0.15, 0.08};
  const double ramp_s = 0.005;
  for (const TruthTurn& turn : truth.turns) {
    const double f0 = 120.0 + 60.0 * turn.speaker_id;
    const long a = std::lround(turn.start_s * cfg.sample_rate_hz);
    const long b = std::min<long>(n, std::lround(turn.end_s * cfg.sample_rate_hz));
    for (long i = std::max<long>(0, a); i < b; ++i) {
      const double ts = static_cast<double>(i) / cfg.sample_rate_hz;
      const double edge = std::min(ts - turn.start_s, turn.end_s - ts);
      const double gain = std::clamp(edge / ramp_s, 0.0, 1.0);
      double v = 0.0;
      for (int h = 0; h < 3; ++h) {
        v += kHarmonicAmps[h] * std::sin(2.0 * kPi * f0 * (h + 1) * ts);
      }
      audio.samples[static_cast<std::size_t>(i)] += static_cast<float>(gain * v);
    }
  }
  for (float& x : audio.samples) x = std::clamp(x, -1.0f, 1.0f);
  return audio;
}

// ─── scoring against ground truth ───

struct ScoreReport {
  long segments_evaluated = 0;
  long segments_correct = 0;
  long segments_excluded = 0;  // predicted speech with no truth overlap
  double accuracy = 0.0;       // correct / evaluated
  double speech_precision = 0.0;
  double speech_recall = 0.0;
  double cluster_purity = 0.0;
};

// Majority true identity per face cluster (ties to the lowest identity);
// -1 for an empty cluster.
inline std::vector<int> face_cluster_identities(const FaceClusterResult& clusters,
                                                const std::vector<int>& detection_identities) {
  std::vector<int> out(clusters.clusters.size(), -1);
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    std::map<int, long> votes;
    for (int i : clusters.clusters[c].detection_indices) {
      if (i < 0 || i >= static_cast<int>(detection_identities.size())) {
        throw ConfigError("detection index out of range in face clustering");
      }
      ++votes[detection_identities[static_cast<std::size_t>(i)]];
    }
    long best = 0;
    for (const auto& [identity, count] : votes) {
      if (count > best) {
        best = count;
        out[c] = identity;
      }
    }
  }
  return out;
}

// Scores a predicted timeline against the ground truth. A predicted segment
// is correct when its assignment maps to the identity that holds at least
// half of the segment's overlap with truth turns, or when it says OFF_SCREEN
// and at least half of that overlap lies in turns the camera never showed.
// `face_identity[f]` translates face cluster f into a ground-truth identity
// (see face_cluster_identities).
inline ScoreReport score_against_truth(const SpeakerTimeline& predicted, const GroundTruth& truth,
                                       const std::vector<int>& face_identity) {
  ScoreReport report;
  double predicted_time = 0.0, overlap_time = 0.0;
  std::map<int, std::map<int, double>> cluster_speaker_time;  // speech cluster -> speaker -> s

  for (const TimelineEntry& entry : predicted.entries) {
    if (entry.end_s > truth.duration_s + 1e-6) {
      throw ConfigError("predicted timeline extends beyond the ground-truth duration");
    }
    predicted_time += entry.end_s - entry.start_s;

    double total = 0.0, matching = 0.0, offscreen_truth = 0.0;
    const int identity =
        entry.face_cluster_id.has_value() &&
                *entry.face_cluster_id < static_cast<int>(face_identity.size())
            ? face_identity[static_cast<std::size_t>(*entry.face_cluster_id)]
            : -1;
    for (const TruthTurn& turn : truth.turns) {
      const double lo = std::max(entry.start_s, turn.start_s);
      const double hi = std::min(entry.end_s, turn.end_s);
      if (hi <= lo) continue;
      const double w = hi - lo;
      total += w;
      cluster_speaker_time[entry.speech_cluster_id][turn.speaker_id] += w;
      if (!turn.onscreen) offscreen_truth += w;
      if (identity >= 0 &&
          truth.speaker_face_map[static_cast<std::size_t>(turn.speaker_id)] == identity) {
        matching += w;
      }
    }
    overlap_time += total;
    if (total <= 0.0) {
      ++report.segments_excluded;
      continue;
    }
    ++report.segments_evaluated;
    const bool correct = entry.face_cluster_id.has_value() ? matching >= 0.5 * total
                                                           : offscreen_truth >= 0.5 * total;
    if (correct) ++report.segments_correct;
  }

  double truth_time = 0.0;
  for (const TruthTurn& turn : truth.turns) truth_time += turn.end_s - turn.start_s;
  report.accuracy = report.segments_evaluated
                        ? static_cast<double>(report.segments_correct) /
                              static_cast<double>(report.segments_evaluated)
                        : 0.0;
  report.speech_precision = predicted_time > 0.0 ? overlap_time / predicted_time : 0.0;
  report.speech_recall = truth_time > 0.0 ? overlap_time / truth_time : 0.0;

  double purity_num = 0.0, purity_den = 0.0;
  for (const auto& [cluster, by_speaker] : cluster_speaker_time) {
    double best = 0.0, sum = 0.0;
    for (const auto& [spk, w] : by_speaker) {
      best = std::max(best, w);
      sum += w;
    }
    purity_num += best;
    purity_den += sum;
  }
  report.cluster_purity = purity_den > 0.0 ? purity_num / purity_den : 0.0;
  return report;
}

// Renders the ground truth itself as a timeline (speech cluster = speaker id,
// face cluster = face identity, off-screen turns tagged OFF_SCREEN).
inline SpeakerTimeline truth_as_timeline(const GroundTruth& truth) {
  SpeakerTimeline tl;
  for (const TruthTurn& turn : truth.turns) {
    TimelineEntry e;
    e.start_s = turn.start_s;
    e.end_s = turn.end_s;
    e.speech_cluster_id = turn.speaker_id;
    if (turn.onscreen) {
      e.face_cluster_id = truth.speaker_face_map[static_cast<std::size_t>(turn.speaker_id)];
    }
    tl.entries.push_back(e);
  }
  return tl;
}

// ─── ground-truth file format ───

inline constexpr const char* kTruthHeader = "# voiceface truth v1";

inline void write_truth(const GroundTruth& truth, const std::string& path) {
  auto out = detail::open_output(path);
  out << kTruthHeader << '\n';
  out << "speakers " << truth.num_speakers << '\n';
  out << "duration " << detail::format_double(truth.duration_s) << '\n';
  for (int s = 0; s < truth.num_speakers; ++s) {
    out << "facemap " << s << ' ' << truth.speaker_face_map[static_cast<std::size_t>(s)] << '\n';
  }
  for (const TruthTurn& turn : truth.turns) {
    out << "turn " << detail::format_double(turn.start_s) << ' '
        << detail::format_double(turn.end_s) << ' ' << turn.speaker_id << ' '
        << (turn.onscreen ? 1 : 0) << '\n';
  }
  for (int id : truth.detection_identities) {
    out << "det " << id << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline GroundTruth read_truth(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != kTruthHeader) {
    throw ParseError("missing truth header in " + path, 1);
  }
  GroundTruth truth;
  bool have_speakers = false, have_duration = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto tok = detail::split_ws(line);
    if (tok[0] == "speakers" && tok.size() == 2) {
      truth.num_speakers = static_cast<int>(detail::parse_long(tok[1], "speakers", line_no));
      truth.speaker_face_map.resize(static_cast<std::size_t>(std::max(0, truth.num_speakers)));
      have_speakers = true;
    } else if (tok[0] == "duration" && tok.size() == 2) {
      truth.duration_s = detail::parse_double(tok[1], "duration", line_no);
      have_duration = true;
    } else if (tok[0] == "facemap" && tok.size() == 3) {
      const long spk = detail::parse_long(tok[1], "speaker id", line_no);
      if (spk < 0 || spk >= static_cast<long>(truth.speaker_face_map.size())) {
        throw ParseError("facemap speaker out of range", line_no);
      }
      truth.speaker_face_map[static_cast<std::size_t>(spk)] =
          static_cast<int>(detail::parse_long(tok[2], "face identity", line_no));
    } else if (tok[0] == "turn" && tok.size() == 5) {
      TruthTurn turn;
      turn.start_s = detail::parse_double(tok[1], "turn start", line_no);
      turn.end_s = detail::parse_double(tok[2], "turn end", line_no);
      turn.speaker_id = static_cast<int>(detail::parse_long(tok[3], "turn speaker", line_no));
      turn.onscreen = detail::parse_long(tok[4], "turn onscreen flag", line_no) != 0;
      if (turn.end_s < turn.start_s) {
        throw ParseError("turn ends before it starts", line_no);
      }
      truth.turns.push_back(turn);
    } else if (tok[0] == "det" && tok.size() == 2) {
      truth.detection_identities.push_back(
          static_cast<int>(detail::parse_long(tok[1], "detection identity", line_no)));
    } else {
      throw ParseError("unrecognized truth line: " + line, line_no);
    }
  }
  if (!have_speakers || !have_duration) {
    throw ParseError("truth file missing speakers/duration", line_no);
  }
  return truth;
}

}  // namespace voiceface
