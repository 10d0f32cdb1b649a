// Acceptance gate for the pipeline: each criterion prints one [PASS]/[FAIL]
// line; the process exits nonzero if any fail. Reference computations here
// are written from scratch against the documented behavior, never by calling
// back into the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "voiceface/voiceface.hpp"

using namespace voiceface;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail = why;
    }
  }
};

// ─── 1. smoothing ───

std::vector<std::pair<long, long>> reference_smooth(const std::vector<double>& probs,
                                                    double thr) {
  std::vector<std::pair<long, long>> runs;
  const long n = static_cast<long>(probs.size());
  for (long i = 0; i < n;) {
    if (probs[i] >= thr) {
      long j = i;
      while (j < n && probs[j] >= thr) ++j;
      runs.emplace_back(i, j);
      i = j;
    } else {
      ++i;
    }
  }
  // merge to a fixpoint, then length-filter
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
      if (runs[i + 1].first - runs[i].second < 25) {
        runs[i].second = runs[i + 1].second;
        runs.erase(runs.begin() + static_cast<long>(i) + 1);
        changed = true;
        break;
      }
    }
  }
  std::vector<std::pair<long, long>> kept;
  for (const auto& r : runs) {
    if (r.second - r.first >= 100) kept.push_back(r);
  }
  return kept;
}

void criterion_smoothing(Check& check) {
  Rng rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const long n = 50 + rng.uniform_int(550);
    std::vector<double> probs(static_cast<std::size_t>(n));
    if (trial % 2 == 0) {
      bool on = rng.uniform() < 0.5;
      long i = 0;
      while (i < n) {
        const long len = 1 + rng.uniform_int(140);
        for (long j = i; j < std::min(n, i + len); ++j) {
          probs[static_cast<std::size_t>(j)] = on ? 1.0 : 0.0;
        }
        i += len;
        on = !on;
      }
    } else {
      for (auto& p : probs) p = rng.uniform();
    }
    const double thr = trial % 3 == 0 ? 0.3 : (trial % 3 == 1 ? 0.5 : 0.7);

    SpeechPosterior post;
    post.probs = probs;
    const auto segments = smooth_to_segments(post, thr);
    const auto want = reference_smooth(probs, thr);

    check.expect(segments.size() == want.size(), "segment count mismatch");
    if (segments.size() != want.size()) return;
    long prev_end = -1000;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const long b = std::lround(segments[s].start_s * 100.0);
      const long e = std::lround(segments[s].end_s * 100.0);
      check.expect(b == want[s].first && e == want[s].second, "segment bounds mismatch");
      check.expect(e - b >= 100, "segment shorter than 1 s");
      check.expect(b - prev_end >= 25 || prev_end < 0, "gap shorter than 0.25 s");
      prev_end = e;
    }
  }
  check.detail = "1000 random streams";
}

// ─── 2. vlad ───

void criterion_vlad(Check& check) {
  Rng rng(7);
  FeatureSequence train;
  train.dim = 5;
  train.hop_s = 0.01;
  for (int i = 0; i < 600; ++i) {
    std::vector<double> f(5);
    for (auto& x : f) x = rng.uniform(-2.0, 2.0);
    train.push_frame(f);
  }
  const VladCodebook cb = train_codebook(train, 8, 3);

  auto random_segment = [&](int len) {
    FeatureSequence seq;
    seq.dim = 5;
    seq.hop_s = 0.01;
    for (int i = 0; i < len; ++i) {
      std::vector<double> f(5);
      for (auto& x : f) x = rng.uniform(-2.0, 2.0);
      seq.push_frame(f);
    }
    return seq;
  };

  // fixed dimension K*D regardless of segment length
  for (int len = 1; len <= 40; ++len) {
    const VladEmbedding e = encode(random_segment(len), cb);
    check.expect(e.values.size() == static_cast<std::size_t>(cb.k * cb.dim),
                 "embedding dimension is not K*D");
    for (double v : e.values) {
      check.expect(std::isfinite(v), "non-finite embedding value");
    }
  }

  // duplicating the frame set must not move the embedding
  for (int trial = 0; trial < 25; ++trial) {
    const FeatureSequence seq = random_segment(3 + rng.uniform_int(28));
    FeatureSequence doubled = seq;
    for (int i = 0; i < seq.num_frames(); ++i) doubled.push_frame(seq.frame(i));
    const VladEmbedding a = encode(seq, cb);
    const VladEmbedding b = encode(doubled, cb);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    }
    check.expect(worst < 1e-9, "duplication moved the embedding");
  }

  // frames sitting exactly on centers leave nothing to aggregate
  FeatureSequence centers;
  centers.dim = 5;
  centers.hop_s = 0.01;
  for (int j = 0; j < cb.k; ++j) {
    const auto c = cb.center(j);
    centers.push_frame(std::vector<double>(c.begin(), c.end()));
  }
  const VladEmbedding zero = encode(centers, cb);
  for (double v : zero.values) {
    check.expect(v == 0.0, "zero-residual embedding is not the zero vector");
  }

  // assignment against a direct argmin
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> f(5);
    for (auto& x : f) x = rng.uniform(-3.0, 3.0);
    int want = 0;
    double want_d = 0.0;
    for (int j = 0; j < cb.k; ++j) {
      double d = 0.0;
      for (int t = 0; t < 5; ++t) {
        const double diff = f[static_cast<std::size_t>(t)] - cb.centers[static_cast<std::size_t>(j) * 5 + static_cast<std::size_t>(t)];
        d += diff * diff;
      }
      if (j == 0 || d < want_d) {
        want_d = d;
        want = j;
      }
    }
    check.expect(nearest_center(f, cb) == want, "nearest-center mismatch");
  }
  check.detail = "dims, duplication, zero residual, 10000 assignments";
}

// ─── 3. complete linkage ───

std::vector<std::vector<int>> reference_linkage(const std::vector<VladEmbedding>& embs,
                                                double threshold) {
  const int n = static_cast<int>(embs.size());
  std::vector<std::vector<double>> s(static_cast<std::size_t>(n),
                                     std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          cosine_similarity(embs[static_cast<std::size_t>(i)], embs[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<std::vector<int>> cl;
  for (int i = 0; i < n; ++i) cl.push_back({i});
  for (;;) {
    int best_a = -1, best_b = -1;
    double best = -2.0;
    std::vector<int> best_union;
    for (std::size_t a = 0; a < cl.size(); ++a) {
      for (std::size_t b = a + 1; b < cl.size(); ++b) {
        double linkage = 2.0;
        for (int i : cl[a]) {
          for (int j : cl[b]) {
            linkage = std::min(linkage, s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
          }
        }
        std::vector<int> u;
        std::merge(cl[a].begin(), cl[a].end(), cl[b].begin(), cl[b].end(),
                   std::back_inserter(u));
        bool better = best_a < 0 || linkage > best;
        if (!better && linkage == best) {
          if (u.front() != best_union.front()) {
            better = u.front() < best_union.front();
          } else if (u.back() != best_union.back()) {
            better = u.back() < best_union.back();
          } else {
            better = std::lexicographical_compare(u.begin(), u.end(), best_union.begin(),
                                                  best_union.end());
          }
        }
        if (better) {
          best = linkage;
          best_a = static_cast<int>(a);
          best_b = static_cast<int>(b);
          best_union = std::move(u);
        }
      }
    }
    if (best_a < 0 || best < threshold) break;
    cl[static_cast<std::size_t>(best_a)] = std::move(best_union);
    cl.erase(cl.begin() + best_b);
  }
  std::sort(cl.begin(), cl.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return cl;
}

void criterion_linkage(Check& check) {
  Rng rng(23);
  const double thresholds[] = {-0.5, 0.0, 0.3, 0.6, 0.8, 0.95};
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + rng.uniform_int(7);
    const int dim = 2 + rng.uniform_int(3);
    std::vector<VladEmbedding> embs;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && rng.uniform() < 0.3) {
        embs.push_back(embs[static_cast<std::size_t>(rng.uniform_int(i))]);  // exact duplicates force ties
        embs.back().segment_id = -1;
        continue;
      }
      VladEmbedding e;
      e.values.resize(static_cast<std::size_t>(dim));
      for (auto& x : e.values) x = rng.gaussian();
      embs.push_back(std::move(e));
    }
    const double thr = thresholds[trial % 6];
    const ClusterResult got = cluster_segments(embs, thr, 1);
    std::vector<std::vector<int>> got_parts;
    for (const SpeechCluster& c : got.clusters) got_parts.push_back(c.segment_ids);
    check.expect(got_parts == reference_linkage(embs, thr), "partition mismatch");
    if (!check.ok) return;
  }

  // raising the stop threshold can only split, never merge
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<VladEmbedding> embs;
    for (int i = 0; i < 8; ++i) {
      VladEmbedding e;
      e.values.resize(3);
      for (auto& x : e.values) x = rng.gaussian();
      embs.push_back(std::move(e));
    }
    std::size_t prev = 1;
    for (double thr = 0.0; thr < 0.96; thr += 0.05) {
      const std::size_t count = cluster_segments(embs, thr, 1).clusters.size();
      check.expect(count >= prev, "cluster count decreased as threshold rose");
      prev = count;
    }
  }
  check.detail = "500 exhaustive trials, monotone sweep";
}

// ─── 4. faces ───

void criterion_faces(Check& check) {
  const int kIdentities = 5;
  const int kPerIdentity = 20;
  int failures = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    Rng rng(9000 + static_cast<std::uint64_t>(seed));
    // orthonormal prototypes: pairwise angles of 90 degrees
    std::vector<std::vector<double>> protos;
    for (int p = 0; p < kIdentities; ++p) {
      std::vector<double> v(kFaceEmbeddingDim);
      for (auto& x : v) x = rng.gaussian();
      for (const auto& q : protos) {
        double dot = 0.0;
        for (int d = 0; d < kFaceEmbeddingDim; ++d) dot += v[static_cast<std::size_t>(d)] * q[static_cast<std::size_t>(d)];
        for (int d = 0; d < kFaceEmbeddingDim; ++d) v[static_cast<std::size_t>(d)] -= dot * q[static_cast<std::size_t>(d)];
      }
      double n2 = 0.0;
      for (double x : v) n2 += x * x;
      const double len = std::sqrt(n2);
      for (auto& x : v) x /= len;
      protos.push_back(std::move(v));
    }

    const double axis_sigma = 0.05 / std::sqrt(static_cast<double>(kFaceEmbeddingDim));
    std::vector<FaceDetection> dets;
    std::vector<std::vector<int>> want(kIdentities);
    for (int i = 0; i < kIdentities * kPerIdentity; ++i) {
      const int who = i % kIdentities;  // interleaved so clusters are not contiguous
      FaceDetection d;
      d.timestamp_s = 0.2 * i;
      d.frame_index = 5 * i;
      d.track_id = -1;
      d.embedding.resize(kFaceEmbeddingDim);
      for (int k = 0; k < kFaceEmbeddingDim; ++k) {
        d.embedding[static_cast<std::size_t>(k)] = static_cast<float>(
            protos[static_cast<std::size_t>(who)][static_cast<std::size_t>(k)] + axis_sigma * rng.gaussian());
      }
      want[static_cast<std::size_t>(who)].push_back(i);
      dets.push_back(std::move(d));
    }

    const FaceClusterResult got = cluster_faces(dets, 0.85, false, 1);
    std::vector<std::vector<int>> got_parts;
    for (const FaceCluster& c : got.clusters) {
      got_parts.push_back(c.detection_indices);
      std::sort(got_parts.back().begin(), got_parts.back().end());
    }
    std::sort(got_parts.begin(), got_parts.end());
    std::sort(want.begin(), want.end());
    if (got_parts != want) ++failures;
  }
  check.expect(failures == 0, std::to_string(failures) + " of 100 seeds missed the partition");
  check.detail = "100 seeds exact";
}

// ─── 5. association ───

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

FaceClusterResult manual_clusters(const std::vector<std::vector<int>>& members, int num_dets) {
  FaceClusterResult r;
  r.assignment.assign(static_cast<std::size_t>(num_dets), -1);
  for (std::size_t c = 0; c < members.size(); ++c) {
    FaceCluster fc;
    fc.cluster_id = static_cast<int>(c);
    fc.detection_indices = members[c];
    for (int i : members[c]) r.assignment[static_cast<std::size_t>(i)] = static_cast<int>(c);
    r.clusters.push_back(std::move(fc));
  }
  return r;
}

SpeechCluster speech_cluster(int id, std::vector<int> segment_ids) {
  SpeechCluster c;
  c.cluster_id = id;
  c.segment_ids = std::move(segment_ids);
  return c;
}

void criterion_association(Check& check) {
  Rng rng(313);
  for (int trial = 0; trial < 100; ++trial) {
    const int num_segments = 1 + rng.uniform_int(8);
    std::vector<SpeechSegment> segments;
    double t = 0.0;
    for (int s = 0; s < num_segments; ++s) {
      t += rng.uniform(0.3, 1.0);
      const double len = rng.uniform(1.0, 3.0);
      segments.push_back({t, t + len, s});
      t += len;
    }
    const int num_clusters = 1 + rng.uniform_int(num_segments);
    std::vector<SpeechCluster> clusters(static_cast<std::size_t>(num_clusters));
    for (int c = 0; c < num_clusters; ++c) clusters[static_cast<std::size_t>(c)].cluster_id = c;
    for (int s = 0; s < num_segments; ++s) {
      clusters[static_cast<std::size_t>(rng.uniform_int(num_clusters))].segment_ids.push_back(s);
    }
    clusters.erase(std::remove_if(clusters.begin(), clusters.end(),
                                  [](const SpeechCluster& c) { return c.segment_ids.empty(); }),
                   clusters.end());

    const int num_faces = 1 + rng.uniform_int(4);
    const int num_dets = rng.uniform_int(60);
    std::vector<double> times;
    std::vector<std::vector<int>> members(static_cast<std::size_t>(num_faces));
    for (int i = 0; i < num_dets; ++i) {
      times.push_back(rng.uniform(0.0, t + 1.0));
      members[static_cast<std::size_t>(rng.uniform_int(num_faces))].push_back(i);
    }
    const auto dets = dets_at(times);
    const auto faces = manual_clusters(members, num_dets);
    const double min_coverage = trial % 4 == 0 ? 0.0 : rng.uniform(0.0, 1.0);

    const auto got = associate(clusters, segments, FacePresenceIndex(faces, dets), min_coverage);
    check.expect(got.associations.size() == clusters.size(), "association count mismatch");
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      std::vector<long> scores(static_cast<std::size_t>(num_faces), 0);
      long opportunities = 0;
      for (int seg_id : clusters[c].segment_ids) {
        for (int i = 0; i < num_dets; ++i) {
          const auto& seg = segments[static_cast<std::size_t>(seg_id)];
          if (times[static_cast<std::size_t>(i)] >= seg.start_s &&
              times[static_cast<std::size_t>(i)] < seg.end_s) {
            ++scores[static_cast<std::size_t>(faces.assignment[static_cast<std::size_t>(i)])];
            ++opportunities;
          }
        }
      }
      int best = -1;
      long best_score = 0;
      for (int f = 0; f < num_faces; ++f) {
        if (scores[static_cast<std::size_t>(f)] > best_score) {
          best_score = scores[static_cast<std::size_t>(f)];
          best = f;
        }
      }
      std::optional<int> want;
      if (best >= 0 && static_cast<double>(best_score) >=
                           min_coverage * static_cast<double>(opportunities)) {
        want = best;
      }
      check.expect(got.associations[c].scores == scores, "score vector mismatch");
      check.expect(got.associations[c].opportunities == opportunities, "opportunities mismatch");
      check.expect(got.associations[c].face_cluster_id == want, "argmax mismatch");
      if (opportunities == 0) {
        check.expect(!got.associations[c].face_cluster_id.has_value(),
                     "zero support did not yield off-screen");
      }
    }
    if (!check.ok) return;
  }

  // one face on screen during the first cluster, another during the second
  {
    const auto dets = dets_at({1.2, 1.8, 2.4, 5.0, 5.5});
    const auto faces = manual_clusters({{3, 4}, {0, 1, 2}}, 5);
    const std::vector<SpeechSegment> segments = {{1.0, 3.0, 0}, {4.8, 6.0, 1}};
    const auto got = associate({speech_cluster(0, {0}), speech_cluster(1, {1})}, segments,
                               FacePresenceIndex(faces, dets));
    check.expect(got.associations[0].face_cluster_id == std::optional<int>(1) &&
                     got.associations[0].scores == std::vector<long>({0, 3}),
                 "single-face fixture missed");
    check.expect(got.associations[1].face_cluster_id == std::optional<int>(0),
                 "single-face fixture second cluster missed");
  }
  // two faces on screen, the more frequent one wins
  {
    const auto dets = dets_at({0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5});
    const auto faces = manual_clusters({{0, 2, 3, 5, 6}, {1, 4}}, 7);
    const std::vector<SpeechSegment> segments = {{0.0, 4.0, 0}};
    const auto got =
        associate({speech_cluster(0, {0})}, segments, FacePresenceIndex(faces, dets));
    check.expect(got.associations[0].face_cluster_id == std::optional<int>(0) &&
                     got.associations[0].scores == std::vector<long>({5, 2}),
                 "two-face fixture missed");
  }
  // no detections inside the extent at all
  {
    const auto dets = dets_at({10.0, 11.0});
    const auto faces = manual_clusters({{0, 1}}, 2);
    const std::vector<SpeechSegment> segments = {{0.0, 2.0, 0}};
    const auto got =
        associate({speech_cluster(0, {0})}, segments, FacePresenceIndex(faces, dets));
    check.expect(!got.associations[0].face_cluster_id.has_value(),
                 "zero-support fixture not off-screen");
  }
  check.detail = "100 random scenes + fixtures";
}

// ─── 6. end to end ───

VladCodebook universal_codebook(int jobs = 1) {
  ScenarioConfig tc;
  tc.seed = 777001;
  tc.num_speakers = 12;
  tc.num_turns = 80;
  const Scenario train = generate_scenario(tc);
  KMeansOptions ko;
  ko.jobs = jobs;
  return train_codebook(train.features, 8, 7, ko);
}

void criterion_end_to_end(Check& check) {
  const VladCodebook cb = universal_codebook();
  PipelineConfig cfg;

  double acc_sum = 0.0;
  double control_sum = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    ScenarioConfig sc;
    sc.seed = static_cast<std::uint64_t>(seed);
    const Scenario scen = generate_scenario(sc);
    const PipelineResult result = run_pipeline(scen.features, scen.detections, cb, cfg);
    const std::vector<int> identity =
        face_cluster_identities(result.face_clusters, scen.truth.detection_identities);
    acc_sum += score_against_truth(result.timeline, scen.truth, identity).accuracy;

    // chance control: same segmentation, faces drawn uniformly
    SpeakerTimeline random_tl = result.timeline;
    std::vector<int> direct_map(static_cast<std::size_t>(sc.num_speakers));
    for (int i = 0; i < sc.num_speakers; ++i) direct_map[static_cast<std::size_t>(i)] = i;
    Rng control_rng(50000 + static_cast<std::uint64_t>(seed));
    for (TimelineEntry& e : random_tl.entries) {
      e.face_cluster_id = control_rng.uniform_int(sc.num_speakers);
    }
    control_sum += score_against_truth(random_tl, scen.truth, direct_map).accuracy;
  }
  const double mean_acc = acc_sum / 20.0;
  const double mean_control = control_sum / 20.0;
  {
    std::ostringstream os;
    os << "mean accuracy " << mean_acc << ", chance control " << mean_control;
    check.detail = os.str();
  }
  check.expect(mean_acc >= 0.95, "mean accuracy below 0.95 (" + std::to_string(mean_acc) + ")");
  check.expect(mean_control >= 0.15 && mean_control <= 0.25,
               "chance control outside 20% +/- 5% (" + std::to_string(mean_control) + ")");
}

// ─── 7. pair roc ───

void criterion_roc(Check& check) {
  const VladCodebook cb = universal_codebook();
  const double separations[] = {4.0, 2.0, 1.0, 0.5, 0.25};
  std::vector<double> aucs;
  for (double sep : separations) {
    std::vector<PairLabel> pairs;
    for (int seed = 1; seed <= 5; ++seed) {
      ScenarioConfig sc;
      sc.seed = static_cast<std::uint64_t>(seed);
      sc.num_turns = 40;
      sc.voice_feature_separation = sep;
      const Scenario scen = generate_scenario(sc);
      auto p = make_speaker_pairs(scen, cb, 100000, 42);
      pairs.insert(pairs.end(), p.begin(), p.end());
    }
    aucs.push_back(roc_cosine(pairs).auc);
  }
  {
    std::ostringstream os;
    os << "auc by separation:";
    for (double a : aucs) os << ' ' << a;
    check.detail = os.str();
  }
  check.expect(aucs.front() >= 0.90, "easy-regime auc below 0.90");
  for (std::size_t i = 0; i + 1 < aucs.size(); ++i) {
    check.expect(aucs[i + 1] <= aucs[i] + 1e-9, "auc increased as separation shrank");
  }
  check.expect(aucs.back() < aucs.front(), "auc did not degrade overall");
}

// ─── 8. rater agreement ───

void criterion_kappa(Check& check) {
  // 2 items, 3 raters, 2 categories; hand computation gives exactly 1/4
  const double worked = fleiss_kappa(std::vector<std::vector<long>>{{2, 1}, {0, 3}});
  check.expect(std::abs(worked - 0.25) <= 1e-12,
               "worked example gave " + std::to_string(worked));

  check.expect(fleiss_kappa(std::vector<std::vector<long>>{{3, 0}, {3, 0}}) == 1.0,
               "single-category unanimity is not 1");
  check.expect(fleiss_kappa(std::vector<std::vector<long>>{{3, 0}, {0, 3}}) == 1.0,
               "split unanimity is not 1");

  // every rater disagrees on every item: Po=0, Pe=1/3, kappa=-1/2
  const double spread = fleiss_kappa(std::vector<std::vector<long>>{{1, 1, 1}, {1, 1, 1}});
  check.expect(std::abs(spread - (-0.5)) <= 1e-12, "full-disagreement table mismatch");
  check.detail = "fixtures exact";
}

// ─── 9. determinism ───

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void criterion_determinism(Check& check) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "vf_accept_det";
  fs::remove_all(base);

  const int job_counts[] = {1, 2, 4, 7, 4};  // last run repeats jobs=4
  const char* files[] = {"codebook.txt", "timeline.txt",   "segments.txt",
                         "dendrogram.txt", "faces.txt",    "association.txt"};
  std::vector<std::string> baseline;

  for (std::size_t r = 0; r < 5; ++r) {
    const fs::path dir = base / ("run" + std::to_string(r));
    fs::create_directories(dir);

    const VladCodebook cb = universal_codebook(job_counts[r]);
    save_codebook(cb, (dir / "codebook.txt").string());

    ScenarioConfig sc;
    sc.seed = 5;
    const Scenario scen = generate_scenario(sc);
    PipelineConfig cfg;
    cfg.jobs = job_counts[r];
    const PipelineResult result = run_pipeline(scen.features, scen.detections, cb, cfg);
    write_timeline(result.timeline, (dir / "timeline.txt").string());
    write_diagnostics(result, dir.string());

    std::vector<std::string> contents;
    for (const char* f : files) contents.push_back(slurp((dir / f).string()));
    for (const std::string& c : contents) {
      check.expect(!c.empty(), "artifact came out empty");
    }
    if (r == 0) {
      baseline = contents;
    } else {
      for (std::size_t f = 0; f < contents.size(); ++f) {
        check.expect(contents[f] == baseline[f],
                     std::string(files[f]) + " differs between runs");
      }
    }
  }
  fs::remove_all(base);
  check.detail = "6 artifacts x jobs {1,2,4,7} + rerun";
}

}  // namespace

int main() {
  struct Criterion {
    const char* label;
    void (*fn)(Check&);
    double budget_s;  // 0 = no explicit budget
  };
  const Criterion criteria[] = {
      {"segment smoothing matches brute-force reference", criterion_smoothing, 10.0},
      {"vlad encoder invariants and assignments", criterion_vlad, 30.0},
      {"complete linkage matches exhaustive oracle", criterion_linkage, 60.0},
      {"face clustering recovers identities exactly", criterion_faces, 0.0},
      {"association argmax matches direct counting", criterion_association, 0.0},
      {"end-to-end accuracy on easy scenes", criterion_end_to_end, 300.0},
      {"pair roc strength and ordering", criterion_roc, 0.0},
      {"rater agreement fixtures", criterion_kappa, 0.0},
      {"byte-identical outputs across job counts", criterion_determinism, 0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].fn(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (criteria[i].budget_s > 0.0 && elapsed > criteria[i].budget_s) {
      check.ok = false;
      check.detail = "over time budget";
    }
    std::printf("[%s] %zu. %s (%.2fs)%s%s\n", check.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].label, elapsed, check.detail.empty() ? "" : " -- ",
                check.detail.c_str());
    std::fflush(stdout);
    if (!check.ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
