#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/parallel.hpp"
#include "voiceface/rng.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vec_math.hpp"

namespace voiceface {

// ─── Codebook ────────────────────────────────────────────────────────────

// K-means cluster centers over frame features. VLAD embeddings aggregate
// residuals against these centers, so a codebook is only valid for features
// produced by the front-end it was trained on (tracked by fingerprint).
struct VladCodebook {
  std::vector<double> centers;  // k * dim, row-major
  int k = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::string frontend_fingerprint;

  std::span<const double> center(int j) const {
    return std::span<const double>(centers.data() + static_cast<std::size_t>(j) * dim, dim);
  }
};

// Nearest center by Euclidean distance; ties resolve to the lowest index.
inline int nearest_center(std::span<const double> x, const VladCodebook& cb) {
  int best = 0;
  double best_d = squared_distance(x, cb.center(0));
  for (int j = 1; j < cb.k; ++j) {
    const double d = squared_distance(x, cb.center(j));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

// ─── Training ────────────────────────────────────────────────────────────

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // max center movement considered converged
  int jobs = 1;
};

namespace detail {

struct FrameHash {
  const FeatureSequence* frames;
  std::size_t operator()(int i) const {
    const auto f = frames->frame(i);
    std::size_t h = 1469598103934665603ull;
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(f.data());
    for (std::size_t b = 0; b < f.size() * sizeof(double); ++b) {
      h ^= bytes[b];
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct FrameEq {
  const FeatureSequence* frames;
  bool operator()(int a, int b) const {
    const auto fa = frames->frame(a);
    const auto fb = frames->frame(b);
    return std::equal(fa.begin(), fa.end(), fb.begin(), fb.end());
  }
};

inline bool has_k_distinct_frames(const FeatureSequence& frames, int k) {
  std::unordered_set<int, FrameHash, FrameEq> seen(16, FrameHash{&frames}, FrameEq{&frames});
  for (int i = 0; i < frames.num_frames(); ++i) {
    seen.insert(i);
    if (static_cast<int>(seen.size()) >= k) {
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Lloyd's k-means with k-means++ seeding. Deterministic for a given
// (data order, seed): random draws are derived from the seed alone, and the
// assignment reduction uses fixed chunking, so the result is also identical
// for any jobs count. Empty clusters are re-seeded from the point farthest
// from its assigned center.
inline VladCodebook train_codebook(const FeatureSequence& frames, int k,
                                   std::uint64_t seed, const KMeansOptions& opts = {}) {
  const long n = frames.num_frames();
  const int dim = frames.dim;
  if (k < 1) {
    throw ConfigError("codebook size k must be >= 1");
  }
  if (n < k || !detail::has_k_distinct_frames(frames, k)) {
    throw ConfigError("training needs at least " + std::to_string(k) +
                      " distinct frames, got " + std::to_string(n) + " total");
  }

  VladCodebook cb;
  cb.k = k;
  cb.dim = dim;
  cb.seed = seed;
  cb.frontend_fingerprint = frames.fingerprint;
  cb.centers.assign(static_cast<std::size_t>(k) * dim, 0.0);

  Rng rng(seed);
  auto set_center = [&](int j, std::span<const double> x) {
    std::copy(x.begin(), x.end(), cb.centers.begin() + static_cast<std::size_t>(j) * dim);
  };

  // k-means++ seeding: first center uniform, then proportional to the
  // squared distance from the nearest chosen center.
  set_center(0, frames.frame(rng.uniform_int(static_cast<int>(n))));
  std::vector<double> d2(n);
  for (long i = 0; i < n; ++i) {
    d2[i] = squared_distance(frames.frame(static_cast<int>(i)), cb.center(0));
  }
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (long i = 0; i < n; ++i) {
      total += d2[i];
    }
    long chosen = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (long i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) {
          continue;
        }
        cum += d2[i];
        chosen = i;
        if (cum > target) {
          break;
        }
      }
    }
    if (chosen < 0) {
      // All mass on already-chosen centers; fall back to first unused point.
      chosen = rng.uniform_int(static_cast<int>(n));
    }
    set_center(j, frames.frame(static_cast<int>(chosen)));
    for (long i = 0; i < n; ++i) {
      const double d = squared_distance(frames.frame(static_cast<int>(i)), cb.center(j));
      d2[i] = std::min(d2[i], d);
    }
  }

  // Lloyd iterations with deterministic chunked reduction.
  const long chunks = num_chunks(n);
  std::vector<int> assignment(n, 0);
  std::vector<double> dist(n, 0.0);
  std::vector<std::vector<double>> chunk_sums(chunks);
  std::vector<std::vector<long>> chunk_counts(chunks);

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    for_each_chunk(n, opts.jobs, [&](long c, long begin, long end) {
      auto& sums = chunk_sums[c];
      auto& counts = chunk_counts[c];
      sums.assign(static_cast<std::size_t>(k) * dim, 0.0);
      counts.assign(k, 0);
      for (long i = begin; i < end; ++i) {
        const auto x = frames.frame(static_cast<int>(i));
        const int j = nearest_center(x, cb);
        assignment[i] = j;
        dist[i] = squared_distance(x, cb.center(j));
        double* s = sums.data() + static_cast<std::size_t>(j) * dim;
        for (int dd = 0; dd < dim; ++dd) {
          s[dd] += x[dd];
        }
        ++counts[j];
      }
    });

    std::vector<double> sums(static_cast<std::size_t>(k) * dim, 0.0);
    std::vector<long> counts(k, 0);
    for (long c = 0; c < chunks; ++c) {
      for (std::size_t t = 0; t < sums.size(); ++t) {
        sums[t] += chunk_sums[c][t];
      }
      for (int j = 0; j < k; ++j) {
        counts[j] += chunk_counts[c][j];
      }
    }

    std::vector<double> new_centers(cb.centers);
    std::vector<int> empty;
    for (int j = 0; j < k; ++j) {
      if (counts[j] == 0) {
        empty.push_back(j);
        continue;
      }
      for (int dd = 0; dd < dim; ++dd) {
        new_centers[static_cast<std::size_t>(j) * dim + dd] =
            sums[static_cast<std::size_t>(j) * dim + dd] / static_cast<double>(counts[j]);
      }
    }

    bool reseeded = false;
    if (!empty.empty()) {
      std::vector<char> used(n, 0);
      for (int j : empty) {
        long far = -1;
        double far_d = -1.0;
        for (long i = 0; i < n; ++i) {
          if (!used[i] && dist[i] > far_d) {
            far_d = dist[i];
            far = i;
          }
        }
        if (far >= 0) {
          used[far] = 1;
          const auto x = frames.frame(static_cast<int>(far));
          std::copy(x.begin(), x.end(),
                    new_centers.begin() + static_cast<std::size_t>(j) * dim);
          reseeded = true;
        }
      }
    }

    double movement = 0.0;
    for (int j = 0; j < k; ++j) {
      double m2 = 0.0;
      for (int dd = 0; dd < dim; ++dd) {
        const double d = new_centers[static_cast<std::size_t>(j) * dim + dd] -
                         cb.centers[static_cast<std::size_t>(j) * dim + dd];
        m2 += d * d;
      }
      movement = std::max(movement, std::sqrt(m2));
    }
    cb.centers = std::move(new_centers);
    if (!reseeded && movement < opts.tolerance) {
      break;
    }
  }
  return cb;
}

// ─── Encoding ────────────────────────────────────────────────────────────

struct VladOptions {
  bool power_normalization = false;  // signed square root before the final L2
};

// Aggregates per-frame residuals from the nearest codebook center into K
// blocks of D values, intra-normalizes each block, then L2-normalizes the
// concatenation. A segment whose frames all sit exactly on centers yields
// the all-zero embedding.
inline VladEmbedding encode(const FeatureSequence& segment, const VladCodebook& cb,
                            const VladOptions& opts = {}) {
  if (segment.dim != cb.dim) {
    throw DimensionError("feature dim " + std::to_string(segment.dim) +
                         " does not match codebook dim " + std::to_string(cb.dim));
  }
  if (segment.fingerprint != cb.frontend_fingerprint) {
    throw DimensionError("front-end fingerprint mismatch: features '" +
                         segment.fingerprint + "' vs codebook '" +
                         cb.frontend_fingerprint + "'");
  }

  VladEmbedding emb;
  emb.values.assign(static_cast<std::size_t>(cb.k) * cb.dim, 0.0);
  for (int i = 0; i < segment.num_frames(); ++i) {
    const auto x = segment.frame(i);
    const int j = nearest_center(x, cb);
    const auto c = cb.center(j);
    double* block = emb.values.data() + static_cast<std::size_t>(j) * cb.dim;
    for (int dd = 0; dd < cb.dim; ++dd) {
      block[dd] += x[dd] - c[dd];
    }
  }

  for (int j = 0; j < cb.k; ++j) {
    l2_normalize(std::span<double>(emb.values.data() + static_cast<std::size_t>(j) * cb.dim,
                                   cb.dim));
  }
  if (opts.power_normalization) {
    for (double& v : emb.values) {
      v = v >= 0.0 ? std::sqrt(v) : -std::sqrt(-v);
    }
  }
  l2_normalize(std::span<double>(emb.values));
  return emb;
}

inline double cosine_similarity(const VladEmbedding& a, const VladEmbedding& b) {
  return cosine(std::span<const double>(a.values), std::span<const double>(b.values));
}

// ─── Codebook files ──────────────────────────────────────────────────────

inline constexpr const char* kCodebookHeader = "# voiceface codebook v1";

inline void save_codebook(const VladCodebook& cb, const std::string& path) {
  auto out = detail::open_output(path);
  out << kCodebookHeader << '\n';
  out << "k " << cb.k << '\n';
  out << "dim " << cb.dim << '\n';
  out << "seed " << cb.seed << '\n';
  out << "fingerprint " << (cb.frontend_fingerprint.empty() ? "-" : cb.frontend_fingerprint)
      << '\n';
  for (int j = 0; j < cb.k; ++j) {
    const auto c = cb.center(j);
    for (int dd = 0; dd < cb.dim; ++dd) {
      if (dd) out << ' ';
      out << detail::format_double(c[dd]);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline VladCodebook load_codebook(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kCodebookHeader) {
    throw ParseError("missing codebook header in " + path, 1);
  }
  VladCodebook cb;
  long line_no = 1;
  for (int i = 0; i < 4; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError("truncated codebook header", line_no);
    }
    ++line_no;
    const auto tok = detail::split_ws(line);
    if (tok.size() != 2) {
      throw ParseError("codebook header line needs `key value`", line_no);
    }
    if (tok[0] == "k") {
      cb.k = static_cast<int>(detail::parse_long(tok[1], "k", line_no));
    } else if (tok[0] == "dim") {
      cb.dim = static_cast<int>(detail::parse_long(tok[1], "dim", line_no));
    } else if (tok[0] == "seed") {
      cb.seed = static_cast<std::uint64_t>(detail::parse_long(tok[1], "seed", line_no));
    } else if (tok[0] == "fingerprint") {
      cb.frontend_fingerprint = tok[1] == "-" ? "" : tok[1];
    } else {
      throw ParseError("unknown codebook header key: " + tok[0], line_no);
    }
  }
  if (cb.k < 1 || cb.dim < 1) {
    throw ParseError("codebook k and dim must be positive");
  }
  cb.centers.reserve(static_cast<std::size_t>(cb.k) * cb.dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    if (static_cast<int>(tok.size()) != cb.dim) {
      throw ParseError("codebook center needs " + std::to_string(cb.dim) + " values",
                       line_no);
    }
    for (const auto& t : tok) {
      cb.centers.push_back(detail::parse_double(t, "center value", line_no));
    }
  }
  if (static_cast<int>(cb.centers.size()) != cb.k * cb.dim) {
    throw ParseError("codebook holds " + std::to_string(cb.centers.size() / cb.dim) +
                     " centers, header says " + std::to_string(cb.k));
  }
  return cb;
}

}  // namespace voiceface
