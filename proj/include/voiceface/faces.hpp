#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/parallel.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vec_math.hpp"

namespace voiceface {

constexpr double kFaceSimilarityThreshold = 0.85;

struct FaceCluster {
  int cluster_id = -1;
  std::vector<int> detection_indices;  // into the input detections, ascending
};

struct FaceClusterResult {
  std::vector<FaceCluster> clusters;
  std::vector<int> assignment;  // detection index -> cluster_id
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller index as root
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

// Groups detections into identities: edges between detections whose embedding
// cosine similarity is at least `threshold`, clusters are the connected
// components. Detections sharing a non-negative track_id are connected up
// front regardless of similarity. Cluster ids are assigned by descending
// detection count, then by earliest member index.
inline FaceClusterResult cluster_faces(const std::vector<FaceDetection>& detections,
                                       double threshold = kFaceSimilarityThreshold,
                                       bool use_tracks = true, int jobs = 1) {
  const int n = static_cast<int>(detections.size());
  FaceClusterResult result;
  result.assignment.assign(n, -1);
  if (n == 0) {
    return result;
  }

  std::vector<std::vector<double>> unit(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(detections[i].embedding.size()) != kFaceEmbeddingDim) {
      throw DimensionError("face embedding must have " + std::to_string(kFaceEmbeddingDim) +
                           " dimensions");
    }
    unit[i].assign(detections[i].embedding.begin(), detections[i].embedding.end());
    l2_normalize(unit[i]);
  }

  detail::UnionFind uf(n);
  if (use_tracks) {
    std::unordered_map<std::int64_t, int> first_in_track;
    for (int i = 0; i < n; ++i) {
      if (detections[i].track_id < 0) continue;
      auto [it, inserted] = first_in_track.try_emplace(detections[i].track_id, i);
      if (!inserted) {
        uf.unite(it->second, i);
      }
    }
  }

  // Edges are found in parallel per chunk of rows, then applied in chunk
  // order; unions commute, so the result matches a sequential scan.
  const long chunks = num_chunks(n);
  std::vector<std::vector<std::pair<int, int>>> edges(static_cast<std::size_t>(chunks));
  for_each_chunk(n, jobs, [&](long chunk, long begin, long end) {
    auto& local = edges[static_cast<std::size_t>(chunk)];
    for (long i = begin; i < end; ++i) {
      for (int j = static_cast<int>(i) + 1; j < n; ++j) {
        if (dot(unit[i], unit[j]) >= threshold) {
          local.emplace_back(static_cast<int>(i), j);
        }
      }
    }
  });
  for (const auto& local : edges) {
    for (const auto& [a, b] : local) {
      uf.unite(a, b);
    }
  }

  std::unordered_map<int, std::vector<int>> members;
  for (int i = 0; i < n; ++i) {
    members[uf.find(i)].push_back(i);
  }
  for (auto& [root, idx] : members) {
    FaceCluster c;
    c.detection_indices = idx;  // ascending by construction
    result.clusters.push_back(std::move(c));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const FaceCluster& a, const FaceCluster& b) {
              if (a.detection_indices.size() != b.detection_indices.size()) {
                return a.detection_indices.size() > b.detection_indices.size();
              }
              return a.detection_indices.front() < b.detection_indices.front();
            });
  for (int c = 0; c < static_cast<int>(result.clusters.size()); ++c) {
    result.clusters[c].cluster_id = c;
    for (int i : result.clusters[c].detection_indices) {
      result.assignment[i] = c;
    }
  }
  return result;
}

// Answers "how many detections of cluster c fall inside [start, end)"
// with two binary searches over per-cluster sorted timestamps.
class FacePresenceIndex {
 public:
  FacePresenceIndex(const FaceClusterResult& clusters,
                    const std::vector<FaceDetection>& detections) {
    times_.resize(clusters.clusters.size());
    for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
      auto& t = times_[c];
      t.reserve(clusters.clusters[c].detection_indices.size());
      for (int i : clusters.clusters[c].detection_indices) {
        t.push_back(detections[static_cast<std::size_t>(i)].timestamp_s);
      }
      std::sort(t.begin(), t.end());
      all_.insert(all_.end(), t.begin(), t.end());
    }
    std::sort(all_.begin(), all_.end());
  }

  int num_clusters() const { return static_cast<int>(times_.size()); }

  long count_in(int cluster_id, double start_s, double end_s) const {
    if (cluster_id < 0 || cluster_id >= num_clusters()) {
      throw ConfigError("unknown face cluster id " + std::to_string(cluster_id));
    }
    return count(times_[static_cast<std::size_t>(cluster_id)], start_s, end_s);
  }

  long total_in(double start_s, double end_s) const { return count(all_, start_s, end_s); }

 private:
  static long count(const std::vector<double>& t, double start_s, double end_s) {
    if (end_s < start_s) {
      throw ConfigError("presence interval has end before start");
    }
    auto lo = std::lower_bound(t.begin(), t.end(), start_s);
    auto hi = std::lower_bound(t.begin(), t.end(), end_s);
    return hi - lo;
  }

  std::vector<std::vector<double>> times_;
  std::vector<double> all_;
};

}  // namespace voiceface
