#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/parallel.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vlad.hpp"

namespace voiceface {

// A set of speech segments assumed to share one speaker. The merging stops
// early on purpose: more clusters than speakers is fine, a mixed cluster is
// not, and the face co-occurrence stage does the final merging.
struct SpeechCluster {
  int cluster_id = -1;
  std::vector<int> segment_ids;  // sorted ascending
  VladEmbedding embedding;       // of the merged segments; filled on demand
};

struct MergeStep {
  std::vector<int> left_ids;
  std::vector<int> right_ids;
  double similarity = 0.0;
};

struct ClusterResult {
  std::vector<SpeechCluster> clusters;
  std::vector<MergeStep> merges;
};

namespace detail {

// Lexicographic comparison of the sorted unions of two candidate pairs,
// after the (min id, max id) keys tie.
inline bool union_less(const std::vector<int>& a1, const std::vector<int>& a2,
                       const std::vector<int>& b1, const std::vector<int>& b2) {
  auto next = [](const std::vector<int>& x, const std::vector<int>& y, std::size_t& ix,
                 std::size_t& iy) {
    if (ix < x.size() && (iy >= y.size() || x[ix] <= y[iy])) {
      return x[ix++];
    }
    return y[iy++];
  };
  std::size_t i1 = 0, j1 = 0, i2 = 0, j2 = 0;
  while (true) {
    const bool more_a = i1 < a1.size() || j1 < a2.size();
    const bool more_b = i2 < b1.size() || j2 < b2.size();
    if (!more_a || !more_b) {
      return more_b;  // shorter union compares smaller
    }
    const int va = next(a1, a2, i1, j1);
    const int vb = next(b1, b2, i2, j2);
    if (va != vb) {
      return va < vb;
    }
  }
}

}  // namespace detail

// Hierarchical agglomerative clustering with complete linkage (the linkage
// similarity of two clusters is the minimum pairwise cosine similarity of
// their members). Merging proceeds greedily from singletons and stops when
// the best pair falls below stop_threshold. Ties between candidate pairs
// resolve by smallest (min segment id, max segment id), then by the
// lexicographically smallest sorted union.
inline ClusterResult cluster_segments(const std::vector<VladEmbedding>& embeddings,
                                      double stop_threshold, int jobs = 1) {
  const int n = static_cast<int>(embeddings.size());
  if (n == 0) {
    throw ConfigError("cannot cluster zero segments");
  }
  const int dim = embeddings.front().dim();
  for (const auto& e : embeddings) {
    if (e.dim() != dim) {
      throw DimensionError("segment embeddings must share one dimension");
    }
  }

  // Pairwise segment similarities; rows are chunk-parallel, write-disjoint.
  std::vector<double> sim(static_cast<std::size_t>(n) * n, 0.0);
  for_each_chunk(n, jobs, [&](long, long begin, long end) {
    for (long i = begin; i < end; ++i) {
      for (int j = 0; j < n; ++j) {
        sim[i * n + j] = cosine_similarity(embeddings[i], embeddings[j]);
      }
    }
  });

  struct Node {
    std::vector<int> ids;  // sorted segment ids
    bool alive = true;
  };
  std::vector<Node> nodes(n);
  for (int i = 0; i < n; ++i) {
    const int id = embeddings[i].segment_id >= 0 ? embeddings[i].segment_id : i;
    nodes[i].ids = {id};
  }

  // Cluster-level complete linkage, maintained with the min rule.
  std::vector<double> link(sim);

  ClusterResult result;
  for (;;) {
    int best_a = -1, best_b = -1;
    double best_sim = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
      if (!nodes[a].alive) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!nodes[b].alive) continue;
        const double s = link[static_cast<std::size_t>(a) * n + b];
        bool better = s > best_sim;
        if (!better && s == best_sim) {
          const int umin = std::min(nodes[a].ids.front(), nodes[b].ids.front());
          const int umax = std::max(nodes[a].ids.back(), nodes[b].ids.back());
          const int cmin = std::min(nodes[best_a].ids.front(), nodes[best_b].ids.front());
          const int cmax = std::max(nodes[best_a].ids.back(), nodes[best_b].ids.back());
          if (umin != cmin) {
            better = umin < cmin;
          } else if (umax != cmax) {
            better = umax < cmax;
          } else {
            better = detail::union_less(nodes[a].ids, nodes[b].ids, nodes[best_a].ids,
                                        nodes[best_b].ids);
          }
        }
        if (better) {
          best_sim = s;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0 || best_sim < stop_threshold) {
      break;
    }

    MergeStep step;
    step.left_ids = nodes[best_a].ids;
    step.right_ids = nodes[best_b].ids;
    step.similarity = best_sim;
    result.merges.push_back(std::move(step));

    std::vector<int> merged;
    std::merge(nodes[best_a].ids.begin(), nodes[best_a].ids.end(), nodes[best_b].ids.begin(),
               nodes[best_b].ids.end(), std::back_inserter(merged));
    nodes[best_a].ids = std::move(merged);
    nodes[best_b].alive = false;
    for (int c = 0; c < n; ++c) {
      if (c == best_a || !nodes[c].alive) continue;
      const double s = std::min(link[static_cast<std::size_t>(best_a) * n + c],
                                link[static_cast<std::size_t>(best_b) * n + c]);
      link[static_cast<std::size_t>(best_a) * n + c] = s;
      link[static_cast<std::size_t>(c) * n + best_a] = s;
    }
  }

  for (const Node& node : nodes) {
    if (!node.alive) continue;
    SpeechCluster c;
    c.segment_ids = node.ids;
    result.clusters.push_back(std::move(c));
  }
  std::sort(result.clusters.begin(), result.clusters.end(),
            [](const SpeechCluster& a, const SpeechCluster& b) {
              return a.segment_ids.front() < b.segment_ids.front();
            });
  for (int i = 0; i < static_cast<int>(result.clusters.size()); ++i) {
    result.clusters[i].cluster_id = i;
  }
  return result;
}

// VLAD encoding of all member segments' frames concatenated in start-time
// order, so a cluster is a point in the same embedding space as a segment.
inline VladEmbedding recompute_cluster_embedding(
    const SpeechCluster& cluster, const VladCodebook& codebook,
    const std::vector<FeatureSequence>& features_by_segment,
    const std::vector<SpeechSegment>& segments, const VladOptions& opts = {}) {
  if (cluster.segment_ids.empty()) {
    throw ConfigError("cluster has no segments");
  }
  std::vector<int> ordered = cluster.segment_ids;
  for (int id : ordered) {
    if (id < 0 || id >= static_cast<int>(features_by_segment.size()) ||
        id >= static_cast<int>(segments.size())) {
      throw ConfigError("missing features for segment " + std::to_string(id));
    }
  }
  std::sort(ordered.begin(), ordered.end(), [&](int a, int b) {
    if (segments[a].start_s != segments[b].start_s) {
      return segments[a].start_s < segments[b].start_s;
    }
    return a < b;
  });
  std::vector<const FeatureSequence*> parts;
  parts.reserve(ordered.size());
  for (int id : ordered) {
    parts.push_back(&features_by_segment[id]);
  }
  VladEmbedding emb = encode(concat_features(parts), codebook, opts);
  emb.segment_id = -1;
  return emb;
}

// Diagnostic dump: one line per merge in order, then the final clusters.
inline void write_dendrogram(const ClusterResult& result, const std::string& path) {
  auto out = detail::open_output(path);
  auto put_ids = [&out](const std::vector<int>& ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out << (i ? "," : "") << ids[i];
    }
  };
  out << "# voiceface dendrogram v1\n";
  for (const MergeStep& m : result.merges) {
    out << "merge sim=" << detail::format_double(m.similarity) << " left=";
    put_ids(m.left_ids);
    out << " right=";
    put_ids(m.right_ids);
    out << '\n';
  }
  for (const SpeechCluster& c : result.clusters) {
    out << "cluster " << c.cluster_id << " segments=";
    put_ids(c.segment_ids);
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace voiceface
