#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>

#include "voiceface/error.hpp"

namespace voiceface {

// Small dense-vector helpers. Everything accumulates in double regardless of
// the element type, and the two-argument forms accept mixed element types
// (e.g. a float face embedding against a double centroid).

template <typename A, typename B>
inline double dot(const A& a, const B& b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: size mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(a.size()); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

template <typename A>
inline double squared_norm(const A& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(a.size()); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(a[i]);
  }
  return sum;
}

template <typename A>
inline double norm(const A& a) {
  return std::sqrt(squared_norm(a));
}

template <typename A, typename B>
inline double squared_distance(const A& a, const B& b) {
  if (a.size() != b.size()) {
    throw DimensionError("squared_distance: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(a.size()); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

// Cosine similarity in [-1, 1]. Defined as 0 when either vector is all-zero.
template <typename A, typename B>
inline double cosine(const A& a, const B& b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine: size mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(a.size()); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    ab += x * y;
    aa += x * x;
    bb += y * y;
  }
  if (aa == 0.0 || bb == 0.0) {
    return 0.0;
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

// In-place L2 normalization. All-zero input stays all-zero. Takes a
// forwarding reference so span temporaries over owned storage work too.
template <typename A>
inline void l2_normalize(A&& v) {
  const double n = norm(v);
  if (n == 0.0) {
    return;
  }
  using Elem = std::decay_t<decltype(v[0])>;
  for (std::size_t i = 0; i < static_cast<std::size_t>(v.size()); ++i) {
    v[i] = static_cast<Elem>(static_cast<double>(v[i]) / n);
  }
}

}  // namespace voiceface
