#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"
#include "voiceface/vec_math.hpp"

namespace voiceface {

// ─── ROC / AUC ───

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // from (0,0) to (1,1), rates non-decreasing
  double auc = 0.0;
};

// Threshold sweep over the distinct scores, highest first; equal scores move
// in one step so ties never order arbitrarily. AUC by the trapezoidal rule,
// which on this construction equals the Mann-Whitney statistic with ties
// counted half.
inline RocCurve roc_from_scores(const std::vector<double>& scores,
                                const std::vector<bool>& is_same) {
  if (scores.size() != is_same.size()) {
    throw ConfigError("scores and labels must align");
  }
  long positives = 0, negatives = 0;
  for (bool s : is_same) {
    (s ? positives : negatives)++;
  }
  if (positives == 0 || negatives == 0) {
    throw ConfigError("ROC needs both same and different pairs");
  }
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  RocCurve curve;
  curve.points.push_back(RocPoint{0.0, 0.0, std::numeric_limits<double>::infinity()});
  long tp = 0, fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double score = scores[order[i]];
    long group_tp = 0, group_fp = 0;
    while (i < order.size() && scores[order[i]] == score) {
      (is_same[order[i]] ? group_tp : group_fp)++;
      ++i;
    }
    const double prev_tpr = static_cast<double>(tp) / positives;
    const double prev_fpr = static_cast<double>(fp) / negatives;
    tp += group_tp;
    fp += group_fp;
    const double tpr = static_cast<double>(tp) / positives;
    const double fpr = static_cast<double>(fp) / negatives;
    auc += (fpr - prev_fpr) * 0.5 * (tpr + prev_tpr);
    curve.points.push_back(RocPoint{fpr, tpr, score});
  }
  curve.auc = auc;
  return curve;
}

template <typename SimFn>
RocCurve roc(const std::vector<PairLabel>& pairs, SimFn&& similarity) {
  std::vector<double> scores;
  std::vector<bool> labels;
  scores.reserve(pairs.size());
  labels.reserve(pairs.size());
  for (const PairLabel& p : pairs) {
    scores.push_back(similarity(p));
    labels.push_back(p.same_speaker);
  }
  return roc_from_scores(scores, labels);
}

inline RocCurve roc_cosine(const std::vector<PairLabel>& pairs) {
  return roc(pairs, [](const PairLabel& p) { return cosine(p.a.values, p.b.values); });
}

inline void write_roc_csv(const RocCurve& curve, const std::string& path) {
  auto out = detail::open_output(path);
  out << "false_positive_rate,true_positive_rate,threshold\n";
  for (const RocPoint& p : curve.points) {
    out << detail::format_double(p.false_positive_rate) << ','
        << detail::format_double(p.true_positive_rate) << ','
        << detail::format_double(p.threshold) << '\n';
  }
  out << "# auc," << detail::format_double(curve.auc) << '\n';
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

// ─── Fleiss' kappa ───

// Standard construction over an items x categories count table. Every item
// must carry the same number of ratings n >= 2. Perfect observed agreement
// returns the sentinel 1 directly (the usual formula divides 0 by 0 there).
inline double fleiss_kappa(const std::vector<std::vector<long>>& counts) {
  if (counts.empty()) {
    throw ConfigError("fleiss_kappa needs at least one item");
  }
  const std::size_t categories = counts.front().size();
  long n = 0;
  for (long c : counts.front()) n += c;
  if (n < 2) {
    throw ConfigError("fleiss_kappa needs at least two raters per item");
  }

  double p_bar = 0.0;
  std::vector<double> category_share(categories, 0.0);
  bool all_unanimous = true;
  for (const auto& row : counts) {
    if (row.size() != categories) {
      throw ConfigError("rating table rows must share one category set");
    }
    long row_total = 0, sum_sq = 0, row_max = 0;
    for (std::size_t j = 0; j < categories; ++j) {
      if (row[j] < 0) throw ConfigError("negative rating count");
      row_total += row[j];
      sum_sq += row[j] * row[j];
      row_max = std::max(row_max, row[j]);
      category_share[j] += static_cast<double>(row[j]);
    }
    if (row_total != n) {
      throw ConfigError("unequal rater counts across items");
    }
    if (row_max != n) all_unanimous = false;
    p_bar += static_cast<double>(sum_sq - n) / static_cast<double>(n * (n - 1));
  }
  if (all_unanimous) {
    return 1.0;
  }
  p_bar /= static_cast<double>(counts.size());
  double p_expected = 0.0;
  const double total_votes = static_cast<double>(counts.size()) * static_cast<double>(n);
  for (double share : category_share) {
    const double p = share / total_votes;
    p_expected += p * p;
  }
  return (p_bar - p_expected) / (1.0 - p_expected);
}

// Convenience adapter over the four-category rating records.
inline double fleiss_kappa(const std::vector<RatingRecord>& records) {
  std::vector<std::vector<long>> counts;
  counts.reserve(records.size());
  for (const RatingRecord& r : records) {
    std::vector<long> row(4, 0);
    for (Rating v : r.ratings) {
      ++row[static_cast<std::size_t>(v)];
    }
    counts.push_back(std::move(row));
  }
  return fleiss_kappa(counts);
}

// ─── rating aggregation ───

// What one rated clip adds to the accuracy tally. Fractional weights let a
// scheme treat PartiallyCorrect as partially right.
struct RecordContribution {
  double correct = 0.0;
  double incorrect = 0.0;
  bool excluded = false;
};

struct AggregationScheme {
  std::string name;
  double partial_weight = 0.0;
  std::function<RecordContribution(const RatingRecord&)> rule;
};

struct AggregateResult {
  double correct = 0.0;
  double incorrect = 0.0;
  long excluded = 0;
  double accuracy = 0.0;  // correct / (correct + incorrect); 0 when empty
};

inline AggregateResult aggregate_ratings(const std::vector<RatingRecord>& records,
                                         const AggregationScheme& scheme) {
  if (!scheme.rule) {
    throw ConfigError("aggregation scheme has no rule");
  }
  AggregateResult result;
  for (const RatingRecord& r : records) {
    const RecordContribution c = scheme.rule(r);
    if (c.excluded) {
      ++result.excluded;
      continue;
    }
    result.correct += c.correct;
    result.incorrect += c.incorrect;
  }
  const double total = result.correct + result.incorrect;
  result.accuracy = total > 0.0 ? result.correct / total : 0.0;
  return result;
}

namespace detail {

inline std::array<int, 4> rating_histogram(const RatingRecord& r) {
  std::array<int, 4> h{};
  for (Rating v : r.ratings) {
    ++h[static_cast<std::size_t>(v)];
  }
  return h;
}

}  // namespace detail

// Two of three raters decide; split verdicts are excluded.
inline AggregationScheme majority_scheme() {
  AggregationScheme s;
  s.name = "MAJORITY";
  s.rule = [](const RatingRecord& r) {
    const auto h = detail::rating_histogram(r);
    RecordContribution c;
    if (h[static_cast<std::size_t>(Rating::kCorrect)] >= 2) {
      c.correct = 1.0;
    } else if (h[static_cast<std::size_t>(Rating::kIncorrect)] >= 2) {
      c.incorrect = 1.0;
    } else {
      c.excluded = true;
    }
    return c;
  };
  return s;
}

// Only a clean sweep of Correct counts.
inline AggregationScheme unanimous_scheme() {
  AggregationScheme s;
  s.name = "UNANIMOUS";
  s.rule = [](const RatingRecord& r) {
    RecordContribution c;
    if (detail::rating_histogram(r)[static_cast<std::size_t>(Rating::kCorrect)] == 3) {
      c.correct = 1.0;
    } else {
      c.incorrect = 1.0;
    }
    return c;
  };
  return s;
}

// Each rating votes with a weight: Correct 1, PartiallyCorrect
// partial_weight, Incorrect 0; Unsure votes are dropped from the record's
// mean (a record of three Unsures is excluded).
inline AggregationScheme partial_half_scheme(double partial_weight = 0.5) {
  AggregationScheme s;
  s.name = "PARTIAL_HALF";
  s.partial_weight = partial_weight;
  s.rule = [partial_weight](const RatingRecord& r) {
    RecordContribution c;
    double weight = 0.0;
    int counted = 0;
    for (Rating v : r.ratings) {
      switch (v) {
        case Rating::kCorrect: weight += 1.0; ++counted; break;
        case Rating::kPartiallyCorrect: weight += partial_weight; ++counted; break;
        case Rating::kIncorrect: ++counted; break;
        case Rating::kUnsure: break;
      }
    }
    if (counted == 0) {
      c.excluded = true;
      return c;
    }
    c.correct = weight / counted;
    c.incorrect = 1.0 - c.correct;
    return c;
  };
  return s;
}

// Any Unsure disqualifies the record; the rest resolve by majority.
inline AggregationScheme strict_drop_unsure_scheme() {
  AggregationScheme s;
  s.name = "STRICT_DROP_UNSURE";
  s.rule = [](const RatingRecord& r) {
    const auto h = detail::rating_histogram(r);
    RecordContribution c;
    if (h[static_cast<std::size_t>(Rating::kUnsure)] > 0) {
      c.excluded = true;
    } else if (h[static_cast<std::size_t>(Rating::kCorrect)] >= 2) {
      c.correct = 1.0;
    } else if (h[static_cast<std::size_t>(Rating::kIncorrect)] >= 2) {
      c.incorrect = 1.0;
    } else {
      c.excluded = true;
    }
    return c;
  };
  return s;
}

inline AggregationScheme scheme_by_name(const std::string& name) {
  if (name == "MAJORITY") return majority_scheme();
  if (name == "UNANIMOUS") return unanimous_scheme();
  if (name == "PARTIAL_HALF") return partial_half_scheme();
  if (name == "STRICT_DROP_UNSURE") return strict_drop_unsure_scheme();
  throw ConfigError("unknown aggregation scheme: " + name);
}

}  // namespace voiceface
