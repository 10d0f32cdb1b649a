#pragma once

#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

// Rating file: one clip per line, `clip_id verdict verdict verdict` with
// verdicts in {Correct, Incorrect, PartiallyCorrect, Unsure}.

inline std::vector<RatingRecord> read_ratings(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<RatingRecord> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    if (tok.size() != 4) {
      throw ParseError("rating record needs clip_id plus exactly 3 verdicts, got " +
                           std::to_string(tok.size()) + " fields",
                       line_no);
    }
    RatingRecord r;
    r.clip_id = tok[0];
    for (int i = 0; i < 3; ++i) {
      try {
        r.ratings[i] = rating_from_string(tok[1 + i]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_ratings(const std::vector<RatingRecord>& records, const std::string& path) {
  auto out = detail::open_output(path);
  out << "# voiceface ratings v1: clip_id verdict verdict verdict\n";
  for (const RatingRecord& r : records) {
    out << r.clip_id;
    for (Rating v : r.ratings) {
      out << ' ' << to_string(v);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

// Pair-label file: header `# voiceface pairs v1 dim <D>`, then per line
// `same|different a1..aD b1..bD`.

inline void write_pairs(const std::vector<PairLabel>& pairs, const std::string& path) {
  auto out = detail::open_output(path);
  const int dim = pairs.empty() ? 0 : pairs.front().a.dim();
  out << "# voiceface pairs v1 dim " << dim << '\n';
  for (const PairLabel& p : pairs) {
    if (p.a.dim() != dim || p.b.dim() != dim) {
      throw DimensionError("pair embeddings must all share one dimension");
    }
    out << (p.same_speaker ? "same" : "different");
    for (double v : p.a.values) {
      out << ' ' << detail::format_double(v);
    }
    for (double v : p.b.values) {
      out << ' ' << detail::format_double(v);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline std::vector<PairLabel> read_pairs(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("missing pairs header in " + path, 1);
  }
  const auto head = detail::split_ws(line);
  if (head.size() != 6 || head[0] != "#" || head[1] != "voiceface" || head[2] != "pairs" ||
      head[3] != "v1" || head[4] != "dim") {
    throw ParseError("missing pairs header in " + path, 1);
  }
  const int dim = static_cast<int>(detail::parse_long(head[5], "pair dim", 1));
  if (dim < 0) {
    throw ParseError("negative pair dim", 1);
  }

  std::vector<PairLabel> pairs;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    if (static_cast<int>(tok.size()) != 1 + 2 * dim) {
      throw ParseError("pair record needs " + std::to_string(1 + 2 * dim) +
                           " fields, got " + std::to_string(tok.size()),
                       line_no);
    }
    PairLabel p;
    if (tok[0] == "same") {
      p.same_speaker = true;
    } else if (tok[0] == "different") {
      p.same_speaker = false;
    } else {
      throw ParseError("pair label must be 'same' or 'different', got '" + tok[0] + "'",
                       line_no);
    }
    p.a.values.resize(dim);
    p.b.values.resize(dim);
    for (int i = 0; i < dim; ++i) {
      p.a.values[i] = detail::parse_double(tok[1 + i], "pair embedding entry", line_no);
    }
    for (int i = 0; i < dim; ++i) {
      p.b.values[i] = detail::parse_double(tok[1 + dim + i], "pair embedding entry", line_no);
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace voiceface
