#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

inline constexpr const char* kFeatureHeader = "# voiceface features v1";

// Feature file: header, five `key value` lines, then one frame per line.

inline void write_features(const FeatureSequence& f, const std::string& path) {
  auto out = detail::open_output(path);
  out << kFeatureHeader << '\n';
  out << "dim " << f.dim << '\n';
  out << "hop_s " << detail::format_double(f.hop_s) << '\n';
  out << "start_s " << detail::format_double(f.start_s) << '\n';
  out << "kind " << to_string(f.kind) << '\n';
  out << "fingerprint " << (f.fingerprint.empty() ? "-" : f.fingerprint) << '\n';
  for (int i = 0; i < f.num_frames(); ++i) {
    const auto frame = f.frame(i);
    for (int j = 0; j < f.dim; ++j) {
      if (j) out << ' ';
      out << detail::format_double(frame[j]);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline FeatureSequence read_features(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kFeatureHeader) {
    throw ParseError("missing feature header in " + path, 1);
  }

  FeatureSequence f;
  long line_no = 1;
  for (int i = 0; i < 5; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError("truncated feature header in " + path, line_no);
    }
    ++line_no;
    const auto tok = detail::split_ws(line);
    if (tok.size() != 2) {
      throw ParseError("feature header line needs `key value`", line_no);
    }
    if (tok[0] == "dim") {
      f.dim = static_cast<int>(detail::parse_long(tok[1], "dim", line_no));
    } else if (tok[0] == "hop_s") {
      f.hop_s = detail::parse_double(tok[1], "hop_s", line_no);
    } else if (tok[0] == "start_s") {
      f.start_s = detail::parse_double(tok[1], "start_s", line_no);
    } else if (tok[0] == "kind") {
      f.kind = feature_kind_from_string(tok[1]);
    } else if (tok[0] == "fingerprint") {
      f.fingerprint = tok[1] == "-" ? "" : tok[1];
    } else {
      throw ParseError("unknown feature header key: " + tok[0], line_no);
    }
  }
  if (f.dim <= 0) {
    throw ParseError("feature dim must be positive", 2);
  }
  if (f.hop_s <= 0.0) {
    throw ParseError("feature hop_s must be positive", 3);
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    if (static_cast<int>(tok.size()) != f.dim) {
      throw ParseError("feature frame needs " + std::to_string(f.dim) + " values, got " +
                           std::to_string(tok.size()),
                       line_no);
    }
    for (const std::string& t : tok) {
      const double v = detail::parse_double(t, "feature value", line_no);
      if (!std::isfinite(v)) {
        throw ParseError("non-finite feature value", line_no);
      }
      f.data.push_back(v);
    }
  }
  return f;
}

}  // namespace voiceface
