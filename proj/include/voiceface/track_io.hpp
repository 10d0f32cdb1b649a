#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

// Face-track file: UTF-8 text, one detection per line,
//   timestamp_s frame_index x y w h e1 ... e128 [track_id]
// Blank lines and lines starting with '#' are skipped.

inline std::vector<FaceDetection> read_face_tracks(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<FaceDetection> dets;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    const std::size_t base = 6 + kFaceEmbeddingDim;
    if (tok.size() != base && tok.size() != base + 1) {
      throw ParseError("face track record needs " + std::to_string(base) + " or " +
                           std::to_string(base + 1) + " fields, got " +
                           std::to_string(tok.size()),
                       line_no);
    }
    FaceDetection d;
    d.timestamp_s = detail::parse_double(tok[0], "timestamp_s", line_no);
    d.frame_index = detail::parse_long(tok[1], "frame_index", line_no);
    d.bbox.x = detail::parse_double(tok[2], "bbox x", line_no);
    d.bbox.y = detail::parse_double(tok[3], "bbox y", line_no);
    d.bbox.width = detail::parse_double(tok[4], "bbox width", line_no);
    d.bbox.height = detail::parse_double(tok[5], "bbox height", line_no);
    d.embedding.resize(kFaceEmbeddingDim);
    for (int i = 0; i < kFaceEmbeddingDim; ++i) {
      d.embedding[i] =
          static_cast<float>(detail::parse_double(tok[6 + i], "embedding entry", line_no));
    }
    if (tok.size() == base + 1) {
      d.track_id = static_cast<int>(detail::parse_long(tok[base], "track_id", line_no));
    }
    try {
      validate(d);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    dets.push_back(std::move(d));
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const FaceDetection& a, const FaceDetection& b) {
                     return a.timestamp_s < b.timestamp_s;
                   });
  return dets;
}

inline void write_face_tracks(const std::vector<FaceDetection>& dets,
                              const std::string& path) {
  auto out = detail::open_output(path);
  out << "# voiceface face tracks v1: timestamp_s frame_index x y w h e1..e"
      << kFaceEmbeddingDim << " [track_id]\n";
  for (const FaceDetection& d : dets) {
    validate(d);
    out << detail::format_double(d.timestamp_s) << ' ' << d.frame_index << ' '
        << detail::format_double(d.bbox.x) << ' ' << detail::format_double(d.bbox.y) << ' '
        << detail::format_double(d.bbox.width) << ' '
        << detail::format_double(d.bbox.height);
    for (float v : d.embedding) {
      out << ' ' << detail::format_float(v);
    }
    if (d.track_id >= 0) {
      out << ' ' << d.track_id;
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace voiceface
