#pragma once

#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

inline constexpr const char* kTimelineHeader = "# voiceface timeline v1";
inline constexpr const char* kOffScreenTag = "OFF_SCREEN";

// Timeline file: header line, then one entry per line,
//   start_s end_s speech_cluster_id face_cluster_id|OFF_SCREEN

inline void write_timeline(const SpeakerTimeline& timeline, const std::string& path) {
  auto out = detail::open_output(path);
  out << kTimelineHeader << '\n';
  for (const TimelineEntry& e : timeline.entries) {
    out << detail::format_double(e.start_s) << ' ' << detail::format_double(e.end_s)
        << ' ' << e.speech_cluster_id << ' ';
    if (e.face_cluster_id.has_value()) {
      out << *e.face_cluster_id;
    } else {
      out << kOffScreenTag;
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

inline SpeakerTimeline read_timeline(const std::string& path) {
  auto in = detail::open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kTimelineHeader) {
    throw ParseError("missing timeline header in " + path, 1);
  }
  SpeakerTimeline tl;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) {
      continue;
    }
    const auto tok = detail::split_ws(line);
    if (tok.size() != 4) {
      throw ParseError("timeline entry needs 4 fields, got " + std::to_string(tok.size()),
                       line_no);
    }
    TimelineEntry e;
    e.start_s = detail::parse_double(tok[0], "start_s", line_no);
    e.end_s = detail::parse_double(tok[1], "end_s", line_no);
    e.speech_cluster_id =
        static_cast<int>(detail::parse_long(tok[2], "speech_cluster_id", line_no));
    if (tok[3] == kOffScreenTag) {
      e.face_cluster_id.reset();
    } else {
      e.face_cluster_id =
          static_cast<int>(detail::parse_long(tok[3], "face_cluster_id", line_no));
    }
    if (e.end_s < e.start_s) {
      throw ParseError("timeline entry ends before it starts", line_no);
    }
    tl.entries.push_back(e);
  }
  return tl;
}

}  // namespace voiceface
