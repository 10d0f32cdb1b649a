#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "voiceface/error.hpp"

namespace voiceface::detail {

// Shortest representation that parses back to the exact same double. Low
// %g precisions can be longer than higher ones (20 -> "2e+01" vs "20"), so
// every round-tripping precision competes on string length.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back != v) {
    return buf;  // nan and friends
  }
  std::string best = buf;
  for (int prec = 1; prec < 17; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    std::sscanf(cand, "%lf", &back);
    if (back == v && std::string(cand).size() < best.size()) {
      best = cand;
    }
  }
  return best;
}

inline std::string format_float(float v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  float back = 0.0f;
  std::sscanf(buf, "%f", &back);
  if (back != v) {
    return buf;
  }
  std::string best = buf;
  for (int prec = 1; prec < 9; ++prec) {
    char cand[32];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, static_cast<double>(v));
    std::sscanf(cand, "%f", &back);
    if (back == v && std::string(cand).size() < best.size()) {
      best = cand;
    }
  }
  return best;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) {
    tokens.push_back(tok);
  }
  return tokens;
}

inline bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

inline double parse_double(const std::string& tok, const char* what, long line = 0) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'", line);
  }
  if (pos != tok.size()) {
    throw ParseError(std::string("trailing characters in ") + what + ": '" + tok + "'", line);
  }
  return v;
}

inline long parse_long(const std::string& tok, const char* what, long line = 0) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'", line);
  }
  if (pos != tok.size()) {
    throw ParseError(std::string("trailing characters in ") + what + ": '" + tok + "'", line);
  }
  return v;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open for reading: " + path);
  }
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  return out;
}

}  // namespace voiceface::detail
