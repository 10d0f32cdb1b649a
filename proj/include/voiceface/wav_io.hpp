#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

// Reads a RIFF/WAVE file containing 16-bit mono linear PCM. Samples are
// scaled by 1/32768, so the full negative range maps exactly onto [-1, 0).
inline AudioBuffer read_audio(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open audio file: " + path);
  }

  auto read_u32 = [&in]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  };
  auto read_u16 = [&in]() {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  };

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RIFF", 4) != 0) {
    throw ParseError("not a RIFF file: " + path);
  }
  read_u32();  // riff size
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "WAVE", 4) != 0) {
    throw ParseError("not a WAVE file: " + path);
  }

  bool have_fmt = false;
  std::uint16_t format_code = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::vector<char> data;
  bool have_data = false;

  while (in) {
    char chunk_id[4];
    in.read(chunk_id, 4);
    if (!in) break;
    const std::uint32_t chunk_size = read_u32();
    if (!in) break;

    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      format_code = read_u16();
      channels = read_u16();
      sample_rate = read_u32();
      read_u32();  // byte rate
      read_u16();  // block align
      bits = read_u16();
      if (chunk_size > 16) {
        in.seekg(chunk_size - 16, std::ios::cur);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data.resize(chunk_size);
      in.read(data.data(), chunk_size);
      if (static_cast<std::uint32_t>(in.gcount()) != chunk_size) {
        throw ParseError("truncated data chunk in " + path);
      }
      have_data = true;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }

  if (!have_fmt || !have_data) {
    throw ParseError("missing fmt/data chunk in " + path);
  }
  if (channels != 1) {
    throw ParseError("unsupported channel count: " + std::to_string(channels) +
                     " (expected mono)");
  }
  if (format_code != 1 || bits != 16) {
    throw ParseError("unsupported encoding: format " + std::to_string(format_code) +
                     ", " + std::to_string(bits) + " bits (expected 16-bit PCM)");
  }
  if (sample_rate == 0) {
    throw ParseError("invalid sample rate 0 in " + path);
  }
  if (data.size() < 2) {
    throw ParseError("empty audio data in " + path);
  }

  AudioBuffer buf;
  buf.sample_rate_hz = static_cast<int>(sample_rate);
  const std::size_t n = data.size() / 2;
  buf.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int16_t s = static_cast<std::int16_t>(
        static_cast<std::uint16_t>(static_cast<unsigned char>(data[2 * i])) |
        (static_cast<std::uint16_t>(static_cast<unsigned char>(data[2 * i + 1])) << 8));
    buf.samples[i] = static_cast<float>(s) / 32768.0f;
  }
  return buf;
}

// Writes 16-bit mono PCM. Samples outside [-1, 1] are clipped.
inline void write_audio(const AudioBuffer& audio, const std::string& path) {
  if (audio.sample_rate_hz <= 0) {
    throw ConfigError("audio sample rate must be positive");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open audio file for writing: " + path);
  }

  auto put_u32 = [&out](std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                       static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  auto put_u16 = [&out](std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
  };

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  const std::uint32_t rate = static_cast<std::uint32_t>(audio.sample_rate_hz);

  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);   // linear PCM
  put_u16(1);   // mono
  put_u32(rate);
  put_u32(rate * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);

  for (float x : audio.samples) {
    long q = std::lround(static_cast<double>(x) * 32768.0);
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace voiceface
