#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "voiceface/error.hpp"
#include "voiceface/text_util.hpp"
#include "voiceface/types.hpp"

namespace voiceface {

inline constexpr double kPi = 3.14159265358979323846;

// ─── Configuration ───────────────────────────────────────────────────────

struct FrameConfig {
  double frame_length_s = 0.025;
  double hop_s = 0.010;  // 10 ms hop = 100 frames per second
  int fft_size = 512;
  int sample_rate_hz = 16000;

  int frame_length_samples() const {
    return static_cast<int>(std::lround(frame_length_s * sample_rate_hz));
  }
  int hop_samples() const {
    return static_cast<int>(std::lround(hop_s * sample_rate_hz));
  }

  void validate() const {
    if (sample_rate_hz <= 0) {
      throw ConfigError("sample_rate_hz must be positive");
    }
    if (!(hop_s > 0.0 && hop_s <= frame_length_s)) {
      throw ConfigError("need 0 < hop_s <= frame_length_s");
    }
    if (frame_length_samples() < 1 || hop_samples() < 1) {
      throw ConfigError("frame/hop shorter than one sample");
    }
    if (fft_size < 1 || (fft_size & (fft_size - 1)) != 0) {
      throw ConfigError("fft_size must be a power of two");
    }
    if (fft_size < frame_length_samples()) {
      throw ConfigError("fft_size must cover one frame (" +
                        std::to_string(frame_length_samples()) + " samples)");
    }
  }
};

struct MelConfig {
  int num_bands = 40;
  double min_freq_hz = 20.0;
  double max_freq_hz = 7600.0;
  int num_mfcc = 13;

  void validate(int sample_rate_hz) const {
    if (num_bands < 1) {
      throw ConfigError("num_bands must be >= 1");
    }
    if (!(min_freq_hz >= 0.0 && min_freq_hz < max_freq_hz &&
          max_freq_hz <= sample_rate_hz / 2.0)) {
      throw ConfigError("need 0 <= min_freq_hz < max_freq_hz <= sample_rate/2");
    }
    if (num_mfcc < 1 || num_mfcc > num_bands) {
      throw ConfigError("need 1 <= num_mfcc <= num_bands");
    }
  }
};

struct FrontendConfig {
  FrameConfig frame;
  MelConfig mel;
  FeatureKind kind = FeatureKind::kLogMel;
  double log_floor = 1e-10;

  void validate() const {
    frame.validate();
    mel.validate(frame.sample_rate_hz);
    if (kind == FeatureKind::kRaw) {
      throw ConfigError("front-end cannot produce raw features");
    }
    if (log_floor <= 0.0) {
      throw ConfigError("log_floor must be positive");
    }
  }
};

// Canonical identifier for a front-end configuration. Codebooks remember the
// fingerprint of the features they were trained on and refuse mismatches.
inline std::string frontend_fingerprint(const FrontendConfig& cfg) {
  std::string fp = std::string(to_string(cfg.kind)) +
                   ":sr=" + std::to_string(cfg.frame.sample_rate_hz) +
                   ":frame=" + detail::format_double(cfg.frame.frame_length_s) +
                   ":hop=" + detail::format_double(cfg.frame.hop_s) +
                   ":fft=" + std::to_string(cfg.frame.fft_size) +
                   ":bands=" + std::to_string(cfg.mel.num_bands) +
                   ":lo=" + detail::format_double(cfg.mel.min_freq_hz) +
                   ":hi=" + detail::format_double(cfg.mel.max_freq_hz);
  if (cfg.kind != FeatureKind::kMelSpectra) {
    fp += ":floor=" + detail::format_double(cfg.log_floor);
  }
  if (cfg.kind == FeatureKind::kMfcc) {
    fp += ":nmfcc=" + std::to_string(cfg.mel.num_mfcc);
  }
  return fp;
}

// ─── FFT ─────────────────────────────────────────────────────────────────

namespace detail {

// Iterative radix-2 Cooley-Tukey, in place. Size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) {
      j ^= bit;
    }
    j ^= bit;
    if (i < j) {
      std::swap(a[i], a[j]);
    }
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

// ─── Framing and spectra ─────────────────────────────────────────────────

// Splits audio into Hann-windowed frames. Frame i starts at sample i*hop;
// trailing samples that do not fill a whole frame are dropped.
inline std::vector<std::vector<double>> frame_signal(const AudioBuffer& audio,
                                                     const FrameConfig& cfg) {
  cfg.validate();
  if (audio.sample_rate_hz != cfg.sample_rate_hz) {
    throw ConfigError("audio sample rate " + std::to_string(audio.sample_rate_hz) +
                      " does not match configured " + std::to_string(cfg.sample_rate_hz));
  }
  const int frame_len = cfg.frame_length_samples();
  const int hop = cfg.hop_samples();
  const long n = static_cast<long>(audio.samples.size());
  if (n < frame_len) {
    throw ConfigError("audio shorter than one frame (" + std::to_string(n) + " < " +
                      std::to_string(frame_len) + " samples)");
  }

  std::vector<double> window(frame_len, 1.0);
  if (frame_len > 1) {
    for (int i = 0; i < frame_len; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (frame_len - 1));
    }
  }

  const long num_frames = (n - frame_len) / hop + 1;
  std::vector<std::vector<double>> frames(num_frames);
  for (long f = 0; f < num_frames; ++f) {
    frames[f].resize(frame_len);
    const long off = f * hop;
    for (int i = 0; i < frame_len; ++i) {
      frames[f][i] = static_cast<double>(audio.samples[off + i]) * window[i];
    }
  }
  return frames;
}

// |DFT|^2 over bins 0..fft_size/2. The frame is zero-padded to fft_size.
inline std::vector<double> power_spectrum(std::span<const double> frame, int fft_size) {
  if (fft_size < 1 || (fft_size & (fft_size - 1)) != 0) {
    throw ConfigError("fft_size must be a power of two");
  }
  if (static_cast<int>(frame.size()) > fft_size) {
    throw ConfigError("frame longer than fft_size");
  }
  std::vector<std::complex<double>> buf(fft_size, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) {
    buf[i] = {frame[i], 0.0};
  }
  detail::fft_inplace(buf);
  std::vector<double> power(fft_size / 2 + 1);
  for (int k = 0; k <= fft_size / 2; ++k) {
    power[k] = std::norm(buf[k]);
  }
  return power;
}

// ─── Mel filterbank ──────────────────────────────────────────────────────

inline double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }

inline double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular filters with centers equally spaced on the mel scale,
// peak-normalized so each triangle reaches 1.0 at its center frequency.
class MelFilterbank {
 public:
  MelFilterbank(const MelConfig& cfg, int fft_size, int sample_rate_hz)
      : num_bands_(cfg.num_bands) {
    cfg.validate(sample_rate_hz);
    const double mel_lo = hz_to_mel(cfg.min_freq_hz);
    const double mel_hi = hz_to_mel(cfg.max_freq_hz);
    edges_hz_.resize(num_bands_ + 2);
    for (int b = 0; b < num_bands_ + 2; ++b) {
      edges_hz_[b] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * b / (num_bands_ + 1));
    }
    for (int b = 0; b + 1 < static_cast<int>(edges_hz_.size()); ++b) {
      if (!(edges_hz_[b] < edges_hz_[b + 1])) {
        throw ConfigError("mel band edges collapse; widen the frequency range");
      }
    }

    const int num_bins = fft_size / 2 + 1;
    const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
    weights_.assign(num_bands_, std::vector<double>(num_bins, 0.0));
    for (int b = 0; b < num_bands_; ++b) {
      for (int k = 0; k < num_bins; ++k) {
        weights_[b][k] = weight_at(b, k * bin_hz);
      }
    }
  }

  int num_bands() const { return num_bands_; }
  double center_hz(int band) const { return edges_hz_[band + 1]; }
  const std::vector<double>& weights(int band) const { return weights_[band]; }

  // Triangle for `band` evaluated at an arbitrary frequency.
  double weight_at(int band, double freq_hz) const {
    const double lo = edges_hz_[band];
    const double mid = edges_hz_[band + 1];
    const double hi = edges_hz_[band + 2];
    if (freq_hz <= lo || freq_hz >= hi) {
      return 0.0;
    }
    if (freq_hz <= mid) {
      return (freq_hz - lo) / (mid - lo);
    }
    return (hi - freq_hz) / (hi - mid);
  }

  std::vector<double> apply(std::span<const double> power) const {
    std::vector<double> out(num_bands_, 0.0);
    for (int b = 0; b < num_bands_; ++b) {
      const auto& w = weights_[b];
      const std::size_t n = std::min(w.size(), power.size());
      double sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        sum += w[k] * power[k];
      }
      out[b] = sum;
    }
    return out;
  }

 private:
  int num_bands_;
  std::vector<double> edges_hz_;
  std::vector<std::vector<double>> weights_;
};

// ─── Log-mel and MFCC ────────────────────────────────────────────────────

inline std::vector<double> log_mel(std::span<const double> mel_vec,
                                   double floor_eps = 1e-10) {
  std::vector<double> out(mel_vec.size());
  for (std::size_t i = 0; i < mel_vec.size(); ++i) {
    out[i] = std::log(mel_vec[i] + floor_eps);
  }
  return out;
}

// Orthonormal DCT-II basis; row k applied to an N-vector yields coefficient k.
class DctBasis {
 public:
  DctBasis(int input_dim, int num_coeffs) : n_(input_dim), k_(num_coeffs) {
    if (num_coeffs < 1 || num_coeffs > input_dim) {
      throw ConfigError("need 1 <= num_coeffs <= input_dim");
    }
    rows_.assign(k_, std::vector<double>(n_));
    for (int k = 0; k < k_; ++k) {
      const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / n_);
      for (int i = 0; i < n_; ++i) {
        rows_[k][i] = scale * std::cos(kPi * (i + 0.5) * k / n_);
      }
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != n_) {
      throw DimensionError("DCT input has wrong dimension");
    }
    std::vector<double> out(k_, 0.0);
    for (int k = 0; k < k_; ++k) {
      double sum = 0.0;
      for (int i = 0; i < n_; ++i) {
        sum += rows_[k][i] * x[i];
      }
      out[k] = sum;
    }
    return out;
  }

  const std::vector<double>& row(int k) const { return rows_[k]; }

 private:
  int n_;
  int k_;
  std::vector<std::vector<double>> rows_;
};

inline std::vector<double> mfcc(std::span<const double> log_mel_vec, int num_mfcc) {
  return DctBasis(static_cast<int>(log_mel_vec.size()), num_mfcc).apply(log_mel_vec);
}

// ─── Full feature extraction ─────────────────────────────────────────────

inline FeatureSequence compute_features(const AudioBuffer& audio,
                                        const FrontendConfig& cfg) {
  cfg.validate();
  if (audio.sample_rate_hz != cfg.frame.sample_rate_hz) {
    throw ConfigError("audio sample rate " + std::to_string(audio.sample_rate_hz) +
                      " does not match configured " +
                      std::to_string(cfg.frame.sample_rate_hz));
  }

  const auto frames = frame_signal(audio, cfg.frame);
  const MelFilterbank bank(cfg.mel, cfg.frame.fft_size, cfg.frame.sample_rate_hz);
  DctBasis dct(cfg.mel.num_bands, cfg.mel.num_mfcc);

  FeatureSequence seq;
  seq.kind = cfg.kind;
  seq.hop_s = cfg.frame.hop_s;
  seq.start_s = 0.0;
  seq.fingerprint = frontend_fingerprint(cfg);
  seq.dim = cfg.kind == FeatureKind::kMfcc ? cfg.mel.num_mfcc : cfg.mel.num_bands;
  seq.data.reserve(frames.size() * seq.dim);

  for (const auto& frame : frames) {
    const auto power = power_spectrum(frame, cfg.frame.fft_size);
    std::vector<double> feat = bank.apply(power);
    if (cfg.kind != FeatureKind::kMelSpectra) {
      feat = log_mel(feat, cfg.log_floor);
    }
    if (cfg.kind == FeatureKind::kMfcc) {
      feat = dct.apply(feat);
    }
    seq.push_frame(feat);
  }
  return seq;
}

}  // namespace voiceface
