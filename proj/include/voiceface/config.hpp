#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include "json.hpp"
#include "voiceface/error.hpp"
#include "voiceface/frontend.hpp"
#include "voiceface/speech_activity.hpp"
#include "voiceface/text_util.hpp"

namespace voiceface {

// Every tunable of the pipeline in one flat structure. The JSON config file
// uses the same flat key names; unknown keys are rejected rather than
// silently ignored so typos cannot masquerade as defaults.
struct PipelineConfig {
  FrontendConfig frontend;
  double sad_threshold = 0.5;  // posterior gate for external SAD streams
  EnergySadConfig sad;
  int codebook_size = 128;
  int kmeans_max_iterations = 100;
  double kmeans_tolerance = 1e-6;
  bool power_normalization = false;
  std::uint64_t training_seed = 1;
  double speech_cluster_threshold = 0.75;
  double face_threshold = 0.85;
  bool face_use_tracks = true;
  double min_coverage = 0.0;
  int jobs = 1;

  void validate() const {
    frontend.validate();
    if (!(sad_threshold >= 0.0 && sad_threshold <= 1.0)) {
      throw ConfigError("sad_threshold must lie in [0, 1]");
    }
    if (!(sad.noise_percentile >= 0.0 && sad.noise_percentile <= 1.0)) {
      throw ConfigError("sad_noise_percentile must lie in [0, 1]");
    }
    if (!(sad.margin_db >= 0.0)) {
      throw ConfigError("sad_margin_db must be nonnegative");
    }
    if (codebook_size < 1) {
      throw ConfigError("codebook_size must be at least 1");
    }
    if (kmeans_max_iterations < 1) {
      throw ConfigError("kmeans_max_iterations must be at least 1");
    }
    if (!(kmeans_tolerance > 0.0)) {
      throw ConfigError("kmeans_tolerance must be positive");
    }
    if (!(speech_cluster_threshold >= -1.0 && speech_cluster_threshold <= 1.0)) {
      throw ConfigError("speech_cluster_threshold must lie in [-1, 1]");
    }
    if (!(face_threshold >= -1.0 && face_threshold <= 1.0)) {
      throw ConfigError("face_threshold must lie in [-1, 1]");
    }
    if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) {
      throw ConfigError("min_coverage must lie in [0, 1]");
    }
    if (jobs < 1) {
      throw ConfigError("jobs must be at least 1");
    }
  }
};

inline nlohmann::json config_to_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["sample_rate_hz"] = c.frontend.frame.sample_rate_hz;
  j["frame_length_s"] = c.frontend.frame.frame_length_s;
  j["frame_hop_s"] = c.frontend.frame.hop_s;
  j["fft_size"] = c.frontend.frame.fft_size;
  j["num_mel_bands"] = c.frontend.mel.num_bands;
  j["mel_low_hz"] = c.frontend.mel.min_freq_hz;
  j["mel_high_hz"] = c.frontend.mel.max_freq_hz;
  j["num_mfcc"] = c.frontend.mel.num_mfcc;
  j["feature_kind"] = to_string(c.frontend.kind);
  j["log_floor"] = c.frontend.log_floor;
  j["sad_threshold"] = c.sad_threshold;
  j["sad_margin_db"] = c.sad.margin_db;
  j["sad_noise_floor_cap_db"] = c.sad.noise_floor_cap_db;
  j["sad_noise_percentile"] = c.sad.noise_percentile;
  j["codebook_size"] = c.codebook_size;
  j["kmeans_max_iterations"] = c.kmeans_max_iterations;
  j["kmeans_tolerance"] = c.kmeans_tolerance;
  j["power_normalization"] = c.power_normalization;
  j["training_seed"] = c.training_seed;
  j["speech_cluster_threshold"] = c.speech_cluster_threshold;
  j["face_threshold"] = c.face_threshold;
  j["face_use_tracks"] = c.face_use_tracks;
  j["min_coverage"] = c.min_coverage;
  j["jobs"] = c.jobs;
  return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  PipelineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "sample_rate_hz") {
        c.frontend.frame.sample_rate_hz = value.get<int>();
      } else if (key == "frame_length_s") {
        c.frontend.frame.frame_length_s = value.get<double>();
      } else if (key == "frame_hop_s") {
        c.frontend.frame.hop_s = value.get<double>();
      } else if (key == "fft_size") {
        c.frontend.frame.fft_size = value.get<int>();
      } else if (key == "num_mel_bands") {
        c.frontend.mel.num_bands = value.get<int>();
      } else if (key == "mel_low_hz") {
        c.frontend.mel.min_freq_hz = value.get<double>();
      } else if (key == "mel_high_hz") {
        c.frontend.mel.max_freq_hz = value.get<double>();
      } else if (key == "num_mfcc") {
        c.frontend.mel.num_mfcc = value.get<int>();
      } else if (key == "feature_kind") {
        c.frontend.kind = feature_kind_from_string(value.get<std::string>());
      } else if (key == "log_floor") {
        c.frontend.log_floor = value.get<double>();
      } else if (key == "sad_threshold") {
        c.sad_threshold = value.get<double>();
      } else if (key == "sad_margin_db") {
        c.sad.margin_db = value.get<double>();
      } else if (key == "sad_noise_floor_cap_db") {
        c.sad.noise_floor_cap_db = value.get<double>();
      } else if (key == "sad_noise_percentile") {
        c.sad.noise_percentile = value.get<double>();
      } else if (key == "codebook_size") {
        c.codebook_size = value.get<int>();
      } else if (key == "kmeans_max_iterations") {
        c.kmeans_max_iterations = value.get<int>();
      } else if (key == "kmeans_tolerance") {
        c.kmeans_tolerance = value.get<double>();
      } else if (key == "power_normalization") {
        c.power_normalization = value.get<bool>();
      } else if (key == "training_seed") {
        c.training_seed = value.get<std::uint64_t>();
      } else if (key == "speech_cluster_threshold") {
        c.speech_cluster_threshold = value.get<double>();
      } else if (key == "face_threshold") {
        c.face_threshold = value.get<double>();
      } else if (key == "face_use_tracks") {
        c.face_use_tracks = value.get<bool>();
      } else if (key == "min_coverage") {
        c.min_coverage = value.get<double>();
      } else if (key == "jobs") {
        c.jobs = value.get<int>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
  auto in = detail::open_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

inline void save_pipeline_config(const PipelineConfig& c, const std::string& path) {
  auto out = detail::open_output(path);
  out << config_to_json(c).dump(2) << '\n';
  if (!out) {
    throw IoError("write failed: " + path);
  }
}

}  // namespace voiceface
