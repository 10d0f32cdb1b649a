// voiceface command-line tool: run the speaker-association pipeline, train
// VLAD codebooks, generate synthetic labeled scenarios, and evaluate results.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "voiceface/voiceface.hpp"

namespace vf = voiceface;

namespace {

// One place to translate --config plus individual flag overrides into the
// pipeline configuration.
struct ConfigArgs {
  std::string config_path;
  std::optional<double> sad_threshold;
  std::optional<double> sad_margin_db;
  std::optional<double> speech_cluster_threshold;
  std::optional<double> face_threshold;
  std::optional<double> min_coverage;
  std::optional<int> codebook_size;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pipeline config JSON");
    cmd->add_option("--sad-threshold", sad_threshold,
                    "posterior threshold for marking a frame as speech");
    cmd->add_option("--sad-margin-db", sad_margin_db, "energy margin above the noise floor");
    cmd->add_option("--speech-cluster-threshold", speech_cluster_threshold,
                    "complete-linkage cosine stop threshold");
    cmd->add_option("--face-threshold", face_threshold, "face similarity threshold");
    cmd->add_option("--min-coverage", min_coverage,
                    "minimum fraction of face detections the winner must hold");
    cmd->add_option("--codebook-size", codebook_size, "number of VLAD clusters");
    cmd->add_option("--jobs", jobs, "worker threads (results are identical for any value)");
    cmd->add_option("--seed", seed, "training seed");
  }

  vf::PipelineConfig resolve() const {
    vf::PipelineConfig cfg;
    if (!config_path.empty()) {
      cfg = vf::load_pipeline_config(config_path);
    }
    if (sad_threshold) cfg.sad_threshold = *sad_threshold;
    if (sad_margin_db) cfg.sad.margin_db = *sad_margin_db;
    if (speech_cluster_threshold) cfg.speech_cluster_threshold = *speech_cluster_threshold;
    if (face_threshold) cfg.face_threshold = *face_threshold;
    if (min_coverage) cfg.min_coverage = *min_coverage;
    if (codebook_size) cfg.codebook_size = *codebook_size;
    if (jobs) cfg.jobs = *jobs;
    if (seed) cfg.training_seed = *seed;
    cfg.validate();
    return cfg;
  }
};

vf::FeatureSequence load_input_features(const std::string& features_path,
                                        const std::string& audio_path,
                                        const vf::PipelineConfig& cfg) {
  if (features_path.empty() == audio_path.empty()) {
    throw vf::ConfigError("provide exactly one of --features or --audio");
  }
  if (!features_path.empty()) {
    return vf::read_features(features_path);
  }
  return vf::compute_features(vf::read_audio(audio_path), cfg.frontend);
}

int cmd_run(const std::string& features_path, const std::string& audio_path,
            const std::string& tracks_path, const std::string& codebook_path,
            const std::string& out_path, const std::string& sad_file, bool diagnostics,
            bool summary, const ConfigArgs& cargs) {
  const vf::PipelineConfig cfg = cargs.resolve();
  const vf::FeatureSequence features = load_input_features(features_path, audio_path, cfg);
  const std::vector<vf::FaceDetection> detections = vf::read_face_tracks(tracks_path);
  const vf::VladCodebook codebook = vf::load_codebook(codebook_path);

  std::unique_ptr<vf::PrecomputedSpeechDetector> external;
  if (!sad_file.empty()) {
    external = std::make_unique<vf::PrecomputedSpeechDetector>(vf::read_posterior(sad_file));
  }
  const vf::PipelineResult result =
      vf::run_pipeline(features, detections, codebook, cfg, external.get());

  vf::write_timeline(result.timeline, out_path);
  if (result.segments.empty()) {
    std::cerr << "warning: no speech found; timeline is empty\n";
  }
  if (diagnostics) {
    const std::string dir = out_path + ".diag";
    std::filesystem::create_directories(dir);
    vf::write_diagnostics(result, dir);
  }
  if (summary) {
    std::cout << vf::speaking_time_summary(result);
  }
  return 0;
}

int cmd_train(const std::vector<std::string>& feature_paths,
              const std::vector<std::string>& audio_paths, const std::string& out_path,
              const ConfigArgs& cargs) {
  const vf::PipelineConfig cfg = cargs.resolve();
  if (feature_paths.empty() == audio_paths.empty()) {
    throw vf::ConfigError("provide training input as --features or --audio");
  }
  std::vector<vf::FeatureSequence> parts;
  for (const std::string& p : feature_paths) {
    parts.push_back(vf::read_features(p));
  }
  for (const std::string& p : audio_paths) {
    parts.push_back(vf::compute_features(vf::read_audio(p), cfg.frontend));
  }
  std::vector<const vf::FeatureSequence*> ptrs;
  for (const auto& p : parts) ptrs.push_back(&p);
  const vf::FeatureSequence all = vf::concat_features(ptrs);

  vf::KMeansOptions opts;
  opts.max_iterations = cfg.kmeans_max_iterations;
  opts.tolerance = cfg.kmeans_tolerance;
  opts.jobs = cfg.jobs;
  const vf::VladCodebook cb =
      vf::train_codebook(all, cfg.codebook_size, cfg.training_seed, opts);
  vf::save_codebook(cb, out_path);
  std::cout << "codebook: k=" << cb.k << " dim=" << cb.dim << " -> " << out_path << "\n";
  return 0;
}

int cmd_synth(vf::ScenarioConfig scenario, const std::string& out_dir, bool waveform,
              const std::string& pairs_out, const std::string& pairs_codebook,
              std::size_t max_pairs) {
  std::filesystem::create_directories(out_dir);
  const vf::Scenario scen = vf::generate_scenario(scenario);
  vf::write_features(scen.features, out_dir + "/features.txt");
  vf::write_face_tracks(scen.detections, out_dir + "/tracks.txt");
  vf::write_truth(scen.truth, out_dir + "/truth.txt");
  if (waveform) {
    vf::write_audio(vf::render_waveform(scenario, scen.truth), out_dir + "/audio.wav");
  }
  if (!pairs_out.empty()) {
    if (pairs_codebook.empty()) {
      throw vf::ConfigError("--emit-pairs needs --codebook");
    }
    const vf::VladCodebook cb = vf::load_codebook(pairs_codebook);
    const auto pairs = vf::make_speaker_pairs(scen, cb, max_pairs, scenario.seed);
    vf::write_pairs(pairs, pairs_out);
  }
  std::cout << "scenario: " << scen.truth.turns.size() << " turns, "
            << scen.detections.size() << " face detections, "
            << vf::detail::format_double(scen.truth.duration_s) << " s -> " << out_dir << "\n";
  return 0;
}

int cmd_eval_roc(const std::string& pairs_path, const std::string& csv_out) {
  const auto pairs = vf::read_pairs(pairs_path);
  const vf::RocCurve curve = vf::roc_cosine(pairs);
  if (!csv_out.empty()) {
    vf::write_roc_csv(curve, csv_out);
  }
  std::cout << "pairs: " << pairs.size() << "\nauc: " << vf::detail::format_double(curve.auc)
            << "\n";
  return 0;
}

int cmd_eval_kappa(const std::string& ratings_path) {
  const auto records = vf::read_ratings(ratings_path);
  std::cout << "records: " << records.size()
            << "\nkappa: " << vf::detail::format_double(vf::fleiss_kappa(records)) << "\n";
  return 0;
}

int cmd_eval_aggregate(const std::string& ratings_path, const std::string& scheme_name) {
  const auto records = vf::read_ratings(ratings_path);
  const vf::AggregationScheme scheme = vf::scheme_by_name(scheme_name);
  const vf::AggregateResult r = vf::aggregate_ratings(records, scheme);
  std::cout << "scheme: " << scheme.name << "\ncorrect: " << vf::detail::format_double(r.correct)
            << "\nincorrect: " << vf::detail::format_double(r.incorrect)
            << "\nexcluded: " << r.excluded
            << "\naccuracy: " << vf::detail::format_double(r.accuracy) << "\n";
  return 0;
}

int cmd_eval_score(const std::string& timeline_path, const std::string& truth_path,
                   const std::string& tracks_path, double face_threshold) {
  const vf::SpeakerTimeline timeline = vf::read_timeline(timeline_path);
  const vf::GroundTruth truth = vf::read_truth(truth_path);
  const auto detections = vf::read_face_tracks(tracks_path);
  if (detections.size() != truth.detection_identities.size()) {
    throw vf::ConfigError("tracks and truth disagree on the number of detections");
  }
  const vf::FaceClusterResult fc = vf::cluster_faces(detections, face_threshold);
  const auto identities = vf::face_cluster_identities(fc, truth.detection_identities);
  const vf::ScoreReport rep = vf::score_against_truth(timeline, truth, identities);
  std::cout << "segments_evaluated: " << rep.segments_evaluated
            << "\nsegments_correct: " << rep.segments_correct
            << "\nsegments_excluded: " << rep.segments_excluded
            << "\naccuracy: " << vf::detail::format_double(rep.accuracy)
            << "\nspeech_precision: " << vf::detail::format_double(rep.speech_precision)
            << "\nspeech_recall: " << vf::detail::format_double(rep.speech_recall)
            << "\ncluster_purity: " << vf::detail::format_double(rep.cluster_purity) << "\n";
  return 0;
}

int cmd_inspect(const std::string& codebook_path, const std::string& timeline_path,
                const std::string& features_path, const std::string& truth_path,
                bool default_config) {
  if (default_config) {
    std::cout << vf::config_to_json(vf::PipelineConfig{}).dump(2) << "\n";
    return 0;
  }
  if (!codebook_path.empty()) {
    const vf::VladCodebook cb = vf::load_codebook(codebook_path);
    std::cout << "codebook k=" << cb.k << " dim=" << cb.dim << " seed=" << cb.seed
              << " fingerprint=" << (cb.frontend_fingerprint.empty() ? "-" : cb.frontend_fingerprint)
              << "\n";
    return 0;
  }
  if (!timeline_path.empty()) {
    const vf::SpeakerTimeline tl = vf::read_timeline(timeline_path);
    for (const vf::TimelineEntry& e : tl.entries) {
      std::cout << vf::detail::format_double(e.start_s) << " .. "
                << vf::detail::format_double(e.end_s) << "  speech=" << e.speech_cluster_id
                << "  face=";
      if (e.face_cluster_id.has_value()) {
        std::cout << *e.face_cluster_id;
      } else {
        std::cout << vf::kOffScreenTag;
      }
      std::cout << "\n";
    }
    std::cout << tl.entries.size() << " entries\n";
    return 0;
  }
  if (!features_path.empty()) {
    const vf::FeatureSequence f = vf::read_features(features_path);
    std::cout << "features dim=" << f.dim << " frames=" << f.num_frames()
              << " hop_s=" << vf::detail::format_double(f.hop_s) << " kind=" << to_string(f.kind)
              << " fingerprint=" << (f.fingerprint.empty() ? "-" : f.fingerprint) << "\n";
    return 0;
  }
  if (!truth_path.empty()) {
    const vf::GroundTruth t = vf::read_truth(truth_path);
    std::cout << "truth speakers=" << t.num_speakers << " turns=" << t.turns.size()
              << " detections=" << t.detection_identities.size()
              << " duration_s=" << vf::detail::format_double(t.duration_s) << "\n";
    return 0;
  }
  throw vf::ConfigError("inspect: nothing to inspect (see --help)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voiceface: associate speech clusters with on-screen faces"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run the inference pipeline");
  std::string run_features, run_audio, run_tracks, run_codebook, run_out, run_sad_file;
  bool run_diag = false, run_summary = false;
  ConfigArgs run_cfg;
  run->add_option("--features", run_features, "precomputed feature file");
  run->add_option("--audio", run_audio, "16-bit mono PCM wav");
  run->add_option("--tracks", run_tracks, "face track file")->required();
  run->add_option("--codebook", run_codebook, "VLAD codebook file")->required();
  run->add_option("--out", run_out, "output timeline file")->required();
  run->add_option("--sad-file", run_sad_file, "precomputed speech posterior file");
  run->add_flag("--diagnostics", run_diag, "write <out>.diag/ with stage dumps");
  run->add_flag("--summary", run_summary, "print per-face speaking time");
  run_cfg.attach(run);

  // train
  auto* train = app.add_subcommand("train", "train a VLAD codebook");
  std::vector<std::string> train_features, train_audio;
  std::string train_out;
  ConfigArgs train_cfg;
  train->add_option("--features", train_features, "feature file(s)");
  train->add_option("--audio", train_audio, "wav file(s)");
  train->add_option("--out", train_out, "output codebook file")->required();
  train_cfg.attach(train);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic scenario");
  vf::ScenarioConfig scen;
  std::string synth_dir, synth_pairs, synth_pairs_cb;
  std::size_t synth_max_pairs = 10000;
  bool synth_wave = false;
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--seed", scen.seed, "scenario seed");
  synth->add_option("--speakers", scen.num_speakers, "number of speakers");
  synth->add_option("--turns", scen.num_turns, "number of speech turns");
  synth->add_option("--turn-min", scen.turn_length_min_s, "shortest turn, seconds");
  synth->add_option("--turn-max", scen.turn_length_max_s, "longest turn, seconds");
  synth->add_option("--gap-min", scen.gap_min_s, "shortest silence gap, seconds");
  synth->add_option("--gap-max", scen.gap_max_s, "longest silence gap, seconds");
  synth->add_option("--camera-on-speaker-prob", scen.camera_on_speaker_prob,
                    "chance a shot shows the current speaker");
  synth->add_option("--camera-cut-rate", scen.camera_cut_rate_hz, "Poisson shot cut rate, Hz");
  synth->add_option("--face-noise-sigma", scen.face_noise_sigma,
                    "expected face embedding noise norm");
  synth->add_option("--voice-separation", scen.voice_feature_separation,
                    "speaker mean separation in sigmas");
  synth->add_option("--face-rate", scen.face_sample_rate_hz, "face detections per second");
  synth->add_option("--offscreen-prob", scen.offscreen_prob,
                    "chance an off-speaker shot shows nobody");
  synth->add_option("--feature-dim", scen.feature_dim, "synthetic feature dimension");
  synth->add_option("--voice-sigma", scen.voice_feature_sigma, "within-speaker feature sigma");
  synth->add_flag("--waveform", synth_wave, "also render audio.wav");
  synth->add_option("--emit-pairs", synth_pairs, "write same/different pairs to this file");
  synth->add_option("--codebook", synth_pairs_cb, "codebook for --emit-pairs");
  synth->add_option("--max-pairs", synth_max_pairs, "cap on emitted pairs");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluation utilities");
  eval->require_subcommand(1);
  auto* roc = eval->add_subcommand("roc", "ROC/AUC over labeled pairs");
  std::string roc_pairs, roc_csv;
  roc->add_option("--pairs", roc_pairs, "pairs file")->required();
  roc->add_option("--out", roc_csv, "write curve points as CSV");
  auto* kappa = eval->add_subcommand("kappa", "Fleiss' kappa over rating records");
  std::string kappa_ratings;
  kappa->add_option("--ratings", kappa_ratings, "ratings file")->required();
  auto* agg = eval->add_subcommand("aggregate", "aggregate 3-rater verdicts");
  std::string agg_ratings, agg_scheme = "MAJORITY";
  agg->add_option("--ratings", agg_ratings, "ratings file")->required();
  agg->add_option("--scheme", agg_scheme,
                  "MAJORITY | UNANIMOUS | PARTIAL_HALF | STRICT_DROP_UNSURE");
  auto* score = eval->add_subcommand("score", "score a timeline against ground truth");
  std::string score_timeline, score_truth, score_tracks;
  double score_face_threshold = vf::kFaceSimilarityThreshold;
  score->add_option("--timeline", score_timeline, "predicted timeline")->required();
  score->add_option("--truth", score_truth, "ground-truth file")->required();
  score->add_option("--tracks", score_tracks, "face tracks the timeline was computed from")
      ->required();
  score->add_option("--face-threshold", score_face_threshold, "face similarity threshold");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "describe artifact files");
  std::string ins_codebook, ins_timeline, ins_features, ins_truth;
  bool ins_default_config = false;
  inspect->add_option("--codebook", ins_codebook, "codebook file");
  inspect->add_option("--timeline", ins_timeline, "timeline file");
  inspect->add_option("--features", ins_features, "feature file");
  inspect->add_option("--truth", ins_truth, "ground-truth file");
  inspect->add_flag("--default-config", ins_default_config, "print the default config JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_features, run_audio, run_tracks, run_codebook, run_out, run_sad_file,
                     run_diag, run_summary, run_cfg);
    }
    if (train->parsed()) {
      return cmd_train(train_features, train_audio, train_out, train_cfg);
    }
    if (synth->parsed()) {
      return cmd_synth(scen, synth_dir, synth_wave, synth_pairs, synth_pairs_cb,
                       synth_max_pairs);
    }
    if (eval->parsed()) {
      if (roc->parsed()) return cmd_eval_roc(roc_pairs, roc_csv);
      if (kappa->parsed()) return cmd_eval_kappa(kappa_ratings);
      if (agg->parsed()) return cmd_eval_aggregate(agg_ratings, agg_scheme);
      if (score->parsed()) {
        return cmd_eval_score(score_timeline, score_truth, score_tracks, score_face_threshold);
      }
    }
    if (inspect->parsed()) {
      return cmd_inspect(ins_codebook, ins_timeline, ins_features, ins_truth,
                         ins_default_config);
    }
  } catch (const vf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const vf::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const vf::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 4;
  } catch (const vf::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
