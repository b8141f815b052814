#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/density.hpp"
#include "core/metrics.hpp"
#include "core/protocol.hpp"
#include "core/report.hpp"
#include "core/rescoring.hpp"
#include "core/scene.hpp"

// One function per command line tool. Inputs are file paths; every function
// validates its options before reading anything.
namespace meshcount::commands {

struct CalibrateOptions {
  // Either both feature files or a correspondence file.
  std::string features_a;
  std::string features_b;
  std::string correspondences;
  protocol::ProtocolConfig matcher;
  // Optional path for the recovered a -> b transform.
  std::string homography_out;
};

report::RunReport calibrate(const CalibrateOptions& options);

report::RunReport simulate(const std::string& scenario_path, const protocol::ProtocolConfig& config);
// `label` is echoed as the scenario source.
report::RunReport simulate(const protocol::Scenario& scenario, const protocol::ProtocolConfig& config,
                           const std::string& label);

struct GenSceneOptions {
  scene::SyntheticSceneSpec spec;
  // Scenario JSON; descriptors go to "<stem>.node<id>.csv" beside it.
  std::string scenario_out;
};

report::RunReport gen_scene(const GenSceneOptions& options);

struct DensityOptions {
  std::string dots;
  std::size_t height = 0;
  std::size_t width = 0;
  density::KernelSpec kernel;
  std::string map_out;  // DMF1, optional
  std::string csv_out;  // grid CSV, optional
};

report::RunReport density_map(const DensityOptions& options);

struct EvalCountOptions {
  std::string pred;
  std::string gt;
  // Highest GAME level; negative skips GAME. Levels above 0 need density maps.
  int game = -1;
};

report::RunReport eval_count(const EvalCountOptions& options);

struct EvalDetectOptions {
  std::string pred;
  std::string gt;
  metrics::MatcherConfig matcher;
  // Operating point for the tp/fp/fn columns.
  double score_threshold = 0.0;
  // Also report mAP averaged over the 0.50:0.05:0.95 IoU sweep (boxes only).
  bool iou_sweep = false;
  // When positive, also compare counts against objects with at least this
  // agreement.
  int min_agreement = 0;
  int raters = 7;
};

report::RunReport eval_detect(const EvalDetectOptions& options);

struct RescoreTrainOptions {
  std::string samples;
  int raters = 7;
  rescoring::TrainConfig train;
  std::string model_out;
  std::string trace_out;  // optional
};

report::RunReport rescore_train(const RescoreTrainOptions& options);

struct RescoreEvalOptions {
  std::string model;
  // Sample mode: agreement correlation.
  std::string samples;
  // Count mode: per-image detections and ground-truth counts.
  std::string detections;
  std::string gt_counts;
  // Count mode threshold; tuned on the given images when absent.
  std::optional<double> threshold;
};

report::RunReport rescore_eval(const RescoreEvalOptions& options);

struct SanitizeOptions {
  std::string input;
  // Calibration rows h_s,w_s,z,h_m; when empty, rows of `input` carrying h_m
  // are used.
  std::string calibration;
  std::optional<double> alpha;
  double max_z = 40.0;
};

report::RunReport sanitize_bboxes(const SanitizeOptions& options);

struct DistanceCheckOptions {
  std::string positions;
  std::string homography;
  double threshold = 1.0;
};

report::RunReport distance_check(const DistanceCheckOptions& options);

}  // namespace meshcount::commands
