// meshcount: command line front end over the C API.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "meshcount/meshcount.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Common {
  uint64_t seed = 0;
  std::string out;
};

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("meshcount");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("MESHCOUNT_LOG");
  if (env == nullptr) return;
  const std::map<std::string, spdlog::level::level_enum> levels{
      {"error", spdlog::level::err}, {"warn", spdlog::level::warn}, {"info", spdlog::level::info}, {"debug", spdlog::level::debug}};
  const auto it = levels.find(env);
  if (it == levels.end()) {
    spdlog::warn("ignoring MESHCOUNT_LOG={}, expected error, warn, info or debug", env);
    return;
  }
  spdlog::set_level(it->second);
}

const char* c_str_or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Seed for every random component")->capture_default_str();
  cmd->add_option("--out", c.out, "Report CSV path; a JSON twin is written beside it (default: CSV to stdout)");
}

void add_ransac(CLI::App* cmd, mc_ransac_options& r) {
  cmd->add_option("--ransac-iterations", r.max_iterations, "RANSAC iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--ransac-threshold", r.inlier_threshold, "Inlier symmetric transfer error in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--ransac-confidence", r.confidence, "Early-exit confidence")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

// Runs a command, then routes the report to --out or stdout.
int run(const char* name, const Common& common, const std::function<mc_status(mc_report**)>& command) {
  const auto started = std::chrono::steady_clock::now();
  mc_report* report = nullptr;
  const mc_status status = command(&report);
  if (status != MC_OK) {
    spdlog::error("{}: {}", name, mc_last_error());
    return mc_status_is_validation(status) ? kExitValidation : kExitRuntime;
  }
  int code = 0;
  if (common.out.empty()) {
    std::fputs(mc_report_csv(report), stdout);
  } else if (mc_report_write(report, common.out.c_str()) != MC_OK) {
    spdlog::error("{}: {}", name, mc_last_error());
    code = kExitRuntime;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  spdlog::info("{} finished in {:.3f} s, {} rows", name, secs, mc_report_row_count(report));
  mc_report_destroy(report);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Multi-camera counting simulator and counting evaluation tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mc_version());

  Common common;
  std::function<int()> action;

  // calibrate
  mc_calibrate_options cal;
  mc_calibrate_options_init(&cal);
  std::string cal_a, cal_b, cal_corr, cal_hout;
  auto* calibrate = app.add_subcommand("calibrate", "Estimate the homography between two views");
  add_common(calibrate, common);
  calibrate->add_option("--features-a", cal_a, "Feature CSV of the source view")->check(CLI::ExistingFile);
  calibrate->add_option("--features-b", cal_b, "Feature CSV of the target view")->check(CLI::ExistingFile);
  calibrate->add_option("--correspondences", cal_corr, "Correspondence CSV instead of features")
      ->check(CLI::ExistingFile)
      ->excludes("--features-a")
      ->excludes("--features-b");
  calibrate->add_option("--homography-out", cal_hout, "Write the 3x3 matrix here");
  calibrate->add_option("--ratio", cal.ratio, "Lowe ratio")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  calibrate->add_flag("--cross-check", cal.cross_check, "Keep only mutual nearest neighbours");
  calibrate->add_option("--max-dist", cal.max_dist, "Descriptor distance bound (<= 0: twice the median)");
  add_ransac(calibrate, cal.ransac);
  calibrate->callback([&] {
    action = [&] {
      cal.features_a = c_str_or_null(cal_a);
      cal.features_b = c_str_or_null(cal_b);
      cal.correspondences = c_str_or_null(cal_corr);
      cal.homography_out = c_str_or_null(cal_hout);
      cal.ransac.seed = common.seed;
      return run("calibrate", common, [&](mc_report** r) { return mc_calibrate(&cal, r); });
    };
  });

  // simulate
  mc_protocol_options proto;
  mc_protocol_options_init(&proto);
  std::string sim_scenario, sim_agg = "mean";
  auto* simulate = app.add_subcommand("simulate", "Run the counting protocol on a scenario");
  add_common(simulate, common);
  simulate->add_option("--scenario", sim_scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--tau", proto.tau, "IoU threshold for shared detections")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--agg", sim_agg, "Pair aggregation")->check(CLI::IsMember({"min", "max", "mean"}))->capture_default_str();
  simulate->add_option("--ratio", proto.ratio, "Lowe ratio")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  simulate->add_flag("--cross-check", proto.cross_check, "Keep only mutual nearest neighbours");
  simulate->add_option("--max-dist", proto.max_dist, "Descriptor distance bound (<= 0: twice the median)");
  simulate->add_flag("--true-homographies", proto.use_true_homographies, "Use the scenario's transforms");
  add_ransac(simulate, proto.ransac);
  simulate->callback([&] {
    action = [&] {
      proto.aggregation = sim_agg == "min" ? MC_AGG_MIN : sim_agg == "max" ? MC_AGG_MAX : MC_AGG_MEAN;
      proto.ransac.seed = common.seed;
      return run("simulate", common, [&](mc_report** r) { return mc_simulate(sim_scenario.c_str(), &proto, r); });
    };
  });

  // gen-scene
  mc_scene_options sc;
  mc_scene_options_init(&sc);
  std::string gen_out, gen_warp = "affine";
  auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic multi-camera scenario");
  add_common(gen, common);
  gen->add_option("--scenario", gen_out, "Output scenario JSON")->required();
  gen->add_option("--cameras", sc.n_cameras, "Number of cameras")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--width", sc.width, "Image width")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--height", sc.height, "Image height")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--vehicles", sc.n_vehicles, "Vehicles per frame")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--frames", sc.n_frames, "Frames")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--overlap", sc.overlap, "Overlap fraction of adjacent views")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen->add_option("--warp", gen_warp, "Warp family")
      ->check(CLI::IsMember({"translation", "affine", "projective"}))
      ->capture_default_str();
  gen->add_option("--drop", sc.drop_rate, "Detection drop rate")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  gen->add_option("--jitter", sc.jitter_px, "Vertex jitter in pixels")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--spurious", sc.spurious_rate, "False positive rate per camera and frame")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen->add_option("--keypoints", sc.keypoints_per_camera, "Keypoints per camera")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--descriptor-dim", sc.descriptor_dim, "Descriptor length")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--descriptor-noise", sc.descriptor_noise, "Descriptor noise")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->callback([&] {
    action = [&] {
      sc.warp = gen_warp == "translation" ? MC_WARP_TRANSLATION : gen_warp == "projective" ? MC_WARP_PROJECTIVE : MC_WARP_AFFINE;
      sc.seed = common.seed;
      return run("gen-scene", common, [&](mc_report** r) { return mc_gen_scene(&sc, gen_out.c_str(), r); });
    };
  });

  // density
  mc_density_options den;
  mc_density_options_init(&den);
  std::string den_dots, den_map, den_csv, den_kernel = "fixed";
  auto* dens = app.add_subcommand("density", "Render dot annotations into a density map");
  add_common(dens, common);
  dens->add_option("--dots", den_dots, "Dot CSV x,y[,sigma]")->required()->check(CLI::ExistingFile);
  dens->add_option("--height", den.height, "Map height")->required()->check(CLI::PositiveNumber);
  dens->add_option("--width", den.width, "Map width")->required()->check(CLI::PositiveNumber);
  dens->add_option("--kernel", den_kernel, "Kernel")->check(CLI::IsMember({"fixed", "per-point", "knn"}))->capture_default_str();
  dens->add_option("--sigma", den.sigma, "Fixed kernel sigma")->check(CLI::PositiveNumber)->capture_default_str();
  dens->add_option("--k", den.k, "Neighbours for the adaptive kernel")->check(CLI::PositiveNumber)->capture_default_str();
  dens->add_option("--beta", den.beta, "Adaptive kernel scale")->check(CLI::PositiveNumber)->capture_default_str();
  dens->add_option("--map", den_map, "Write the map as DMF1");
  dens->add_option("--map-csv", den_csv, "Write the map as CSV");
  dens->callback([&] {
    action = [&] {
      den.dots = den_dots.c_str();
      den.kernel = den_kernel == "knn" ? MC_KERNEL_KNN : den_kernel == "per-point" ? MC_KERNEL_PER_POINT : MC_KERNEL_FIXED;
      den.map_out = c_str_or_null(den_map);
      den.csv_out = c_str_or_null(den_csv);
      return run("density", common, [&](mc_report** r) { return mc_density(&den, r); });
    };
  });

  // eval-count
  mc_eval_count_options ec;
  mc_eval_count_options_init(&ec);
  std::string ec_pred, ec_gt;
  auto* evc = app.add_subcommand("eval-count", "Counting error metrics");
  add_common(evc, common);
  evc->add_option("--pred", ec_pred, "Predicted counts or density maps")->required()->check(CLI::ExistingFile);
  evc->add_option("--gt", ec_gt, "Ground-truth counts or density maps")->required()->check(CLI::ExistingFile);
  evc->add_option("--game", ec.game, "Highest GAME level")->check(CLI::Range(0, 12));
  evc->callback([&] {
    action = [&] {
      ec.pred = ec_pred.c_str();
      ec.gt = ec_gt.c_str();
      return run("eval-count", common, [&](mc_report** r) { return mc_eval_count(&ec, r); });
    };
  });

  // eval-detect
  mc_eval_detect_options ed;
  mc_eval_detect_options_init(&ed);
  std::string ed_pred, ed_gt, ed_matcher = "box";
  auto* evd = app.add_subcommand("eval-detect", "Detection precision, recall and AP");
  add_common(evd, common);
  evd->add_option("--pred", ed_pred, "Prediction CSV")->required()->check(CLI::ExistingFile);
  evd->add_option("--gt", ed_gt, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  evd->add_option("--matcher", ed_matcher, "Matching rule")->check(CLI::IsMember({"box", "point"}))->capture_default_str();
  evd->add_option("--iou", ed.iou_threshold, "Box IoU threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  evd->add_option("--radius", ed.radius, "Point matching radius")->check(CLI::PositiveNumber)->capture_default_str();
  evd->add_option("--score-threshold", ed.score_threshold, "Operating point for tp/fp/fn")->capture_default_str();
  evd->add_flag("--iou-sweep", ed.iou_sweep, "Also report mAP over IoU 0.50:0.95");
  evd->add_option("--min-agreement", ed.min_agreement, "Compare counts at this rater agreement")->check(CLI::NonNegativeNumber);
  evd->add_option("--raters", ed.raters, "Number of raters")->check(CLI::PositiveNumber)->capture_default_str();
  evd->callback([&] {
    action = [&] {
      ed.pred = ed_pred.c_str();
      ed.gt = ed_gt.c_str();
      ed.matcher = ed_matcher == "point" ? MC_MATCH_POINT : MC_MATCH_BOX;
      return run("eval-detect", common, [&](mc_report** r) { return mc_eval_detect(&ed, r); });
    };
  });

  // rescore-train
  mc_rescore_train_options rt;
  mc_rescore_train_options_init(&rt);
  std::string rt_samples, rt_model, rt_trace, rt_method = "OR";
  auto* rtrain = app.add_subcommand("rescore-train", "Train an agreement-aware scorer");
  add_common(rtrain, common);
  rtrain->add_option("--samples", rt_samples, "Sample CSV agreement,f0,...")->required()->check(CLI::ExistingFile);
  rtrain->add_option("--model", rt_model, "Output model file")->required();
  rtrain->add_option("--trace", rt_trace, "Output loss trace CSV");
  rtrain->add_option("--method", rt_method, "Training objective")->check(CLI::IsMember({"AR", "AC", "OR", "RL"}))->capture_default_str();
  rtrain->add_option("--raters", rt.raters, "Number of raters")->check(CLI::PositiveNumber)->capture_default_str();
  rtrain->add_option("--lr", rt.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber)->capture_default_str();
  rtrain->add_option("--epochs", rt.epochs, "Epochs")->check(CLI::NonNegativeNumber)->capture_default_str();
  rtrain->add_option("--batch-size", rt.batch_size, "Minibatch size")->check(CLI::PositiveNumber)->capture_default_str();
  rtrain->add_option("--margin", rt.margin, "Ranking margin")->check(CLI::NonNegativeNumber)->capture_default_str();
  rtrain->add_option("--tuples-per-epoch", rt.tuples_per_epoch, "Ranking tuples per epoch (0: one per sample)");
  rtrain->callback([&] {
    action = [&] {
      rt.samples = rt_samples.c_str();
      rt.model_out = rt_model.c_str();
      rt.trace_out = c_str_or_null(rt_trace);
      rt.method = rt_method == "AR" ? MC_METHOD_AR : rt_method == "AC" ? MC_METHOD_AC : rt_method == "RL" ? MC_METHOD_RL : MC_METHOD_OR;
      rt.seed = common.seed;
      return run("rescore-train", common, [&](mc_report** r) { return mc_rescore_train(&rt, r); });
    };
  });

  // rescore-eval
  mc_rescore_eval_options re;
  mc_rescore_eval_options_init(&re);
  std::string re_model, re_samples, re_dets, re_counts;
  std::optional<double> re_threshold;
  auto* reval = app.add_subcommand("rescore-eval", "Evaluate a scorer on samples or per-image counts");
  add_common(reval, common);
  reval->add_option("--model", re_model, "Model file")->required()->check(CLI::ExistingFile);
  auto* re_s = reval->add_option("--samples", re_samples, "Sample CSV")->check(CLI::ExistingFile);
  auto* re_d = reval->add_option("--detections", re_dets, "Detection features image_id,f0,...")->check(CLI::ExistingFile);
  auto* re_c = reval->add_option("--gt-counts", re_counts, "Ground-truth counts image_id,count")->check(CLI::ExistingFile);
  reval->add_option("--threshold", re_threshold, "Score threshold (default: tuned on the given images)");
  re_s->excludes(re_d)->excludes(re_c);
  re_d->needs(re_c);
  re_c->needs(re_d);
  reval->callback([&] {
    action = [&] {
      re.model = re_model.c_str();
      re.samples = c_str_or_null(re_samples);
      re.detections = c_str_or_null(re_dets);
      re.gt_counts = c_str_or_null(re_counts);
      re.has_threshold = re_threshold.has_value() ? 1 : 0;
      re.threshold = re_threshold.value_or(0.0);
      return run("rescore-eval", common, [&](mc_report** r) { return mc_rescore_eval(&re, r); });
    };
  });

  // sanitize-bboxes
  mc_sanitize_options sa;
  mc_sanitize_options_init(&sa);
  std::string sa_input, sa_calib;
  std::optional<double> sa_alpha;
  auto* san = app.add_subcommand("sanitize-bboxes", "Convert skeleton boxes to mesh boxes");
  add_common(san, common);
  san->add_option("--input", sa_input, "Box CSV h_s,w_s,z[,h_m]")->required()->check(CLI::ExistingFile);
  auto* sa_c = san->add_option("--calibration", sa_calib, "Calibration CSV h_s,w_s,z,h_m")->check(CLI::ExistingFile);
  san->add_option("--alpha", sa_alpha, "Known alpha; skips fitting")->excludes(sa_c);
  san->add_option("--max-z", sa.max_z, "Drop boxes farther than this")->check(CLI::PositiveNumber)->capture_default_str();
  san->callback([&] {
    action = [&] {
      sa.input = sa_input.c_str();
      sa.calibration = c_str_or_null(sa_calib);
      sa.has_alpha = sa_alpha.has_value() ? 1 : 0;
      sa.alpha = sa_alpha.value_or(0.0);
      return run("sanitize-bboxes", common, [&](mc_report** r) { return mc_sanitize_bboxes(&sa, r); });
    };
  });

  // distance-check
  mc_distance_options dc;
  mc_distance_options_init(&dc);
  std::string dc_pos, dc_h;
  auto* dist = app.add_subcommand("distance-check", "Flag people closer than a ground-plane distance");
  add_common(dist, common);
  dist->add_option("--positions", dc_pos, "Image positions x,y")->required()->check(CLI::ExistingFile);
  dist->add_option("--homography", dc_h, "Image to ground homography")->required()->check(CLI::ExistingFile);
  dist->add_option("--threshold", dc.threshold, "Minimum distance in ground units")->check(CLI::PositiveNumber)->capture_default_str();
  dist->callback([&] {
    action = [&] {
      dc.positions = dc_pos.c_str();
      dc.homography = dc_h.c_str();
      return run("distance-check", common, [&](mc_report** r) { return mc_distance_check(&dc, r); });
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "run with --help for usage\n");
    return kExitValidation;
  }
  return action ? action() : kExitValidation;
}
