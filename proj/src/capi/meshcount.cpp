#include "meshcount/meshcount.h"

#include <new>
#include <string>

#include "core/codecs.hpp"
#include "core/commands.hpp"
#include "core/error.hpp"
#include "core/report.hpp"
#include "core/scene.hpp"

struct mc_report {
  meshcount::report::RunReport report;
  std::string csv;
  std::string json;
};

struct mc_scenario {
  meshcount::protocol::Scenario scenario;
  std::string source;
};

namespace {

using namespace meshcount;

thread_local std::string g_last_error;

mc_status to_status(ErrorCode c) { return static_cast<mc_status>(static_cast<int>(c) + 1); }

// Runs `fn`, converting exceptions into status codes and the thread-local message.
template <typename Fn>
mc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return MC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MC_ERR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MC_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

std::string str(const char* s) { return s ? std::string(s) : std::string(); }

mc_report* wrap(report::RunReport r) {
  auto* out = new mc_report{std::move(r), {}, {}};
  out->csv = report::to_csv(out->report);
  out->json = report::to_json(out->report);
  return out;
}

template <typename Fn>
mc_status run_command(mc_report** out, Fn&& fn) {
  return guarded([&] {
    need(out, "output pointer");
    *out = nullptr;
    *out = wrap(fn());
  });
}

geometry::RansacParams ransac_from(const mc_ransac_options& o) {
  geometry::RansacParams p;
  p.max_iterations = o.max_iterations;
  p.inlier_threshold = o.inlier_threshold;
  p.confidence = o.confidence;
  p.seed = o.seed;
  return p;
}

void ransac_defaults(mc_ransac_options* o) {
  const geometry::RansacParams p;
  o->max_iterations = p.max_iterations;
  o->inlier_threshold = p.inlier_threshold;
  o->confidence = p.confidence;
  o->seed = p.seed;
}

protocol::ProtocolConfig protocol_from(const mc_protocol_options& o) {
  protocol::ProtocolConfig c;
  c.tau = o.tau;
  switch (o.aggregation) {
    case MC_AGG_MIN: c.aggregation = protocol::Aggregation::Min; break;
    case MC_AGG_MAX: c.aggregation = protocol::Aggregation::Max; break;
    case MC_AGG_MEAN: c.aggregation = protocol::Aggregation::Mean; break;
    default: fail(ErrorCode::InvalidArgument, "unknown aggregation");
  }
  c.ratio = o.ratio;
  c.cross_check = o.cross_check != 0;
  c.max_dist = o.max_dist;
  c.use_true_homographies = o.use_true_homographies != 0;
  c.ransac = ransac_from(o.ransac);
  return c;
}

scene::SyntheticSceneSpec scene_from(const mc_scene_options& o) {
  scene::SyntheticSceneSpec s;
  s.n_cameras = o.n_cameras;
  s.width = o.width;
  s.height = o.height;
  s.n_vehicles = o.n_vehicles;
  s.n_frames = o.n_frames;
  s.overlap = o.overlap;
  switch (o.warp) {
    case MC_WARP_TRANSLATION: s.warp = scene::WarpFamily::Translation; break;
    case MC_WARP_AFFINE: s.warp = scene::WarpFamily::Affine; break;
    case MC_WARP_PROJECTIVE: s.warp = scene::WarpFamily::Projective; break;
    default: fail(ErrorCode::InvalidArgument, "unknown warp family");
  }
  s.noise = {o.drop_rate, o.jitter_px, o.spurious_rate};
  s.keypoints_per_camera = o.keypoints_per_camera;
  s.descriptor_dim = o.descriptor_dim;
  s.descriptor_noise = o.descriptor_noise;
  s.seed = o.seed;
  return s;
}

const report::Cell* cell_at(const mc_report* r, const report::Row& row, std::size_t column) {
  if (column >= r->report.columns.size()) fail(ErrorCode::IndexOutOfRange, "column out of range");
  return &row[column];
}

void numeric(const report::Cell* c, double* value) {
  need(value, "value");
  if (const auto* i = std::get_if<long long>(c))
    *value = static_cast<double>(*i);
  else if (const auto* d = std::get_if<double>(c))
    *value = *d;
  else
    fail(ErrorCode::InvalidArgument, "cell is not numeric");
}

}  // namespace

extern "C" {

const char* mc_version(void) { return "0.1.0"; }

const char* mc_status_string(mc_status status) {
  if (status == MC_OK) return "OK";
  if (status == MC_ERR_OUT_OF_MEMORY) return "OutOfMemory";
  if (status == MC_ERR_INTERNAL) return "Internal";
  if (status > MC_OK && status <= MC_ERR_PROTOCOL) return to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  return "Unknown";
}

const char* mc_last_error(void) { return g_last_error.c_str(); }

int mc_status_is_validation(mc_status status) {
  switch (status) {
    case MC_ERR_INVALID_ARGUMENT:
    case MC_ERR_DIMENSION_MISMATCH:
    case MC_ERR_INDEX_OUT_OF_RANGE:
    case MC_ERR_OUT_OF_BOUNDS:
    case MC_ERR_SHAPE_MISMATCH:
    case MC_ERR_EMPTY_INPUT:
    case MC_ERR_HEAD_MISMATCH:
    case MC_ERR_UNORDERED_THETAS:
    case MC_ERR_INFEASIBLE_OVERLAP:
    case MC_ERR_VALIDATION:
    case MC_ERR_PARSE: return 1;
    default: return 0;
  }
}

void mc_report_destroy(mc_report* report) { delete report; }

mc_status mc_report_write(const mc_report* r, const char* csv_path) {
  return guarded([&] {
    need(r, "report");
    need(csv_path, "path");
    report::write(r->report, csv_path);
  });
}

const char* mc_report_csv(const mc_report* r) { return r ? r->csv.c_str() : ""; }
const char* mc_report_json(const mc_report* r) { return r ? r->json.c_str() : ""; }
size_t mc_report_row_count(const mc_report* r) { return r ? r->report.rows.size() : 0; }
size_t mc_report_column_count(const mc_report* r) { return r ? r->report.columns.size() : 0; }

const char* mc_report_column_name(const mc_report* r, size_t column) {
  if (!r || column >= r->report.columns.size()) return nullptr;
  return r->report.columns[column].c_str();
}

mc_status mc_report_value(const mc_report* r, size_t row, size_t column, double* value) {
  return guarded([&] {
    need(r, "report");
    if (row >= r->report.rows.size()) fail(ErrorCode::IndexOutOfRange, "row out of range");
    numeric(cell_at(r, r->report.rows[row], column), value);
  });
}

int mc_report_has_summary(const mc_report* r) { return r && !r->report.summary.empty() ? 1 : 0; }

mc_status mc_report_summary_value(const mc_report* r, size_t column, double* value) {
  return guarded([&] {
    need(r, "report");
    if (r->report.summary.empty()) fail(ErrorCode::InvalidArgument, "report has no summary");
    numeric(cell_at(r, r->report.summary, column), value);
  });
}

void mc_protocol_options_init(mc_protocol_options* o) {
  if (!o) return;
  const protocol::ProtocolConfig c;
  o->tau = c.tau;
  o->aggregation = MC_AGG_MEAN;
  o->ratio = c.ratio;
  o->cross_check = c.cross_check ? 1 : 0;
  o->max_dist = c.max_dist;
  o->use_true_homographies = 0;
  ransac_defaults(&o->ransac);
}

void mc_scene_options_init(mc_scene_options* o) {
  if (!o) return;
  const scene::SyntheticSceneSpec s;
  o->n_cameras = s.n_cameras;
  o->width = s.width;
  o->height = s.height;
  o->n_vehicles = s.n_vehicles;
  o->n_frames = s.n_frames;
  o->overlap = s.overlap;
  o->warp = MC_WARP_AFFINE;
  o->drop_rate = s.noise.drop_rate;
  o->jitter_px = s.noise.jitter_px;
  o->spurious_rate = s.noise.spurious_rate;
  o->keypoints_per_camera = s.keypoints_per_camera;
  o->descriptor_dim = s.descriptor_dim;
  o->descriptor_noise = s.descriptor_noise;
  o->seed = s.seed;
}

mc_status mc_scenario_load(const char* path, mc_scenario** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "output pointer");
    *out = nullptr;
    *out = new mc_scenario{codecs::load_scenario(path), path};
  });
}

mc_status mc_scenario_generate(const mc_scene_options* options, mc_scenario** out) {
  return guarded([&] {
    need(options, "options");
    need(out, "output pointer");
    *out = nullptr;
    *out = new mc_scenario{scene::generate_scene(scene_from(*options)).scenario, "generated"};
  });
}

mc_status mc_scenario_save(const mc_scenario* s, const char* path) {
  return guarded([&] {
    need(s, "scenario");
    need(path, "path");
    codecs::save_scenario(s->scenario, path);
  });
}

size_t mc_scenario_node_count(const mc_scenario* s) { return s ? s->scenario.nodes.size() : 0; }
size_t mc_scenario_frame_count(const mc_scenario* s) { return s ? s->scenario.frame_ids().size() : 0; }
void mc_scenario_destroy(mc_scenario* s) { delete s; }

mc_status mc_scenario_simulate(const mc_scenario* s, const mc_protocol_options* options, mc_report** out) {
  return run_command(out, [&] {
    need(s, "scenario");
    need(options, "options");
    return commands::simulate(s->scenario, protocol_from(*options), s->source);
  });
}

void mc_calibrate_options_init(mc_calibrate_options* o) {
  if (!o) return;
  *o = {};
  o->ratio = matching::kDefaultRatio;
  ransac_defaults(&o->ransac);
}

mc_status mc_calibrate(const mc_calibrate_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    commands::CalibrateOptions c;
    c.features_a = str(o->features_a);
    c.features_b = str(o->features_b);
    c.correspondences = str(o->correspondences);
    c.homography_out = str(o->homography_out);
    c.matcher.ratio = o->ratio;
    c.matcher.cross_check = o->cross_check != 0;
    c.matcher.max_dist = o->max_dist;
    c.matcher.ransac = ransac_from(o->ransac);
    return commands::calibrate(c);
  });
}

mc_status mc_simulate(const char* scenario_path, const mc_protocol_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(scenario_path, "scenario path");
    need(o, "options");
    return commands::simulate(std::string(scenario_path), protocol_from(*o));
  });
}

mc_status mc_gen_scene(const mc_scene_options* o, const char* scenario_out, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(scenario_out, "scenario path");
    return commands::gen_scene({scene_from(*o), scenario_out});
  });
}

void mc_density_options_init(mc_density_options* o) {
  if (!o) return;
  *o = {};
  const density::KernelSpec k;
  o->kernel = MC_KERNEL_FIXED;
  o->sigma = k.sigma;
  o->k = k.k;
  o->beta = k.beta;
}

mc_status mc_density(const mc_density_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->dots, "dots path");
    commands::DensityOptions d;
    d.dots = o->dots;
    d.height = o->height;
    d.width = o->width;
    switch (o->kernel) {
      case MC_KERNEL_FIXED: d.kernel = density::KernelSpec::fixed(o->sigma); break;
      case MC_KERNEL_PER_POINT: d.kernel = density::KernelSpec::per_point(); break;
      case MC_KERNEL_KNN: d.kernel = density::KernelSpec::knn(o->k, o->beta); break;
      default: fail(ErrorCode::InvalidArgument, "unknown kernel");
    }
    d.map_out = str(o->map_out);
    d.csv_out = str(o->csv_out);
    return commands::density_map(d);
  });
}

void mc_eval_count_options_init(mc_eval_count_options* o) {
  if (!o) return;
  *o = {};
  o->game = -1;
}

mc_status mc_eval_count(const mc_eval_count_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->pred, "pred path");
    need(o->gt, "gt path");
    return commands::eval_count({o->pred, o->gt, o->game});
  });
}

void mc_eval_detect_options_init(mc_eval_detect_options* o) {
  if (!o) return;
  *o = {};
  const metrics::MatcherConfig m;
  o->matcher = MC_MATCH_BOX;
  o->iou_threshold = m.iou_threshold;
  o->radius = m.radius;
  o->raters = 7;
}

mc_status mc_eval_detect(const mc_eval_detect_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->pred, "pred path");
    need(o->gt, "gt path");
    commands::EvalDetectOptions e;
    e.pred = o->pred;
    e.gt = o->gt;
    if (o->matcher != MC_MATCH_BOX && o->matcher != MC_MATCH_POINT) fail(ErrorCode::InvalidArgument, "unknown matcher");
    e.matcher.kind = o->matcher == MC_MATCH_BOX ? metrics::MatcherConfig::Kind::Box : metrics::MatcherConfig::Kind::Point;
    e.matcher.iou_threshold = o->iou_threshold;
    e.matcher.radius = o->radius;
    e.score_threshold = o->score_threshold;
    e.iou_sweep = o->iou_sweep != 0;
    e.min_agreement = o->min_agreement;
    e.raters = o->raters;
    return commands::eval_detect(e);
  });
}

void mc_rescore_train_options_init(mc_rescore_train_options* o) {
  if (!o) return;
  *o = {};
  const rescoring::TrainConfig t;
  o->raters = 7;
  o->method = MC_METHOD_OR;
  o->learning_rate = t.learning_rate;
  o->epochs = t.epochs;
  o->batch_size = t.batch_size;
  o->margin = t.margin;
  o->tuples_per_epoch = t.tuples_per_epoch;
  o->seed = t.seed;
}

mc_status mc_rescore_train(const mc_rescore_train_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->samples, "samples path");
    commands::RescoreTrainOptions t;
    t.samples = o->samples;
    t.raters = o->raters;
    if (o->method < MC_METHOD_AR || o->method > MC_METHOD_RL) fail(ErrorCode::InvalidArgument, "unknown method");
    t.train.method = static_cast<rescoring::Method>(o->method);
    t.train.learning_rate = o->learning_rate;
    t.train.epochs = o->epochs;
    t.train.batch_size = o->batch_size;
    t.train.margin = o->margin;
    t.train.tuples_per_epoch = o->tuples_per_epoch;
    t.train.seed = o->seed;
    t.model_out = str(o->model_out);
    t.trace_out = str(o->trace_out);
    return commands::rescore_train(t);
  });
}

void mc_rescore_eval_options_init(mc_rescore_eval_options* o) {
  if (o) *o = {};
}

mc_status mc_rescore_eval(const mc_rescore_eval_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->model, "model path");
    commands::RescoreEvalOptions e;
    e.model = o->model;
    e.samples = str(o->samples);
    e.detections = str(o->detections);
    e.gt_counts = str(o->gt_counts);
    if (o->has_threshold) e.threshold = o->threshold;
    return commands::rescore_eval(e);
  });
}

void mc_sanitize_options_init(mc_sanitize_options* o) {
  if (!o) return;
  *o = {};
  o->max_z = annotate::kDefaultMaxZ;
}

mc_status mc_sanitize_bboxes(const mc_sanitize_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->input, "input path");
    commands::SanitizeOptions s;
    s.input = o->input;
    s.calibration = str(o->calibration);
    if (o->has_alpha) s.alpha = o->alpha;
    s.max_z = o->max_z;
    return commands::sanitize_bboxes(s);
  });
}

void mc_distance_options_init(mc_distance_options* o) {
  if (!o) return;
  *o = {};
  o->threshold = 1.0;
}

mc_status mc_distance_check(const mc_distance_options* o, mc_report** out) {
  return run_command(out, [&] {
    need(o, "options");
    need(o->positions, "positions path");
    need(o->homography, "homography path");
    return commands::distance_check({o->positions, o->homography, o->threshold});
  });
}

}  // extern "C"
