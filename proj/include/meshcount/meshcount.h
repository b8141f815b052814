#ifndef MESHCOUNT_MESHCOUNT_H
#define MESHCOUNT_MESHCOUNT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MC_API __declspec(dllexport)
#else
#define MC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mc_status {
  MC_OK = 0,
  MC_ERR_INVALID_ARGUMENT,
  MC_ERR_TOO_FEW_POINTS,
  MC_ERR_DEGENERATE_CONFIGURATION,
  MC_ERR_NO_CONSENSUS,
  MC_ERR_POINT_AT_INFINITY,
  MC_ERR_DEGENERATE_POLYGON,
  MC_ERR_DIMENSION_MISMATCH,
  MC_ERR_INDEX_OUT_OF_RANGE,
  MC_ERR_OUT_OF_BOUNDS,
  MC_ERR_TOO_FEW_DOTS,
  MC_ERR_SIGMA_ZERO,
  MC_ERR_SHAPE_MISMATCH,
  MC_ERR_TOO_SMALL,
  MC_ERR_EMPTY_INPUT,
  MC_ERR_ZERO_GROUND_TRUTH,
  MC_ERR_CALIBRATION_FAILED,
  MC_ERR_HEAD_MISMATCH,
  MC_ERR_UNORDERED_THETAS,
  MC_ERR_BAD_TUPLE,
  MC_ERR_EMPTY_AGREEMENT_LEVEL,
  MC_ERR_CONSTANT_INPUT,
  MC_ERR_DEGENERATE_SAMPLES,
  MC_ERR_INFEASIBLE_OVERLAP,
  MC_ERR_VALIDATION,
  MC_ERR_PARSE,
  MC_ERR_IO,
  MC_ERR_PROTOCOL,
  MC_ERR_OUT_OF_MEMORY,
  MC_ERR_INTERNAL
} mc_status;

MC_API const char* mc_version(void);
MC_API const char* mc_status_string(mc_status status);
/* Message of the last failed call on this thread; "" after a success. */
MC_API const char* mc_last_error(void);
/* Nonzero when the status means the inputs or options were rejected rather
   than a computation failing. */
MC_API int mc_status_is_validation(mc_status status);

/* ---- Reports ------------------------------------------------------------ */

typedef struct mc_report mc_report;

MC_API void mc_report_destroy(mc_report* report);
/* Writes the CSV to `csv_path` and the JSON twin beside it. */
MC_API mc_status mc_report_write(const mc_report* report, const char* csv_path);
/* Strings stay valid until the report is destroyed. */
MC_API const char* mc_report_csv(const mc_report* report);
MC_API const char* mc_report_json(const mc_report* report);
MC_API size_t mc_report_row_count(const mc_report* report);
MC_API size_t mc_report_column_count(const mc_report* report);
MC_API const char* mc_report_column_name(const mc_report* report, size_t column);
/* Numeric cell; MC_ERR_INVALID_ARGUMENT for text or empty cells. */
MC_API mc_status mc_report_value(const mc_report* report, size_t row, size_t column, double* value);
MC_API int mc_report_has_summary(const mc_report* report);
MC_API mc_status mc_report_summary_value(const mc_report* report, size_t column, double* value);

/* ---- Shared option blocks ---------------------------------------------- */

typedef enum mc_aggregation { MC_AGG_MIN = 0, MC_AGG_MAX = 1, MC_AGG_MEAN = 2 } mc_aggregation;

typedef struct mc_ransac_options {
  int max_iterations;
  double inlier_threshold;
  double confidence;
  uint64_t seed;
} mc_ransac_options;

typedef struct mc_protocol_options {
  double tau;
  mc_aggregation aggregation;
  double ratio;
  int cross_check;
  /* <= 0 selects twice the median match distance. */
  double max_dist;
  int use_true_homographies;
  mc_ransac_options ransac;
} mc_protocol_options;

MC_API void mc_protocol_options_init(mc_protocol_options* options);

/* ---- Scenarios ----------------------------------------------------------- */

typedef struct mc_scenario mc_scenario;

typedef enum mc_warp { MC_WARP_TRANSLATION = 0, MC_WARP_AFFINE = 1, MC_WARP_PROJECTIVE = 2 } mc_warp;

typedef struct mc_scene_options {
  int n_cameras;
  int width;
  int height;
  int n_vehicles;
  int n_frames;
  double overlap;
  mc_warp warp;
  double drop_rate;
  double jitter_px;
  double spurious_rate;
  int keypoints_per_camera;
  int descriptor_dim;
  double descriptor_noise;
  uint64_t seed;
} mc_scene_options;

MC_API void mc_scene_options_init(mc_scene_options* options);

MC_API mc_status mc_scenario_load(const char* path, mc_scenario** out);
MC_API mc_status mc_scenario_generate(const mc_scene_options* options, mc_scenario** out);
MC_API mc_status mc_scenario_save(const mc_scenario* scenario, const char* path);
MC_API size_t mc_scenario_node_count(const mc_scenario* scenario);
MC_API size_t mc_scenario_frame_count(const mc_scenario* scenario);
MC_API void mc_scenario_destroy(mc_scenario* scenario);
MC_API mc_status mc_scenario_simulate(const mc_scenario* scenario, const mc_protocol_options* options,
                                      mc_report** out);

/* ---- Commands: one entry point per tool, inputs named by path ----------- */

typedef struct mc_calibrate_options {
  const char* features_a;
  const char* features_b;
  const char* correspondences;
  const char* homography_out;
  double ratio;
  int cross_check;
  double max_dist;
  mc_ransac_options ransac;
} mc_calibrate_options;

MC_API void mc_calibrate_options_init(mc_calibrate_options* options);
MC_API mc_status mc_calibrate(const mc_calibrate_options* options, mc_report** out);

MC_API mc_status mc_simulate(const char* scenario_path, const mc_protocol_options* options, mc_report** out);

/* Writes the scenario JSON and one descriptor CSV per camera beside it. */
MC_API mc_status mc_gen_scene(const mc_scene_options* options, const char* scenario_out, mc_report** out);

typedef enum mc_kernel { MC_KERNEL_FIXED = 0, MC_KERNEL_PER_POINT = 1, MC_KERNEL_KNN = 2 } mc_kernel;

typedef struct mc_density_options {
  const char* dots;
  size_t height;
  size_t width;
  mc_kernel kernel;
  double sigma;
  int k;
  double beta;
  const char* map_out;
  const char* csv_out;
} mc_density_options;

MC_API void mc_density_options_init(mc_density_options* options);
MC_API mc_status mc_density(const mc_density_options* options, mc_report** out);

typedef struct mc_eval_count_options {
  const char* pred;
  const char* gt;
  /* Highest GAME level, negative to skip. */
  int game;
} mc_eval_count_options;

MC_API void mc_eval_count_options_init(mc_eval_count_options* options);
MC_API mc_status mc_eval_count(const mc_eval_count_options* options, mc_report** out);

typedef enum mc_matcher { MC_MATCH_BOX = 0, MC_MATCH_POINT = 1 } mc_matcher;

typedef struct mc_eval_detect_options {
  const char* pred;
  const char* gt;
  mc_matcher matcher;
  double iou_threshold;
  double radius;
  double score_threshold;
  int iou_sweep;
  int min_agreement;
  int raters;
} mc_eval_detect_options;

MC_API void mc_eval_detect_options_init(mc_eval_detect_options* options);
MC_API mc_status mc_eval_detect(const mc_eval_detect_options* options, mc_report** out);

typedef enum mc_method { MC_METHOD_AR = 0, MC_METHOD_AC = 1, MC_METHOD_OR = 2, MC_METHOD_RL = 3 } mc_method;

typedef struct mc_rescore_train_options {
  const char* samples;
  int raters;
  mc_method method;
  double learning_rate;
  int epochs;
  size_t batch_size;
  double margin;
  size_t tuples_per_epoch;
  uint64_t seed;
  const char* model_out;
  const char* trace_out;
} mc_rescore_train_options;

MC_API void mc_rescore_train_options_init(mc_rescore_train_options* options);
MC_API mc_status mc_rescore_train(const mc_rescore_train_options* options, mc_report** out);

typedef struct mc_rescore_eval_options {
  const char* model;
  const char* samples;
  const char* detections;
  const char* gt_counts;
  int has_threshold;
  double threshold;
} mc_rescore_eval_options;

MC_API void mc_rescore_eval_options_init(mc_rescore_eval_options* options);
MC_API mc_status mc_rescore_eval(const mc_rescore_eval_options* options, mc_report** out);

typedef struct mc_sanitize_options {
  const char* input;
  const char* calibration;
  int has_alpha;
  double alpha;
  double max_z;
} mc_sanitize_options;

MC_API void mc_sanitize_options_init(mc_sanitize_options* options);
MC_API mc_status mc_sanitize_bboxes(const mc_sanitize_options* options, mc_report** out);

typedef struct mc_distance_options {
  const char* positions;
  const char* homography;
  double threshold;
} mc_distance_options;

MC_API void mc_distance_options_init(mc_distance_options* options);
MC_API mc_status mc_distance_check(const mc_distance_options* options, mc_report** out);

#ifdef __cplusplus
}
#endif

#endif
