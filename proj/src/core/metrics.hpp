#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "core/density.hpp"
#include "core/geometry.hpp"

namespace meshcount::metrics {

using geometry::Point2;
using geometry::Polygon;

struct CountPair {
  double gt = 0.0;
  double pred = 0.0;
};

double mae(std::span<const CountPair> pairs);
double mse(std::span<const CountPair> pairs);
double rmse(std::span<const CountPair> pairs);
double mare(std::span<const CountPair> pairs);

// Sum of |region count difference| over the 4^L quadrant regions of one map
// pair. Odd extents give the extra row/column to the first half.
double game_image(const density::DensityMap& pred, const density::DensityMap& gt, int levels);
double game(std::span<const density::DensityMap> pred, std::span<const density::DensityMap> gt, int levels);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

double ssim(const density::DensityMap& a, const density::DensityMap& b);

using Shape = std::variant<Polygon, Point2>;

struct ScoredDetection {
  Shape shape;
  double score = 1.0;
  int class_id = 0;
};

struct GroundTruth {
  Shape shape;
  int class_id = 0;
  // Number of raters that labelled the object; 0 when not recorded.
  int agreement = 0;
};

struct MatchedPair {
  std::size_t pred;
  std::size_t gt;
  // 1 - IoU for boxes, Euclidean distance for points.
  double cost;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<MatchedPair> pairs;
};

// Greedy by descending score (ties by index): each prediction takes the
// unmatched ground truth of highest IoU >= threshold.
MatchResult match_boxes(std::span<const ScoredDetection> preds, std::span<const Polygon> gts, double iou_threshold);

inline constexpr double kPointGateFactor = 1.25;

// Minimum-cost assignment with pairs farther than 1.25 * radius never matched.
MatchResult match_points(std::span<const ScoredDetection> preds, std::span<const Point2> gts, double radius);

// Rectangular assignment minimising total cost; result[i] is the column of
// row i or -1. Every row is assigned when rows <= cols.
std::vector<long> hungarian(const std::vector<std::vector<double>>& cost);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrecisionRecall precision_recall_f1(const MatchResult& m);
double accuracy(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

struct MatcherConfig {
  enum class Kind { Box, Point };
  Kind kind = Kind::Box;
  double iou_threshold = 0.5;
  double radius = 1.0;
};

struct ImageDetections {
  std::vector<ScoredDetection> preds;
  std::vector<GroundTruth> gts;
};

struct CurvePoint {
  double threshold;
  double recall;
  double precision;
};

struct PrCurve {
  std::vector<CurvePoint> curve;
  double ap = 0.0;
};

MatchResult match_image(const ImageDetections& image, const MatcherConfig& config, double min_score);

// Sweeps every distinct prediction score, descending. Only detections of
// `class_id` take part unless it is negative.
PrCurve pr_curve_and_ap(std::span<const ImageDetections> images, const MatcherConfig& config, int class_id = -1);

// Area under the right-envelope of (recall, precision) samples.
double average_precision(std::span<const CurvePoint> curve);

double mean_ap(std::span<const double> per_class_ap);

std::vector<double> coco_iou_thresholds();

// Mean over ground-truth classes, then over the box IoU thresholds.
double mean_ap_sweep(std::span<const ImageDetections> images, std::span<const double> iou_thresholds);

// gt counts objects with agreement >= min_agreement; pred counts predictions
// with score >= score_threshold.
std::vector<CountPair> agreement_filtered_counts(std::span<const ImageDetections> images, int min_agreement,
                                                 int raters, double score_threshold);

}  // namespace meshcount::metrics
