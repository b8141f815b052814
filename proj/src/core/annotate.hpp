#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace meshcount::annotate {

struct SkeletonBox {
  double h_s = 0.0;
  double w_s = 0.0;
  double z = 0.0;
};

struct CalibrationSample {
  double h_s = 0.0;
  double z = 0.0;
  double h_m = 0.0;
};

struct CalibrationFit {
  double alpha = 0.0;
  double residual_rmse = 0.0;
  std::size_t n_samples = 0;
  // Standard error of alpha from the residual variance (0 when n <= 1).
  double std_error = 0.0;
};

// Least squares for h_m = h_s + alpha / z.
CalibrationFit fit_alpha(std::span<const CalibrationSample> samples);

struct SanitizedBox {
  double h_m;
  double w_m;
};

SanitizedBox sanitize_box(const SkeletonBox& skel, double alpha);

inline constexpr double kDefaultMaxZ = 40.0;

std::vector<SkeletonBox> prune_far(std::span<const SkeletonBox> boxes, double max_z = kDefaultMaxZ);

}  // namespace meshcount::annotate
