#include "core/annotate.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"

namespace meshcount::annotate {

CalibrationFit fit_alpha(std::span<const CalibrationSample> samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!(s.z > 0.0 && std::isfinite(s.z) && std::isfinite(s.h_s) && std::isfinite(s.h_m)))
      fail(ErrorCode::InvalidArgument, "sample " + std::to_string(i) + " needs finite values and z > 0");
  }
  bool distinct = false;
  for (std::size_t i = 1; i < samples.size() && !distinct; ++i) distinct = samples[i].z != samples[0].z;
  if (samples.size() < 2 || !distinct)
    fail(ErrorCode::DegenerateSamples, "need at least two samples with distinct z");

  double num = 0.0, den = 0.0;
  for (const auto& s : samples) {
    num += (s.h_m - s.h_s) / s.z;
    den += 1.0 / (s.z * s.z);
  }
  CalibrationFit fit;
  fit.alpha = num / den;
  fit.n_samples = samples.size();
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = s.h_m - s.h_s - fit.alpha / s.z;
    sse += r * r;
  }
  const auto n = static_cast<double>(samples.size());
  fit.residual_rmse = std::sqrt(sse / n);
  fit.std_error = std::sqrt(sse / (n - 1.0) / den);
  return fit;
}

SanitizedBox sanitize_box(const SkeletonBox& skel, double alpha) {
  if (!(skel.h_s > 0.0 && skel.w_s > 0.0 && skel.z > 0.0))
    fail(ErrorCode::InvalidArgument, "skeleton box needs positive h_s, w_s and z");
  if (!std::isfinite(alpha)) fail(ErrorCode::InvalidArgument, "alpha must be finite");
  const double h = skel.h_s + alpha / skel.z;
  return {h, h * (skel.w_s / skel.h_s)};
}

std::vector<SkeletonBox> prune_far(std::span<const SkeletonBox> boxes, double max_z) {
  if (!(max_z > 0.0)) fail(ErrorCode::InvalidArgument, "max_z must be positive");
  std::vector<SkeletonBox> out;
  for (const auto& b : boxes)
    if (b.z <= max_z) out.push_back(b);
  return out;
}

}  // namespace meshcount::annotate
