#include "core/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace meshcount::density {

namespace {

void check_shape(std::size_t height, std::size_t width, std::size_t n) {
  if (height == 0 || width == 0) fail(ErrorCode::InvalidArgument, "map dimensions must be positive");
  if (n != height * width) fail(ErrorCode::ShapeMismatch, "value count does not match H x W");
}

std::vector<double> resolve_sigmas(const DotAnnotation& dots, const KernelSpec& kernel) {
  switch (kernel.mode) {
    case KernelSpec::Mode::Fixed:
      if (!(kernel.sigma > 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be positive");
      return std::vector<double>(dots.points.size(), kernel.sigma);
    case KernelSpec::Mode::PerPoint:
      if (dots.sigmas.size() != dots.points.size())
        fail(ErrorCode::InvalidArgument, "per-point kernel needs one sigma per dot");
      for (double s : dots.sigmas)
        if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "per-point sigma must be positive");
      return dots.sigmas;
    case KernelSpec::Mode::KnnAdaptive:
      if (dots.points.empty()) return {};
      return knn_sigmas(dots.points, kernel.k, kernel.beta);
  }
  return {};
}

}  // namespace

DensityMap::DensityMap(std::size_t height, std::size_t width)
    : DensityMap(height, width, std::vector<double>(height * width, 0.0)) {}

DensityMap::DensityMap(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_shape(height_, width_, values_.size());
  for (double v : values_)
    if (!(std::isfinite(v) && v >= 0.0)) fail(ErrorCode::InvalidArgument, "density values must be finite and >= 0");
}

ProbabilityMap::ProbabilityMap(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  check_shape(height_, width_, values_.size());
  for (double v : values_)
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidArgument, "probabilities must lie in [0,1]");
}

std::vector<double> knn_sigmas(std::span<const Point2> dots, int k, double beta) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "k must be positive");
  if (!(beta > 0.0)) fail(ErrorCode::InvalidArgument, "beta must be positive");
  if (dots.size() <= static_cast<std::size_t>(k))
    fail(ErrorCode::TooFewDots, "need more than k=" + std::to_string(k) + " dots, got " + std::to_string(dots.size()));
  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> sigmas;
  sigmas.reserve(dots.size());
  std::vector<double> d;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    d.clear();
    for (std::size_t j = 0; j < dots.size(); ++j)
      if (j != i) d.push_back(geometry::distance(dots[i], dots[j]));
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
    double mean = 0.0;
    for (std::size_t j = 0; j < kk; ++j) mean += d[j];
    mean /= static_cast<double>(kk);
    const double s = beta * mean;
    if (!(s > 0.0)) fail(ErrorCode::SigmaZero, "dot " + std::to_string(i) + " has zero neighbour distance");
    sigmas.push_back(s);
  }
  return sigmas;
}

DensityMap dots_to_density(const DotAnnotation& dots, std::size_t height, std::size_t width,
                           const KernelSpec& kernel) {
  DensityMap map(height, width);
  const auto w = static_cast<double>(width);
  const auto h = static_cast<double>(height);
  for (std::size_t i = 0; i < dots.points.size(); ++i) {
    const Point2 p = dots.points[i];
    if (!(p.x >= 0.0 && p.x < w && p.y >= 0.0 && p.y < h))
      fail(ErrorCode::OutOfBounds, "dot " + std::to_string(i) + " lies outside the map");
  }
  const std::vector<double> sigmas = resolve_sigmas(dots, kernel);

  std::vector<double> stamp;
  for (std::size_t i = 0; i < dots.points.size(); ++i) {
    const Point2 p = dots.points[i];
    const double sigma = sigmas[i];
    const auto radius = static_cast<long>(std::ceil(3.0 * sigma));
    const auto cx = static_cast<long>(std::floor(p.x));
    const auto cy = static_cast<long>(std::floor(p.y));
    const long c0 = std::max(0L, cx - radius);
    const long c1 = std::min(static_cast<long>(width) - 1, cx + radius);
    const long r0 = std::max(0L, cy - radius);
    const long r1 = std::min(static_cast<long>(height) - 1, cy + radius);

    stamp.assign(static_cast<std::size_t>((r1 - r0 + 1) * (c1 - c0 + 1)), 0.0);
    double total = 0.0;
    std::size_t k = 0;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (long r = r0; r <= r1; ++r)
      for (long c = c0; c <= c1; ++c, ++k) {
        const double dx = static_cast<double>(c) + 0.5 - p.x;
        const double dy = static_cast<double>(r) + 0.5 - p.y;
        stamp[k] = std::exp(-(dx * dx + dy * dy) * inv);
        total += stamp[k];
      }
    if (!(total > 0.0)) {
      // Kernel narrower than a pixel: all mass to the containing pixel.
      map.add(static_cast<std::size_t>(cy), static_cast<std::size_t>(cx), 1.0);
      continue;
    }
    k = 0;
    for (long r = r0; r <= r1; ++r)
      for (long c = c0; c <= c1; ++c, ++k)
        map.add(static_cast<std::size_t>(r), static_cast<std::size_t>(c), stamp[k] / total);
  }
  return map;
}

double region_sum(const DensityMap& map, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
  double acc = 0.0;
  for (std::size_t r = r0; r < r1; ++r)
    for (std::size_t c = c0; c < c1; ++c) acc += map.at(r, c);
  return acc;
}

double count(const DensityMap& map, const geometry::Polygon* roi) {
  if (roi == nullptr) return region_sum(map, 0, map.height(), 0, map.width());
  const auto b = roi->bounds();
  if (b.x0 < 0.0 || b.y0 < 0.0 || b.x1 > static_cast<double>(map.width()) ||
      b.y1 > static_cast<double>(map.height()))
    fail(ErrorCode::OutOfBounds, "roi exceeds the map");
  double acc = 0.0;
  for (std::size_t r = 0; r < map.height(); ++r)
    for (std::size_t c = 0; c < map.width(); ++c)
      if (roi->contains({static_cast<double>(c) + 0.5, static_cast<double>(r) + 0.5})) acc += map.at(r, c);
  return acc;
}

std::vector<Point2> local_peaks(const DensityMap& map, std::size_t n, std::size_t min_distance, double min_value) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "n must be positive");
  if (min_distance == 0) fail(ErrorCode::InvalidArgument, "min_distance must be positive");
  if (!(min_value >= 0.0)) fail(ErrorCode::InvalidArgument, "min_value must be >= 0");

  struct Peak {
    double value;
    std::size_t row, col;
  };
  std::vector<Peak> peaks;
  const auto H = static_cast<long>(map.height());
  const auto W = static_cast<long>(map.width());
  const auto d = static_cast<long>(min_distance);
  for (long r = 0; r < H; ++r)
    for (long c = 0; c < W; ++c) {
      const double v = map.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
      if (!(v > 0.0) || v < min_value) continue;
      bool dominant = true;
      for (long rr = std::max(0L, r - d); dominant && rr <= std::min(H - 1, r + d); ++rr)
        for (long cc = std::max(0L, c - d); cc <= std::min(W - 1, c + d); ++cc) {
          if (rr == r && cc == c) continue;
          const double u = map.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
          const bool precedes = rr < r || (rr == r && cc < c);
          if (u > v || (u == v && precedes)) {
            dominant = false;
            break;
          }
        }
      if (dominant) peaks.push_back({v, static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
    }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<Point2> out;
  const auto md = static_cast<double>(min_distance);
  for (const auto& p : peaks) {
    if (out.size() == n) break;
    const Point2 centre{static_cast<double>(p.col) + 0.5, static_cast<double>(p.row) + 0.5};
    const bool suppressed = std::any_of(out.begin(), out.end(),
                                        [&](Point2 q) { return geometry::distance(q, centre) <= md; });
    if (!suppressed) out.push_back(centre);
  }
  return out;
}

double density_loss(const DensityMap& pred, const DensityMap& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width())
    fail(ErrorCode::ShapeMismatch, "density maps differ in shape");
  double acc = 0.0;
  const auto a = pred.values();
  const auto b = gt.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double adversarial_loss(const ProbabilityMap& p) {
  double acc = 0.0;
  for (double v : p.values()) acc -= std::log(std::max(v, kProbabilityEpsilon));
  return acc;
}

double discriminator_loss(const ProbabilityMap& p, bool domain_is_source) {
  double acc = 0.0;
  for (double v : p.values()) {
    if (domain_is_source) acc -= std::log(std::max(v, kProbabilityEpsilon));
    else acc -= std::log(std::max(1.0 - v, kProbabilityEpsilon));
  }
  return acc;
}

double combined_loss(double density_term, double adv_term, double lambda_adv) {
  if (!(lambda_adv >= 0.0)) fail(ErrorCode::InvalidArgument, "lambda_adv must be >= 0");
  return density_term + lambda_adv * adv_term;
}

}  // namespace meshcount::density
