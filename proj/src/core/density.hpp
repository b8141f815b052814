#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "core/geometry.hpp"

namespace meshcount::density {

using geometry::Point2;

// Row-major H x W grid of non-negative finite intensities.
class DensityMap {
 public:
  DensityMap(std::size_t height, std::size_t width);
  DensityMap(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const double> values() const noexcept { return values_; }

  double at(std::size_t row, std::size_t col) const noexcept { return values_[row * width_ + col]; }
  void add(std::size_t row, std::size_t col, double v) noexcept { values_[row * width_ + col] += v; }

  friend bool operator==(const DensityMap&, const DensityMap&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

class ProbabilityMap {
 public:
  ProbabilityMap(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

struct DotAnnotation {
  std::vector<Point2> points;
  // Either empty or one sigma per point.
  std::vector<double> sigmas;
};

struct KernelSpec {
  enum class Mode { Fixed, PerPoint, KnnAdaptive };

  Mode mode = Mode::Fixed;
  double sigma = 4.0;
  int k = 3;
  double beta = 0.3;

  static KernelSpec fixed(double sigma) { return {Mode::Fixed, sigma, 3, 0.3}; }
  static KernelSpec per_point() { return {Mode::PerPoint, 0.0, 3, 0.3}; }
  static KernelSpec knn(int k, double beta) { return {Mode::KnnAdaptive, 0.0, k, beta}; }
};

// Each dot stamps a Gaussian sampled at pixel centres, truncated at radius
// ceil(3 sigma) and clipped to the map, then renormalised to unit mass.
// Dots are accumulated in input order.
DensityMap dots_to_density(const DotAnnotation& dots, std::size_t height, std::size_t width,
                           const KernelSpec& kernel);

// sigma_i = beta * mean distance to the k nearest other dots.
std::vector<double> knn_sigmas(std::span<const Point2> dots, int k, double beta);

// Sum over all pixels, or over pixels whose centres lie inside `roi`.
double count(const DensityMap& map, const geometry::Polygon* roi = nullptr);

// Row-major sum over rows [r0, r1) and columns [c0, c1).
double region_sum(const DensityMap& map, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1);

// Peaks are pixel centres that dominate their (2d+1)^2 window, where equal
// values are ordered by (row, col); returned by value descending, ties by
// (row, col), at most n.
std::vector<Point2> local_peaks(const DensityMap& map, std::size_t n, std::size_t min_distance,
                                double min_value = 0.0);

inline constexpr double kProbabilityEpsilon = 1e-7;

double density_loss(const DensityMap& pred, const DensityMap& gt);
double adversarial_loss(const ProbabilityMap& p);
double discriminator_loss(const ProbabilityMap& p, bool domain_is_source);
double combined_loss(double density_term, double adv_term, double lambda_adv);

}  // namespace meshcount::density
