#pragma once

#include <span>
#include <vector>

#include "core/geometry.hpp"

namespace meshcount::matching {

struct Feature {
  geometry::Point2 keypoint;
  std::vector<double> descriptor;
};

struct Match {
  std::size_t idx_a = 0;
  std::size_t idx_b = 0;
  double dist = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

inline constexpr double kDefaultRatio = 0.75;

struct RatioMatchOptions {
  double ratio = kDefaultRatio;
  // Keep a match only if it is also the nearest neighbour in the B -> A direction.
  bool cross_check = false;
};

// Nearest-neighbour search over B for every feature of A with Lowe's ratio
// test (d1 < ratio * d2). With |B| == 1 the single candidate is kept.
std::vector<Match> ratio_match(std::span<const Feature> set_a, std::span<const Feature> set_b,
                               const RatioMatchOptions& options = {});

// Stable subset with dist < max_dist.
std::vector<Match> distance_filter(std::span<const Match> matches, double max_dist);

// 2 x median(dist); +inf when the median is zero or there are no matches, so
// that the filter never discards an exact-duplicate majority.
double default_max_dist(std::span<const Match> matches);

std::vector<geometry::Correspondence> to_correspondences(std::span<const Feature> set_a,
                                                         std::span<const Feature> set_b,
                                                         std::span<const Match> matches);

double descriptor_distance(std::span<const double> a, std::span<const double> b);

}  // namespace meshcount::matching
