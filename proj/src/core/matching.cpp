#include "core/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace meshcount::matching {

namespace {

std::size_t common_dimension(std::span<const Feature> a, std::span<const Feature> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptyInput, "feature sets must be non-empty");
  const std::size_t d = a.front().descriptor.size();
  if (d == 0) fail(ErrorCode::DimensionMismatch, "descriptor length must be >= 1");
  auto check = [d](std::span<const Feature> set, const char* name) {
    for (const auto& f : set) {
      if (f.descriptor.size() != d)
        fail(ErrorCode::DimensionMismatch, std::string("descriptor length mismatch in set ") + name);
      for (double v : f.descriptor)
        if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite descriptor value");
    }
  };
  check(a, "A");
  check(b, "B");
  return d;
}

struct Nearest {
  std::size_t best = 0;
  double d1 = std::numeric_limits<double>::infinity();
  double d2 = std::numeric_limits<double>::infinity();
};

Nearest nearest_two(const Feature& q, std::span<const Feature> set) {
  Nearest n;
  for (std::size_t j = 0; j < set.size(); ++j) {
    const double d = descriptor_distance(q.descriptor, set[j].descriptor);
    if (d < n.d1) {
      n.d2 = n.d1;
      n.d1 = d;
      n.best = j;
    } else if (d < n.d2) {
      n.d2 = d;
    }
  }
  return n;
}

}  // namespace

double descriptor_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::vector<Match> ratio_match(std::span<const Feature> set_a, std::span<const Feature> set_b,
                               const RatioMatchOptions& options) {
  if (!(options.ratio > 0.0 && options.ratio < 1.0)) fail(ErrorCode::InvalidArgument, "ratio must lie in (0,1)");
  common_dimension(set_a, set_b);

  std::vector<Match> out;
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    const Nearest n = nearest_two(set_a[i], set_b);
    const bool keep = set_b.size() == 1 || n.d1 < options.ratio * n.d2;
    if (!keep) continue;
    if (options.cross_check && nearest_two(set_b[n.best], set_a).best != i) continue;
    out.push_back({i, n.best, n.d1});
  }
  return out;
}

std::vector<Match> distance_filter(std::span<const Match> matches, double max_dist) {
  if (!(max_dist > 0.0)) fail(ErrorCode::InvalidArgument, "max_dist must be positive");
  std::vector<Match> out;
  std::copy_if(matches.begin(), matches.end(), std::back_inserter(out),
               [max_dist](const Match& m) { return m.dist < max_dist; });
  return out;
}

double default_max_dist(std::span<const Match> matches) {
  if (matches.empty()) return std::numeric_limits<double>::infinity();
  std::vector<double> d;
  d.reserve(matches.size());
  for (const auto& m : matches) d.push_back(m.dist);
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid), d.end());
  double median = d[mid];
  if (d.size() % 2 == 0) {
    const double lower = *std::max_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median > 0.0 ? 2.0 * median : std::numeric_limits<double>::infinity();
}

std::vector<geometry::Correspondence> to_correspondences(std::span<const Feature> set_a,
                                                         std::span<const Feature> set_b,
                                                         std::span<const Match> matches) {
  std::vector<geometry::Correspondence> out;
  out.reserve(matches.size());
  for (const auto& m : matches) {
    if (m.idx_a >= set_a.size() || m.idx_b >= set_b.size())
      fail(ErrorCode::IndexOutOfRange, "match index out of range");
    out.push_back({set_a[m.idx_a].keypoint, set_b[m.idx_b].keypoint});
  }
  return out;
}

}  // namespace meshcount::matching
