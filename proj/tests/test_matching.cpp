#include <algorithm>
#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/matching.hpp"
#include "doctest.h"

using namespace meshcount;
using namespace meshcount::matching;

namespace {

Feature feat(double x, double y, std::vector<double> d) { return {{x, y}, std::move(d)}; }

std::vector<double> random_descriptor(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = n(rng);
  return v;
}

}  // namespace

TEST_CASE("ratio_match: exact descriptor among well-separated candidates") {
  const std::vector<Feature> a{feat(1, 1, {0, 0, 0})};
  const std::vector<Feature> b{feat(2, 2, {0, 0, 0}), feat(3, 3, {10, 10, 10})};
  const auto m = ratio_match(a, b);
  REQUIRE(m.size() == 1);
  CHECK(m[0].idx_b == 0);
  CHECK(m[0].dist == 0.0);
}

TEST_CASE("ratio_match: ambiguous nearest pair is rejected") {
  const std::vector<Feature> a{feat(0, 0, {0, 0})};
  const std::vector<Feature> b{feat(0, 0, {1.0, 0}), feat(0, 0, {0, 1.2})};
  CHECK(ratio_match(a, b, {0.75}).empty());
  // 1.0 < 0.9 * 1.2 = 1.08 holds for ratio 0.9.
  CHECK(ratio_match(a, b, {0.9}).size() == 1);
}

TEST_CASE("ratio_match: single candidate is kept unconditionally") {
  const std::vector<Feature> a{feat(0, 0, {5, 5})};
  const std::vector<Feature> b{feat(0, 0, {0, 0})};
  CHECK(ratio_match(a, b).size() == 1);
}

TEST_CASE("ratio_match: errors") {
  const std::vector<Feature> a{feat(0, 0, {1, 2})};
  const std::vector<Feature> b{feat(0, 0, {1, 2, 3})};
  CHECK_THROWS_AS(ratio_match(a, b), Error);
  try {
    ratio_match(a, b);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("ratio_match: noisy pairs among distractors") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> noise(0.0, 0.05);
  const int d = 32;
  std::vector<Feature> a, b;
  for (int i = 0; i < 100; ++i) {
    auto base = random_descriptor(rng, d);
    auto copy = base;
    for (auto& v : copy) v += noise(rng);
    a.push_back(feat(i, 0, base));
    b.push_back(feat(i, 1, copy));
  }
  for (int i = 0; i < 100; ++i) b.push_back(feat(-1, -1, random_descriptor(rng, d)));
  std::shuffle(b.begin(), b.end(), rng);

  const auto matches = ratio_match(a, b, {0.75});
  int correct = 0, wrong = 0;
  for (const auto& m : matches) {
    if (b[m.idx_b].keypoint.x == a[m.idx_a].keypoint.x) ++correct;
    else ++wrong;
  }
  CHECK(correct >= 90);
  CHECK(wrong <= 2);

  // Properties: size bound, reported distance, monotonicity in ratio.
  CHECK(matches.size() <= a.size());
  for (const auto& m : matches)
    CHECK(std::abs(m.dist - descriptor_distance(a[m.idx_a].descriptor, b[m.idx_b].descriptor)) <= 1e-9);
  std::size_t prev = matches.size();
  for (double r : {0.7, 0.5, 0.3, 0.1}) {
    const auto fewer = ratio_match(a, b, {r});
    CHECK(fewer.size() <= prev);
    for (const auto& m : fewer) CHECK(std::find(matches.begin(), matches.end(), m) != matches.end());
    prev = fewer.size();
  }

  const auto checked = ratio_match(a, b, {0.75, true});
  CHECK(checked.size() <= matches.size());
}

TEST_CASE("distance_filter") {
  const std::vector<Match> m{{0, 0, 0.5}, {1, 1, 2.0}, {2, 2, 1.0}, {3, 3, 3.0}};
  CHECK(distance_filter(m, 10.0) == m);
  CHECK(distance_filter(m, 0.1).empty());

  const auto kept = distance_filter(m, 2.0);
  std::vector<Match> oracle;
  for (const auto& x : m)
    if (x.dist < 2.0) oracle.push_back(x);
  CHECK(kept == oracle);
  CHECK(distance_filter(kept, 2.0) == kept);
}

TEST_CASE("default_max_dist") {
  const std::vector<Match> m{{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}};
  CHECK(default_max_dist(m) == 4.0);
  const std::vector<Match> zeros{{0, 0, 0.0}, {1, 1, 0.0}, {2, 2, 5.0}};
  CHECK(std::isinf(default_max_dist(zeros)));
}

TEST_CASE("to_correspondences") {
  const std::vector<Feature> a{feat(1, 2, {0}), feat(3, 4, {1})};
  const std::vector<Feature> b{feat(5, 6, {0}), feat(7, 8, {1})};
  CHECK(to_correspondences(a, b, std::vector<Match>{}).empty());

  const std::vector<Match> one{{1, 0, 0.0}};
  const auto c = to_correspondences(a, b, one);
  REQUIRE(c.size() == 1);
  CHECK(c[0].src == geometry::Point2{3, 4});
  CHECK(c[0].dst == geometry::Point2{5, 6});

  const std::vector<Match> fwd{{0, 0, 0}, {1, 1, 0}};
  const std::vector<Match> rev{{1, 1, 0}, {0, 0, 0}};
  const auto cf = to_correspondences(a, b, fwd);
  const auto cr = to_correspondences(a, b, rev);
  CHECK(cf[0].src == cr[1].src);
  CHECK(cf[1].dst == cr[0].dst);

  const std::vector<Match> bad{{5, 0, 0.0}};
  CHECK_THROWS_AS(to_correspondences(a, b, bad), Error);
}
