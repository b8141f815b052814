#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "core/metrics.hpp"
#include "support.hpp"

using namespace meshcount;
using namespace meshcount::metrics;
using density::DensityMap;
using testsupport::code_of;

namespace {

DensityMap random_map(std::mt19937_64& rng, std::size_t h, std::size_t w, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  std::vector<double> v(h * w);
  for (auto& x : v) x = u(rng);
  return DensityMap(h, w, v);
}

// Sliding-window SSIM with centred second moments.
double ssim_oracle(const DensityMap& a, const DensityMap& b) {
  double lo = 1e300, hi = -1e300;
  for (double v : a.values()) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : b.values()) lo = std::min(lo, v), hi = std::max(hi, v);
  const double R = hi > lo ? hi - lo : 1.0;
  const double C1 = std::pow(0.01 * R, 2), C2 = std::pow(0.03 * R, 2);
  double g[11][11], gs = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) gs += g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
  double total = 0.0;
  int n = 0;
  for (std::size_t r = 0; r + 11 <= a.height(); ++r)
    for (std::size_t c = 0; c + 11 <= a.width(); ++c) {
      double mx = 0, my = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          mx += g[i][j] / gs * a.at(r + i, c + j);
          my += g[i][j] / gs * b.at(r + i, c + j);
        }
      double vx = 0, vy = 0, cxy = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double dx = a.at(r + i, c + j) - mx, dy = b.at(r + i, c + j) - my;
          vx += g[i][j] / gs * dx * dx;
          vy += g[i][j] / gs * dy * dy;
          cxy += g[i][j] / gs * dx * dy;
        }
      total += (2 * mx * my + C1) * (2 * cxy + C2) / ((mx * mx + my * my + C1) * (vx + vy + C2));
      ++n;
    }
  return total / n;
}

ScoredDetection point_det(double x, double y, double score = 1.0) { return {Point2{x, y}, score, 0}; }
ScoredDetection box_det(double x0, double y0, double x1, double y1, double score, int cls = 0) {
  return {Polygon::rectangle(x0, y0, x1, y1), score, cls};
}
GroundTruth box_gt(double x0, double y0, double x1, double y1, int cls = 0) {
  return {Polygon::rectangle(x0, y0, x1, y1), cls, 0};
}

// Exhaustive search over injective assignments of the smaller side, ordered
// by (number of gated pairs, total cost).
std::pair<std::size_t, double> brute_assignment(const std::vector<Point2>& p, const std::vector<Point2>& g, double gate) {
  const bool flip = p.size() > g.size();
  const auto& small = flip ? g : p;
  const auto& large = flip ? p : g;
  std::vector<std::size_t> perm(large.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::pair<std::size_t, double> best{~std::size_t{0}, 0.0};
  do {
    std::size_t matched = 0;
    double cost = 0.0;
    for (std::size_t i = 0; i < small.size(); ++i) {
      const double d = geometry::distance(small[i], large[perm[i]]);
      if (d <= gate) {
        ++matched;
        cost += d;
      }
    }
    const std::size_t gated = small.size() - matched;
    if (gated < best.first || (gated == best.first && cost < best.second)) best = {gated, cost};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {small.size() - best.first, best.second};
}

// Rebuilds the curve from scratch at every threshold and integrates the
// envelope from the highest recall downward.
double ap_oracle(const std::vector<ImageDetections>& imgs, const MatcherConfig& cfg) {
  std::vector<double> ts;
  std::size_t total_gt = 0;
  for (const auto& im : imgs) {
    total_gt += im.gts.size();
    for (const auto& p : im.preds) ts.push_back(p.score);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<std::pair<double, double>> rp;
  for (double t : ts) {
    std::size_t tp = 0, n = 0;
    for (const auto& im : imgs) {
      const auto m = match_image(im, cfg, t);
      tp += m.tp;
      n += m.tp + m.fp;
    }
    rp.push_back({total_gt ? double(tp) / total_gt : 0.0, n ? double(tp) / n : 0.0});
  }
  std::sort(rp.begin(), rp.end());
  double ap = 0.0, env = 0.0;
  for (std::size_t i = rp.size(); i-- > 0;) {
    env = std::max(env, rp[i].second);
    const bool first_of_recall = i == 0 || rp[i - 1].first != rp[i].first;
    if (!first_of_recall) continue;
    const double prev = i == 0 ? 0.0 : rp[i - 1].first;
    ap += (rp[i].first - prev) * env;
  }
  return ap;
}

}  // namespace

TEST_CASE("count error metrics") {
  const std::vector<CountPair> same{{5, 5}}, two{{5, 3}, {5, 7}}, one{{0, 10}};
  CHECK(mae(same) == 0.0);
  CHECK(mae(two) == 2.0);
  CHECK(mae(one) == 10.0);
  CHECK(mse(two) == 4.0);
  CHECK(rmse(two) == 2.0);
  CHECK(mse(same) == 0.0);
  CHECK(mare(std::vector<CountPair>{{10, 9}}) == doctest::Approx(0.1));
  CHECK(mare(std::vector<CountPair>{{10, 10}}) == 0.0);
  CHECK(code_of([&] { mare(one); }) == ErrorCode::ZeroGroundTruth);
  CHECK(code_of([] { mae({}); }) == ErrorCode::EmptyInput);
  CHECK(code_of([] { rmse({}); }) == ErrorCode::EmptyInput);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<CountPair> v(1 + t % 9);
    for (auto& p : v) p = {u(rng), u(rng)};
    CHECK(rmse(v) * rmse(v) == doctest::Approx(mse(v)).epsilon(1e-12));
    CHECK(rmse(v) >= mae(v) - 1e-12);
  }
}

TEST_CASE("GAME") {
  std::vector<double> g(64, 0.0), p(64, 0.0);
  // Four objects in the top-left quadrant vs four in the top-right.
  g[0] = g[1] = g[8] = g[9] = 1.0;
  p[6] = p[7] = p[14] = p[15] = 1.0;
  const std::vector<DensityMap> gt{DensityMap(8, 8, g)}, pred{DensityMap(8, 8, p)};
  CHECK(game(pred, gt, 0) == 0.0);
  CHECK(game(pred, gt, 1) == 8.0);
  CHECK(game(gt, gt, 3) == 0.0);
  CHECK(code_of([] {
          std::vector<DensityMap> a{DensityMap(3, 4)}, b{DensityMap(4, 3)};
          game(a, b, 1);
        }) == ErrorCode::ShapeMismatch);

  // Odd extents: the first half receives the extra row and column.
  std::vector<double> odd(9, 0.0);
  odd[4] = 1.0;  // centre pixel (1,1) falls in the top-left quadrant
  const DensityMap z(3, 3), o(3, 3, odd);
  CHECK(game_image(o, z, 1) == 1.0);
  std::vector<double> odd2(9, 0.0);
  odd2[0] = 1.0;
  CHECK(game_image(o, DensityMap(3, 3, odd2), 1) == 0.0);
  CHECK(game_image(o, DensityMap(3, 3, odd2), 2) == 2.0);

  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const std::size_t h = 5 + t, w = 7 + 2 * t;
    std::vector<DensityMap> a, b;
    std::vector<CountPair> counts;
    for (int i = 0; i < 3; ++i) {
      a.push_back(random_map(rng, h, w));
      b.push_back(random_map(rng, h, w));
      counts.push_back({density::count(b.back()), density::count(a.back())});
    }
    CHECK(game(a, b, 0) == mae(counts));
    double prev = game(a, b, 0);
    for (int L = 1; L <= 4; ++L) {
      const double cur = game(a, b, L);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("SSIM") {
  std::mt19937_64 rng(3);
  const auto a = random_map(rng, 16, 20), b = random_map(rng, 16, 20);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ssim(a, b) - ssim_oracle(a, b)) < 1e-9);
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK(ssim(a, b) >= -1.0);
  CHECK(ssim(a, b) <= 1.0);

  std::vector<double> inv(a.values().begin(), a.values().end());
  for (auto& v : inv) v = 2.0 - v;
  CHECK(ssim(a, DensityMap(16, 20, inv)) < 1.0);

  for (int t = 0; t < 10; ++t) {
    const auto x = random_map(rng, 11 + t, 13 + t, 0.1 + t), y = random_map(rng, 11 + t, 13 + t, 0.1 + t);
    CHECK(std::abs(ssim(x, y) - ssim_oracle(x, y)) < 1e-9);
  }
  CHECK(ssim(DensityMap(12, 12), DensityMap(12, 12)) == doctest::Approx(1.0));
  CHECK(code_of([] { ssim(DensityMap(10, 20), DensityMap(10, 20)); }) == ErrorCode::TooSmall);
  CHECK(code_of([] { ssim(DensityMap(12, 20), DensityMap(20, 12)); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("box matching") {
  const std::vector<Polygon> gts{Polygon::rectangle(0, 0, 10, 10), Polygon::rectangle(20, 20, 30, 30)};
  const std::vector<ScoredDetection> exact{box_det(0, 0, 10, 10, 0.9), box_det(20, 20, 30, 30, 0.8)};
  auto m = match_boxes(exact, gts, 0.5);
  CHECK(m.tp == 2);
  CHECK(m.fp == 0);
  CHECK(m.fn == 0);

  const std::vector<ScoredDetection> none{box_det(50, 50, 60, 60, 0.9), box_det(70, 0, 80, 5, 0.3)};
  m = match_boxes(none, gts, 0.5);
  CHECK(m.tp == 0);
  CHECK(m.fp == 2);
  CHECK(m.fn == 2);

  // Both predictions overlap the first box enough; the higher score wins in
  // either input order.
  for (int order = 0; order < 2; ++order) {
    std::vector<ScoredDetection> two{box_det(0, 0, 10, 10, 0.4), box_det(1, 0, 11, 10, 0.7)};
    if (order) std::swap(two[0], two[1]);
    m = match_boxes(two, std::vector<Polygon>{gts[0]}, 0.5);
    CHECK(m.tp == 1);
    CHECK(m.fp == 1);
    REQUIRE(m.pairs.size() == 1);
    CHECK(two[m.pairs[0].pred].score == 0.7);
  }
  CHECK(code_of([&] { match_boxes(exact, gts, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Hungarian point matching") {
  const std::vector<Point2> g{{0, 0}, {10, 0}, {0, 10}};
  std::vector<ScoredDetection> same;
  for (auto q : g) same.push_back(point_det(q.x, q.y));
  auto m = match_points(same, g, 2.0);
  CHECK(m.tp == 3);
  for (const auto& pr : m.pairs) CHECK(pr.cost == 0.0);

  // Greedy in prediction order takes (2,0)->(1,0) and leaves a sqrt(10) pair;
  // the optimum costs 1 + sqrt(2).
  const std::vector<Point2> g2{{1, 0}, {3, 0}};
  const std::vector<ScoredDetection> cross{point_det(2, 0), point_det(0, 1)};
  m = match_points(cross, g2, 10.0);
  CHECK(m.tp == 2);
  double total = 0.0;
  for (const auto& pr : m.pairs) total += pr.cost;
  CHECK(total == doctest::Approx(1.0 + std::sqrt(2.0)));
  CHECK(total < 1.0 + std::sqrt(10.0));

  const std::vector<ScoredDetection> far{point_det(100, 100), point_det(-50, 3)};
  m = match_points(far, g, 2.0);
  CHECK(m.tp == 0);
  CHECK(m.fp == 2);
  CHECK(m.fn == 3);

  // Gate is 1.25 * radius inclusive.
  m = match_points(std::vector<ScoredDetection>{point_det(2.5, 0)}, std::vector<Point2>{{0, 0}}, 2.0);
  CHECK(m.tp == 1);
  m = match_points(std::vector<ScoredDetection>{point_det(2.5001, 0)}, std::vector<Point2>{{0, 0}}, 2.0);
  CHECK(m.tp == 0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 150; ++t) {
    const std::size_t np = 1 + t % 7, ng = 1 + (t / 7) % 8;
    std::vector<Point2> pts, gts;
    std::vector<ScoredDetection> dets;
    for (std::size_t i = 0; i < np; ++i) {
      pts.push_back({u(rng), u(rng)});
      dets.push_back(point_det(pts.back().x, pts.back().y));
    }
    for (std::size_t i = 0; i < ng; ++i) gts.push_back({u(rng), u(rng)});
    const double radius = 1.0 + 0.3 * (t % 5);
    m = match_points(dets, gts, radius);
    const auto [bm, bc] = brute_assignment(pts, gts, 1.25 * radius);
    double cost = 0.0;
    for (const auto& pr : m.pairs) cost += pr.cost;
    CHECK(m.tp == bm);
    CHECK(cost == doctest::Approx(bc).epsilon(1e-9));
    CHECK(m.tp + m.fp == np);
    CHECK(m.tp + m.fn == ng);
  }
}

TEST_CASE("precision recall f1 and accuracy") {
  MatchResult m;
  m.tp = 8, m.fp = 2, m.fn = 2;
  auto r = precision_recall_f1(m);
  CHECK(r.precision == doctest::Approx(0.8));
  CHECK(r.recall == doctest::Approx(0.8));
  CHECK(r.f1 == doctest::Approx(0.8));
  r = precision_recall_f1(MatchResult{});
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  CHECK(r.f1 == 0.0);
  m.fp = m.fn = 0;
  r = precision_recall_f1(m);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(accuracy(3, 1, 4, 2) == doctest::Approx(0.7));
  CHECK(accuracy(0, 0, 0, 0) == 0.0);
}

TEST_CASE("PR curve and AP") {
  const MatcherConfig boxes{MatcherConfig::Kind::Box, 0.5, 1.0};
  std::vector<ImageDetections> perfect{{{box_det(0, 0, 10, 10, 0.9)}, {box_gt(0, 0, 10, 10)}}};
  CHECK(pr_curve_and_ap(perfect, boxes).ap == 1.0);

  std::vector<ImageDetections> wrong{{{box_det(50, 50, 60, 60, 0.9), box_det(70, 70, 80, 80, 0.3)}, {box_gt(0, 0, 10, 10)}}};
  CHECK(pr_curve_and_ap(wrong, boxes).ap == 0.0);

  // Five ranked predictions over two images, four ground truths:
  // ranks TP, FP, TP, FP, TP give (r,p) = (.25,1) (.25,.5) (.5,.667) (.5,.5) (.75,.6)
  // and AP = .25*1 + .25*(2/3) + .25*.6.
  std::vector<ImageDetections> hand{
      {{box_det(0, 0, 10, 10, 0.95), box_det(40, 40, 50, 50, 0.85), box_det(100, 0, 110, 10, 0.55)},
       {box_gt(0, 0, 10, 10), box_gt(100, 0, 110, 10)}},
      {{box_det(20, 20, 30, 30, 0.75), box_det(60, 60, 70, 70, 0.65)},
       {box_gt(20, 20, 30, 30), box_gt(200, 200, 210, 210)}}};
  // Expected ranking: 0.95 TP, 0.85 FP, 0.75 TP, 0.65 FP, 0.55 TP.
  const auto res = pr_curve_and_ap(hand, boxes);
  REQUIRE(res.curve.size() == 5);
  CHECK(res.curve[2].recall == doctest::Approx(0.5));
  CHECK(res.curve[2].precision == doctest::Approx(2.0 / 3.0));
  CHECK(res.ap == doctest::Approx(0.25 + 0.25 * 2.0 / 3.0 + 0.25 * 0.6));
  CHECK(res.ap == doctest::Approx(ap_oracle(hand, boxes)).epsilon(1e-12));

  // Random scenes against the from-scratch oracle, both matchers, and under a
  // strictly monotone score transform.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    std::vector<ImageDetections> bimgs, pimgs;
    for (int i = 0; i < 3; ++i) {
      ImageDetections bi, pi;
      const int ng = 1 + static_cast<int>(u(rng) * 5), np = static_cast<int>(u(rng) * 7);
      for (int k = 0; k < ng; ++k) {
        const double x = u(rng) * 80, y = u(rng) * 80;
        bi.gts.push_back(box_gt(x, y, x + 10, y + 10));
        pi.gts.push_back({Point2{x, y}, 0, 0});
      }
      for (int k = 0; k < np; ++k) {
        const double x = u(rng) * 80, y = u(rng) * 80, s = std::round(u(rng) * 10) / 10;
        bi.preds.push_back(box_det(x, y, x + 10, y + 10, s));
        pi.preds.push_back(point_det(x, y, s));
      }
      bimgs.push_back(bi);
      pimgs.push_back(pi);
    }
    const MatcherConfig pts{MatcherConfig::Kind::Point, 0.5, 8.0};
    const double ab = pr_curve_and_ap(bimgs, boxes).ap, apt = pr_curve_and_ap(pimgs, pts).ap;
    CHECK(ab == doctest::Approx(ap_oracle(bimgs, boxes)).epsilon(1e-12));
    CHECK(apt == doctest::Approx(ap_oracle(pimgs, pts)).epsilon(1e-12));
    for (auto* set : {&bimgs, &pimgs})
      for (auto& im : *set)
        for (auto& p : im.preds) p.score = p.score * p.score * 0.5;
    CHECK(pr_curve_and_ap(bimgs, boxes).ap == ab);
    CHECK(pr_curve_and_ap(pimgs, pts).ap == apt);
  }
}

TEST_CASE("mean AP") {
  CHECK(mean_ap(std::vector<double>{0.7}) == 0.7);
  CHECK(mean_ap(std::vector<double>{1.0, 0.0}) == 0.5);
  CHECK(code_of([] { mean_ap({}); }) == ErrorCode::EmptyInput);

  const auto sweep = coco_iou_thresholds();
  REQUIRE(sweep.size() == 10);
  CHECK(sweep.front() == 0.5);
  CHECK(sweep.back() == doctest::Approx(0.95));

  // Class 0 found exactly, class 1 missed, so every threshold gives 0.5.
  std::vector<ImageDetections> imgs{{{box_det(0, 0, 10, 10, 0.9, 0), box_det(50, 50, 60, 60, 0.8, 1)},
                                     {box_gt(0, 0, 10, 10, 0), box_gt(20, 20, 30, 30, 1)}}};
  CHECK(mean_ap_sweep(imgs, sweep) == doctest::Approx(0.5));
  const std::vector<double> same{0.5, 0.5, 0.5};
  CHECK(mean_ap_sweep(imgs, same) == mean_ap_sweep(imgs, std::vector<double>{0.5}));

  // A shifted box: IoU 9/11 passes up to 0.80 only.
  std::vector<ImageDetections> shifted{{{box_det(1, 0, 11, 10, 0.9)}, {box_gt(0, 0, 10, 10)}}};
  CHECK(mean_ap_sweep(shifted, sweep) == doctest::Approx(0.7));
}

TEST_CASE("agreement filtered counts") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> a(1, 7), n(0, 12);
  std::uniform_real_distribution<double> s(0.0, 1.0);
  std::vector<ImageDetections> imgs(5);
  for (auto& im : imgs) {
    const int ng = n(rng), np = n(rng);
    for (int i = 0; i < ng; ++i) im.gts.push_back({Point2{1.0 * i, 0}, 0, a(rng)});
    for (int i = 0; i < np; ++i) im.preds.push_back(point_det(i, 1, s(rng)));
  }
  for (int level : {1, 4, 5, 7}) {
    const auto counts = agreement_filtered_counts(imgs, level, 7, 0.5);
    REQUIRE(counts.size() == imgs.size());
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      const auto gt = std::count_if(imgs[i].gts.begin(), imgs[i].gts.end(), [&](auto& g) { return g.agreement >= level; });
      const auto pr = std::count_if(imgs[i].preds.begin(), imgs[i].preds.end(), [](auto& p) { return p.score >= 0.5; });
      CHECK(counts[i].gt == static_cast<double>(gt));
      CHECK(counts[i].pred == static_cast<double>(pr));
      if (level == 1) CHECK(counts[i].gt == static_cast<double>(imgs[i].gts.size()));
    }
  }
  CHECK(code_of([&] { agreement_filtered_counts(imgs, 8, 7, 0.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { agreement_filtered_counts(imgs, 0, 7, 0.5); }) == ErrorCode::InvalidArgument);
}
