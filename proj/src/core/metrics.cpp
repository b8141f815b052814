#include "core/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "core/error.hpp"

namespace meshcount::metrics {

namespace {

void require_non_empty(std::span<const CountPair> pairs) {
  if (pairs.empty()) fail(ErrorCode::EmptyInput, "no count pairs");
  for (const auto& p : pairs)
    if (!(std::isfinite(p.gt) && std::isfinite(p.pred) && p.gt >= 0.0 && p.pred >= 0.0))
      fail(ErrorCode::InvalidArgument, "counts must be finite and >= 0");
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void game_regions(const density::DensityMap& pred, const density::DensityMap& gt, std::size_t r0, std::size_t r1,
                  std::size_t c0, std::size_t c1, int levels, double& acc) {
  if (levels == 0) {
    acc += std::abs(density::region_sum(gt, r0, r1, c0, c1) - density::region_sum(pred, r0, r1, c0, c1));
    return;
  }
  const std::size_t rm = r0 + (r1 - r0 + 1) / 2;
  const std::size_t cm = c0 + (c1 - c0 + 1) / 2;
  game_regions(pred, gt, r0, rm, c0, cm, levels - 1, acc);
  game_regions(pred, gt, r0, rm, cm, c1, levels - 1, acc);
  game_regions(pred, gt, rm, r1, c0, cm, levels - 1, acc);
  game_regions(pred, gt, rm, r1, cm, c1, levels - 1, acc);
}

const Polygon& as_polygon(const Shape& s) {
  if (const auto* p = std::get_if<Polygon>(&s)) return *p;
  fail(ErrorCode::InvalidArgument, "box matching needs polygon shapes");
}

Point2 as_point(const Shape& s) {
  if (const auto* p = std::get_if<Point2>(&s)) return *p;
  fail(ErrorCode::InvalidArgument, "point matching needs point shapes");
}

void check_score(double s) {
  if (!(s >= 0.0 && s <= 1.0)) fail(ErrorCode::InvalidArgument, "scores must lie in [0,1]");
}

ImageDetections filter_class(const ImageDetections& image, int class_id) {
  if (class_id < 0) return image;
  ImageDetections out;
  for (const auto& p : image.preds)
    if (p.class_id == class_id) out.preds.push_back(p);
  for (const auto& g : image.gts)
    if (g.class_id == class_id) out.gts.push_back(g);
  return out;
}

}  // namespace

double mae(std::span<const CountPair> pairs) {
  require_non_empty(pairs);
  double acc = 0.0;
  for (const auto& p : pairs) acc += std::abs(p.gt - p.pred);
  return acc / static_cast<double>(pairs.size());
}

double mse(std::span<const CountPair> pairs) {
  require_non_empty(pairs);
  double acc = 0.0;
  for (const auto& p : pairs) acc += (p.gt - p.pred) * (p.gt - p.pred);
  return acc / static_cast<double>(pairs.size());
}

double rmse(std::span<const CountPair> pairs) { return std::sqrt(mse(pairs)); }

double mare(std::span<const CountPair> pairs) {
  require_non_empty(pairs);
  double acc = 0.0;
  for (const auto& p : pairs) {
    if (p.gt == 0.0) fail(ErrorCode::ZeroGroundTruth, "relative error undefined for a zero ground-truth count");
    acc += std::abs(p.gt - p.pred) / p.gt;
  }
  return acc / static_cast<double>(pairs.size());
}

double game_image(const density::DensityMap& pred, const density::DensityMap& gt, int levels) {
  if (levels < 0) fail(ErrorCode::InvalidArgument, "GAME level must be >= 0");
  if (pred.height() != gt.height() || pred.width() != gt.width())
    fail(ErrorCode::ShapeMismatch, "GAME maps differ in shape");
  double acc = 0.0;
  game_regions(pred, gt, 0, gt.height(), 0, gt.width(), levels, acc);
  return acc;
}

double game(std::span<const density::DensityMap> pred, std::span<const density::DensityMap> gt, int levels) {
  if (pred.size() != gt.size()) fail(ErrorCode::ShapeMismatch, "GAME needs one prediction per ground truth");
  if (pred.empty()) fail(ErrorCode::EmptyInput, "no maps");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += game_image(pred[i], gt[i], levels);
  return acc / static_cast<double>(pred.size());
}

double ssim(const density::DensityMap& a, const density::DensityMap& b) {
  if (a.height() != b.height() || a.width() != b.width()) fail(ErrorCode::ShapeMismatch, "SSIM maps differ in shape");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow)
    fail(ErrorCode::TooSmall, "SSIM needs maps of at least 11x11");

  const auto [amin, amax] = std::minmax_element(a.values().begin(), a.values().end());
  const auto [bmin, bmax] = std::minmax_element(b.values().begin(), b.values().end());
  double range = std::max(*amax, *bmax) - std::min(*amin, *bmin);
  if (range == 0.0) range = 1.0;
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);

  std::array<double, kSsimWindow * kSsimWindow> w{};
  const double half = static_cast<double>(kSsimWindow - 1) / 2.0;
  double wsum = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i)
    for (std::size_t j = 0; j < kSsimWindow; ++j) {
      const double dy = static_cast<double>(i) - half, dx = static_cast<double>(j) - half;
      w[i * kSsimWindow + j] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSsimSigma * kSsimSigma));
      wsum += w[i * kSsimWindow + j];
    }
  for (auto& x : w) x /= wsum;

  double acc = 0.0;
  std::size_t windows = 0;
  for (std::size_t r = 0; r + kSsimWindow <= a.height(); ++r)
    for (std::size_t c = 0; c + kSsimWindow <= a.width(); ++c) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t i = 0; i < kSsimWindow; ++i)
        for (std::size_t j = 0; j < kSsimWindow; ++j) {
          const double wk = w[i * kSsimWindow + j];
          const double va = a.at(r + i, c + j), vb = b.at(r + i, c + j);
          ma += wk * va;
          mb += wk * vb;
          saa += wk * va * va;
          sbb += wk * vb * vb;
          sab += wk * va * vb;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  return acc / static_cast<double>(windows);
}

MatchResult match_boxes(std::span<const ScoredDetection> preds, std::span<const Polygon> gts, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) fail(ErrorCode::InvalidArgument, "IoU threshold must lie in (0,1]");
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return preds[x].score > preds[y].score; });

  MatchResult out;
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t pi : order) {
    const Polygon& box = as_polygon(preds[pi].shape);
    double best = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = geometry::iou(box, gts[g]);
      if (v >= iou_threshold && v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best >= 0.0) {
      taken[best_gt] = true;
      out.pairs.push_back({pi, best_gt, 1.0 - best});
    }
  }
  out.tp = out.pairs.size();
  out.fp = preds.size() - out.tp;
  out.fn = gts.size() - out.tp;
  return out;
}

std::vector<long> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t rows = cost.size();
  if (rows == 0) return {};
  const std::size_t cols = cost[0].size();
  for (const auto& row : cost)
    if (row.size() != cols) fail(ErrorCode::ShapeMismatch, "ragged cost matrix");
  if (cols == 0) return std::vector<long>(rows, -1);

  if (rows > cols) {
    std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t[j][i] = cost[i][j];
    const auto col_to_row = hungarian(t);
    std::vector<long> out(rows, -1);
    for (std::size_t j = 0; j < cols; ++j)
      if (col_to_row[j] >= 0) out[static_cast<std::size_t>(col_to_row[j])] = static_cast<long>(j);
    return out;
  }

  // Shortest augmenting path with potentials, 1-based with a virtual column 0.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
  for (std::size_t i = 1; i <= rows; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(cols + 1, inf);
    std::vector<bool> used(cols + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<long> out(rows, -1);
  for (std::size_t j = 1; j <= cols; ++j)
    if (p[j] != 0) out[p[j] - 1] = static_cast<long>(j - 1);
  return out;
}

MatchResult match_points(std::span<const ScoredDetection> preds, std::span<const Point2> gts, double radius) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  const double gate = kPointGateFactor * radius;
  MatchResult out;
  std::vector<Point2> pts;
  pts.reserve(preds.size());
  for (const auto& p : preds) pts.push_back(as_point(p.shape));

  if (!pts.empty() && !gts.empty()) {
    std::vector<std::vector<double>> cost(pts.size(), std::vector<double>(gts.size()));
    std::vector<std::vector<bool>> gated(pts.size(), std::vector<bool>(gts.size()));
    double finite_total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < gts.size(); ++j) {
        cost[i][j] = geometry::distance(pts[i], gts[j]);
        gated[i][j] = cost[i][j] > gate;
        if (!gated[i][j]) finite_total += cost[i][j];
      }
    // Exceeds any sum of admissible costs, so fewer gated pairs always wins.
    const double sentinel = 1.0 + finite_total;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < gts.size(); ++j)
        if (gated[i][j]) cost[i][j] = sentinel;
    const auto assign = hungarian(cost);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (assign[i] < 0) continue;
      const auto j = static_cast<std::size_t>(assign[i]);
      if (!gated[i][j]) out.pairs.push_back({i, j, cost[i][j]});
    }
  }
  out.tp = out.pairs.size();
  out.fp = preds.size() - out.tp;
  out.fn = gts.size() - out.tp;
  return out;
}

PrecisionRecall precision_recall_f1(const MatchResult& m) {
  PrecisionRecall r;
  r.precision = ratio(m.tp, m.tp + m.fp);
  r.recall = ratio(m.tp, m.tp + m.fn);
  const double s = r.precision + r.recall;
  r.f1 = s == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / s;
  return r;
}

double accuracy(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  return ratio(tp + tn, tp + fp + tn + fn);
}

MatchResult match_image(const ImageDetections& image, const MatcherConfig& config, double min_score) {
  std::vector<ScoredDetection> kept;
  for (const auto& p : image.preds) {
    check_score(p.score);
    if (p.score >= min_score) kept.push_back(p);
  }
  if (config.kind == MatcherConfig::Kind::Box) {
    std::vector<Polygon> gts;
    gts.reserve(image.gts.size());
    for (const auto& g : image.gts) gts.push_back(as_polygon(g.shape));
    return match_boxes(kept, gts, config.iou_threshold);
  }
  std::vector<Point2> gts;
  gts.reserve(image.gts.size());
  for (const auto& g : image.gts) gts.push_back(as_point(g.shape));
  return match_points(kept, gts, config.radius);
}

double average_precision(std::span<const CurvePoint> curve) {
  std::vector<double> recalls;
  for (const auto& c : curve) recalls.push_back(c.recall);
  std::sort(recalls.begin(), recalls.end());
  recalls.erase(std::unique(recalls.begin(), recalls.end()), recalls.end());
  double ap = 0.0, prev = 0.0;
  for (double r : recalls) {
    double best = 0.0;
    for (const auto& c : curve)
      if (c.recall >= r) best = std::max(best, c.precision);
    ap += (r - prev) * best;
    prev = r;
  }
  return ap;
}

PrCurve pr_curve_and_ap(std::span<const ImageDetections> images, const MatcherConfig& config, int class_id) {
  std::vector<ImageDetections> imgs;
  imgs.reserve(images.size());
  std::size_t total_gt = 0;
  std::vector<double> scores;
  for (const auto& im : images) {
    imgs.push_back(filter_class(im, class_id));
    total_gt += imgs.back().gts.size();
    for (const auto& p : imgs.back().preds) {
      check_score(p.score);
      scores.push_back(p.score);
    }
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  // Lowering the threshold only changes images that own a prediction at the
  // new score, so only those are re-matched.
  std::vector<std::size_t> tp(imgs.size(), 0), kept(imgs.size(), 0);
  std::size_t tp_total = 0, kept_total = 0;
  PrCurve out;
  for (double t : scores) {
    for (std::size_t i = 0; i < imgs.size(); ++i) {
      const bool touched = std::any_of(imgs[i].preds.begin(), imgs[i].preds.end(),
                                       [t](const ScoredDetection& p) { return p.score == t; });
      if (!touched) continue;
      const MatchResult m = match_image(imgs[i], config, t);
      tp_total = tp_total - tp[i] + m.tp;
      kept_total = kept_total - kept[i] + (m.tp + m.fp);
      tp[i] = m.tp;
      kept[i] = m.tp + m.fp;
    }
    out.curve.push_back({t, ratio(tp_total, total_gt), ratio(tp_total, kept_total)});
  }
  out.ap = average_precision(out.curve);
  return out;
}

double mean_ap(std::span<const double> per_class_ap) {
  if (per_class_ap.empty()) fail(ErrorCode::EmptyInput, "no AP values");
  double acc = 0.0;
  for (double v : per_class_ap) acc += v;
  return acc / static_cast<double>(per_class_ap.size());
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(0.5 + 0.05 * i);
  return out;
}

double mean_ap_sweep(std::span<const ImageDetections> images, std::span<const double> iou_thresholds) {
  if (iou_thresholds.empty()) fail(ErrorCode::EmptyInput, "no IoU thresholds");
  std::set<int> classes;
  for (const auto& im : images)
    for (const auto& g : im.gts) classes.insert(g.class_id);
  if (classes.empty()) fail(ErrorCode::EmptyInput, "no ground-truth objects");
  std::vector<double> per_threshold;
  for (double thr : iou_thresholds) {
    MatcherConfig cfg{MatcherConfig::Kind::Box, thr, 1.0};
    std::vector<double> aps;
    for (int c : classes) aps.push_back(pr_curve_and_ap(images, cfg, c).ap);
    per_threshold.push_back(mean_ap(aps));
  }
  return mean_ap(per_threshold);
}

std::vector<CountPair> agreement_filtered_counts(std::span<const ImageDetections> images, int min_agreement,
                                                 int raters, double score_threshold) {
  if (raters < 1) fail(ErrorCode::InvalidArgument, "rater count must be positive");
  if (min_agreement < 1 || min_agreement > raters)
    fail(ErrorCode::InvalidArgument,
         "min_agreement must lie in [1, " + std::to_string(raters) + "], got " + std::to_string(min_agreement));
  std::vector<CountPair> out;
  out.reserve(images.size());
  for (const auto& im : images) {
    CountPair c;
    for (const auto& g : im.gts) {
      if (g.agreement < 1 || g.agreement > raters)
        fail(ErrorCode::InvalidArgument, "agreement " + std::to_string(g.agreement) + " outside [1, raters]");
      if (g.agreement >= min_agreement) c.gt += 1.0;
    }
    for (const auto& p : im.preds)
      if (p.score >= score_threshold) c.pred += 1.0;
    out.push_back(c);
  }
  return out;
}

}  // namespace meshcount::metrics
