#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "core/error.hpp"

namespace meshcount::geometry {

namespace {

constexpr double kDetEpsilon = 1e-12;
constexpr double kInfinityEpsilon = 1e-12;
constexpr double kCollinearRatio = 1e-9;
constexpr double kRankRatio = 1e-10;

Homography::Matrix canonical(Homography::Matrix m) {
  double largest = 0.0;
  for (double v : m) {
    if (!std::isfinite(v)) fail(ErrorCode::DegenerateConfiguration, "non-finite homography entry");
    if (std::abs(v) > std::abs(largest)) largest = v;
  }
  if (largest == 0.0) fail(ErrorCode::DegenerateConfiguration, "zero homography");
  for (double& v : m) v /= largest;
  return m;
}

double det3(const Homography::Matrix& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int d1 = sign(cross(q1, q2, p1));
  const int d2 = sign(cross(q1, q2, p2));
  const int d3 = sign(cross(p1, p2, q1));
  const int d4 = sign(cross(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

// Hartley conditioning: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d conditioning(std::span<const Point2> pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= static_cast<double>(pts.size());
  const double s = mean_dist > 0.0 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 0) = s;
  t(1, 1) = s;
  t(0, 2) = -s * cx;
  t(1, 2) = -s * cy;
  return t;
}

void check_no_collinear_triple(std::span<const Correspondence> corrs) {
  double x0 = corrs[0].src.x, x1 = x0, y0 = corrs[0].src.y, y1 = y0;
  for (const auto& c : corrs) {
    x0 = std::min(x0, c.src.x);
    x1 = std::max(x1, c.src.x);
    y0 = std::min(y0, c.src.y);
    y1 = std::max(y1, c.src.y);
  }
  const double bbox_area = (x1 - x0) * (y1 - y0);
  const std::size_t n = corrs.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double tri = 0.5 * std::abs(cross(corrs[i].src, corrs[j].src, corrs[k].src));
        if (tri < kCollinearRatio * bbox_area || bbox_area == 0.0)
          fail(ErrorCode::DegenerateConfiguration, "collinear source points");
      }
}

// Sorted edge crossings of one horizontal line; consecutive pairs are inside spans.
void scanline_spans(std::span<const Point2> v, double y, std::vector<double>& xs) {
  xs.clear();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    if ((a.y > y) != (b.y > y)) xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
}

}  // namespace

bool is_finite(Point2 p) noexcept { return std::isfinite(p.x) && std::isfinite(p.y); }

double distance(Point2 a, Point2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

// ---------------------------------------------------------------------------
// Homography

Homography::Homography(const Matrix& m) : m_(canonical(m)) {
  if (std::abs(det3(m_)) <= kDetEpsilon)
    fail(ErrorCode::DegenerateConfiguration, "singular homography");
}

Homography Homography::identity() { return Homography(Matrix{1, 0, 0, 0, 1, 0, 0, 0, 1}); }

Homography Homography::translation(double dx, double dy) {
  return Homography(Matrix{1, 0, dx, 0, 1, dy, 0, 0, 1});
}

Homography Homography::scaling(double sx, double sy) {
  return Homography(Matrix{sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

Homography Homography::inverse() const {
  const auto& m = m_;
  const double d = det3(m);
  Matrix inv{
      (m[4] * m[8] - m[5] * m[7]) / d, (m[2] * m[7] - m[1] * m[8]) / d, (m[1] * m[5] - m[2] * m[4]) / d,
      (m[5] * m[6] - m[3] * m[8]) / d, (m[0] * m[8] - m[2] * m[6]) / d, (m[2] * m[3] - m[0] * m[5]) / d,
      (m[3] * m[7] - m[4] * m[6]) / d, (m[1] * m[6] - m[0] * m[7]) / d, (m[0] * m[4] - m[1] * m[3]) / d,
  };
  return Homography(inv);
}

Homography Homography::operator*(const Homography& rhs) const {
  Matrix out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += (*this)(r, k) * rhs(k, c);
      out[r * 3 + c] = acc;
    }
  return Homography(out);
}

double max_abs_difference(const Homography& a, const Homography& b) noexcept {
  double worst = 0.0;
  for (std::size_t i = 0; i < 9; ++i)
    worst = std::max(worst, std::abs(a.matrix()[i] - b.matrix()[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// Polygon

double signed_area(std::span<const Point2> v) noexcept {
  double acc = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    acc += a.x * b.y - b.x * a.y;
  }
  return 0.5 * acc;
}

bool is_simple(std::span<const Point2> v) noexcept {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] == v[(i + 1) % n]) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a1 = v[i];
    const Point2 a2 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Point2 b1 = v[j];
      const Point2 b2 = v[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges share one vertex; they must not fold back onto each other.
        const Point2 shared = (j == i + 1) ? a2 : a1;
        const Point2 p = (j == i + 1) ? a1 : a2;
        const Point2 q = (j == i + 1) ? b2 : b1;
        if (cross(shared, p, q) == 0.0) {
          const double dot = (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y);
          if (dot > 0.0) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

Polygon::Polygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) fail(ErrorCode::DegeneratePolygon, "polygon needs at least 3 vertices");
  for (const auto& p : vertices_)
    if (!is_finite(p)) fail(ErrorCode::DegeneratePolygon, "non-finite polygon vertex");
  double a = signed_area(vertices_);
  if (a < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
    a = -a;
  }
  if (!(a > 0.0)) fail(ErrorCode::DegeneratePolygon, "polygon has zero area");
  if (!is_simple(vertices_)) fail(ErrorCode::DegeneratePolygon, "polygon is self-intersecting");
}

Polygon Polygon::rectangle(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

double Polygon::area() const noexcept { return signed_area(vertices_); }

Point2 Polygon::centroid() const noexcept {
  double cx = 0.0, cy = 0.0, acc = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % n];
    const double w = a.x * b.y - b.x * a.y;
    acc += w;
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  return {cx / (3.0 * acc), cy / (3.0 * acc)};
}

Box Polygon::bounds() const noexcept {
  Box b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
  for (const auto& p : vertices_) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

bool Polygon::contains(Point2 p) const noexcept {
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool Polygon::is_axis_aligned_rectangle() const noexcept {
  if (vertices_.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const Point2 a = vertices_[i];
    const Point2 b = vertices_[(i + 1) % 4];
    const bool horizontal = a.y == b.y && a.x != b.x;
    const bool vertical = a.x == b.x && a.y != b.y;
    if (!(horizontal || vertical)) return false;
    const Point2 c = vertices_[(i + 2) % 4];
    const bool next_horizontal = b.y == c.y;
    if (horizontal == next_horizontal) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Estimation

Homography estimate_homography_dlt(std::span<const Correspondence> corrs) {
  const std::size_t n = corrs.size();
  if (n < 4) fail(ErrorCode::TooFewPoints, "need at least 4 correspondences, got " + std::to_string(n));
  for (const auto& c : corrs)
    if (!is_finite(c.src) || !is_finite(c.dst))
      fail(ErrorCode::InvalidArgument, "non-finite correspondence");
  if (n == 4) check_no_collinear_triple(corrs);

  std::vector<Point2> src(n), dst(n);
  for (std::size_t i = 0; i < n; ++i) {
    src[i] = corrs[i].src;
    dst[i] = corrs[i].dst;
  }
  const Eigen::Matrix3d t_src = conditioning(src);
  const Eigen::Matrix3d t_dst = conditioning(dst);

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d p = t_src * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d q = t_dst * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    const auto r = static_cast<Eigen::Index>(2 * i);
    a.row(r) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(r + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  // A rank below 8 leaves more than one null direction.
  if (sv.size() < 8 || sv(7) <= kRankRatio * sv(0))
    fail(ErrorCode::DegenerateConfiguration, "design matrix is rank-deficient");

  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d full = t_dst.inverse() * hn * t_src;

  Homography::Matrix m{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m[r * 3 + c] = full(r, c);
  return Homography(m);
}

void validate(const RansacParams& params) {
  if (params.max_iterations < 1) fail(ErrorCode::InvalidArgument, "max_iterations must be positive");
  if (!(params.inlier_threshold > 0.0)) fail(ErrorCode::InvalidArgument, "inlier_threshold must be > 0");
  if (!(params.confidence > 0.0 && params.confidence < 1.0))
    fail(ErrorCode::InvalidArgument, "confidence must lie in (0,1)");
}

double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Correspondence& c) {
  try {
    const double forward = distance(project_point(h, c.src), c.dst);
    const double backward = distance(project_point(h_inv, c.dst), c.src);
    return 0.5 * (forward + backward);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PointAtInfinity) return std::numeric_limits<double>::infinity();
    throw;
  }
}

namespace {

struct Consensus {
  std::vector<bool> mask;
  std::size_t count = 0;
  double residual_sum = 0.0;
};

Consensus score(const Homography& h, std::span<const Correspondence> corrs, double threshold) {
  Consensus c;
  c.mask.assign(corrs.size(), false);
  const Homography h_inv = h.inverse();
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const double e = symmetric_transfer_error(h, h_inv, corrs[i]);
    if (e < threshold) {
      c.mask[i] = true;
      ++c.count;
      c.residual_sum += e;
    }
  }
  return c;
}

bool better(const Consensus& a, const Consensus& b) {
  return a.count > b.count || (a.count == b.count && a.residual_sum < b.residual_sum);
}

int required_iterations(std::size_t inliers, std::size_t n, double confidence, int cap) {
  const double w = static_cast<double>(inliers) / static_cast<double>(n);
  const double w4 = std::pow(w, 4);
  if (w4 >= 1.0) return 1;
  if (w4 <= 0.0) return cap;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - w4);
  if (!std::isfinite(k) || k >= cap) return cap;
  return std::max(1, static_cast<int>(std::ceil(k)));
}

std::vector<Correspondence> select(std::span<const Correspondence> corrs, const std::vector<bool>& mask) {
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < corrs.size(); ++i)
    if (mask[i]) out.push_back(corrs[i]);
  return out;
}

}  // namespace

RansacResult ransac_homography(std::span<const Correspondence> corrs, const RansacParams& params) {
  validate(params);
  const std::size_t n = corrs.size();
  if (n < 4) fail(ErrorCode::TooFewPoints, "need at least 4 correspondences, got " + std::to_string(n));

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::optional<Homography> best_h;
  Consensus best;
  int needed = params.max_iterations;
  int it = 0;
  for (; it < needed; ++it) {
    std::array<std::size_t, 4> idx{};
    for (std::size_t k = 0; k < 4; ++k) {
      std::size_t cand;
      do {
        cand = pick(rng);
      } while (std::find(idx.begin(), idx.begin() + k, cand) != idx.begin() + k);
      idx[k] = cand;
    }
    const std::array<Correspondence, 4> sample{corrs[idx[0]], corrs[idx[1]], corrs[idx[2]], corrs[idx[3]]};
    Homography h;
    Consensus c;
    try {
      h = estimate_homography_dlt(sample);
      c = score(h, corrs, params.inlier_threshold);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateConfiguration) continue;
      throw;
    }
    if (!best_h || better(c, best)) {
      best = std::move(c);
      best_h = h;
      needed = std::min(params.max_iterations,
                        required_iterations(best.count, n, params.confidence, params.max_iterations));
    }
  }

  if (!best_h || best.count < 4)
    fail(ErrorCode::NoConsensus,
         "best consensus has " + std::to_string(best_h ? best.count : 0) + " inliers, need 4");

  // Refit on the consensus set; accept while the support does not shrink.
  Homography h = *best_h;
  for (int round = 0; round < 5; ++round) {
    Homography refit;
    Consensus c;
    try {
      refit = estimate_homography_dlt(select(corrs, best.mask));
      c = score(refit, corrs, params.inlier_threshold);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateConfiguration) break;
      throw;
    }
    if (c.count < best.count) break;
    const bool same = c.mask == best.mask;
    h = refit;
    best = std::move(c);
    if (same) break;
  }

  RansacResult result;
  result.homography = h;
  result.inlier_mask = std::move(best.mask);
  result.inlier_count = best.count;
  result.iterations = it;
  return result;
}

// ---------------------------------------------------------------------------
// Projection

Point2 project_point(const Homography& h, Point2 p) {
  const double w = h(2, 0) * p.x + h(2, 1) * p.y + h(2, 2);
  if (!(std::abs(w) > kInfinityEpsilon)) fail(ErrorCode::PointAtInfinity, "projective denominator vanishes");
  return {(h(0, 0) * p.x + h(0, 1) * p.y + h(0, 2)) / w, (h(1, 0) * p.x + h(1, 1) * p.y + h(1, 2)) / w};
}

Polygon project_polygon(const Homography& h, const Polygon& poly) {
  std::vector<Point2> out;
  out.reserve(poly.size());
  int w_sign = 0;
  for (const auto& v : poly.vertices()) {
    const double w = h(2, 0) * v.x + h(2, 1) * v.y + h(2, 2);
    const int s = sign(w);
    if (w_sign != 0 && s != w_sign)
      fail(ErrorCode::PointAtInfinity, "polygon straddles the line at infinity");
    w_sign = s;
    out.push_back(project_point(h, v));
  }
  return Polygon(std::move(out));
}

// ---------------------------------------------------------------------------
// IoU

double iou_analytic_rect(const Polygon& a, const Polygon& b) {
  const Box ba = a.bounds();
  const Box bb = b.bounds();
  const double iw = std::max(0.0, std::min(ba.x1, bb.x1) - std::max(ba.x0, bb.x0));
  const double ih = std::max(0.0, std::min(ba.y1, bb.y1) - std::max(ba.y0, bb.y0));
  const double inter = iw * ih;
  const double uni = (ba.x1 - ba.x0) * (ba.y1 - ba.y0) + (bb.x1 - bb.x0) * (bb.y1 - bb.y0) - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou_rasterized(const Polygon& a, const Polygon& b, double grid_scale) {
  if (!(grid_scale > 0.0)) fail(ErrorCode::InvalidArgument, "grid_scale must be positive");
  const Box ba = a.bounds();
  const Box bb = b.bounds();
  const double y_lo = std::min(ba.y0, bb.y0);
  const double y_hi = std::max(ba.y1, bb.y1);

  // Row boundaries: the common grid plus every vertex ordinate, so each row
  // is integrated at its midpoint with exact horizontal coverage.
  std::vector<double> ys;
  for (long k = static_cast<long>(std::ceil(y_lo * grid_scale)); k / grid_scale < y_hi; ++k)
    ys.push_back(static_cast<double>(k) / grid_scale);
  for (const auto& p : a.vertices()) ys.push_back(p.y);
  for (const auto& p : b.vertices()) ys.push_back(p.y);
  ys.push_back(y_lo);
  ys.push_back(y_hi);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  std::vector<double> xa, xb;
  double area_a = 0.0, area_b = 0.0, area_ab = 0.0;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    const double h = ys[k + 1] - ys[k];
    const double y = 0.5 * (ys[k] + ys[k + 1]);
    scanline_spans(a.vertices(), y, xa);
    scanline_spans(b.vertices(), y, xb);
    double len_a = 0.0, len_b = 0.0, len_ab = 0.0;
    for (std::size_t i = 0; i + 1 < xa.size(); i += 2) len_a += xa[i + 1] - xa[i];
    for (std::size_t i = 0; i + 1 < xb.size(); i += 2) len_b += xb[i + 1] - xb[i];
    std::size_t i = 0, j = 0;
    while (i + 1 < xa.size() && j + 1 < xb.size()) {
      const double l = std::max(xa[i], xb[j]);
      const double r = std::min(xa[i + 1], xb[j + 1]);
      if (l < r) len_ab += r - l;
      if (xa[i + 1] < xb[j + 1]) i += 2;
      else j += 2;
    }
    area_a += len_a * h;
    area_b += len_b * h;
    area_ab += len_ab * h;
  }
  const double uni = area_a + area_b - area_ab;
  return uni > 0.0 ? std::clamp(area_ab / uni, 0.0, 1.0) : 0.0;
}

double iou(const Polygon& a, const Polygon& b, double grid_scale) {
  const Box ba = a.bounds();
  const Box bb = b.bounds();
  if (ba.x1 <= bb.x0 || bb.x1 <= ba.x0 || ba.y1 <= bb.y0 || bb.y1 <= ba.y0) return 0.0;
  if (a.is_axis_aligned_rectangle() && b.is_axis_aligned_rectangle()) return iou_analytic_rect(a, b);
  return iou_rasterized(a, b, grid_scale);
}

// ---------------------------------------------------------------------------
// Ground plane

double ground_distance(const Homography& h_ground, Point2 a, Point2 b) {
  return distance(project_point(h_ground, a), project_point(h_ground, b));
}

std::vector<std::vector<std::size_t>> distance_violations(std::span<const Point2> positions, double threshold) {
  if (!(threshold > 0.0)) fail(ErrorCode::InvalidArgument, "threshold must be positive");
  const std::size_t n = positions.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<bool> linked(n, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(positions[i], positions[j]) < threshold) {
        linked[i] = linked[j] = true;
        const std::size_t ri = find(i), rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!linked[i]) continue;
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

}  // namespace meshcount::geometry
