#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace meshcount::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

bool is_finite(Point2 p) noexcept;
double distance(Point2 a, Point2 b) noexcept;

struct Box {
  double x0, y0, x1, y1;
};

// 3x3 projective transform, row-major. The stored matrix is always scaled so
// that its largest-magnitude element is exactly 1.
class Homography {
 public:
  using Matrix = std::array<double, 9>;

  Homography() : Homography(identity()) {}
  explicit Homography(const Matrix& m);

  static Homography identity();
  static Homography translation(double dx, double dy);
  static Homography scaling(double sx, double sy);

  const Matrix& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_[row * 3 + col]; }

  Homography inverse() const;
  // this * rhs, i.e. apply rhs first.
  Homography operator*(const Homography& rhs) const;

  friend bool operator==(const Homography&, const Homography&) = default;

 private:
  Matrix m_;
};

// Largest absolute element-wise difference after canonical scaling.
double max_abs_difference(const Homography& a, const Homography& b) noexcept;

// Simple polygon, vertices reordered on construction so the shoelace signed
// area is positive (counter-clockwise in x-right/y-up axes).
class Polygon {
 public:
  explicit Polygon(std::vector<Point2> vertices);

  static Polygon rectangle(double x0, double y0, double x1, double y1);

  std::span<const Point2> vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  double area() const noexcept;
  Point2 centroid() const noexcept;
  Box bounds() const noexcept;
  bool contains(Point2 p) const noexcept;
  bool is_axis_aligned_rectangle() const noexcept;

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point2> vertices_;
};

double signed_area(std::span<const Point2> vertices) noexcept;
bool is_simple(std::span<const Point2> vertices) noexcept;

struct Correspondence {
  Point2 src;
  Point2 dst;
};

struct RansacParams {
  int max_iterations = 2000;
  double inlier_threshold = 3.0;
  double confidence = 0.995;
  std::uint64_t seed = 0;
};

void validate(const RansacParams& params);

struct RansacResult {
  Homography homography;
  std::vector<bool> inlier_mask;
  std::size_t inlier_count = 0;
  int iterations = 0;
};

// Hartley-normalized DLT over all pairs; throws TooFewPoints or
// DegenerateConfiguration.
Homography estimate_homography_dlt(std::span<const Correspondence> corrs);

RansacResult ransac_homography(std::span<const Correspondence> corrs, const RansacParams& params);

// Mean of forward |H src - dst| and backward |H^-1 dst - src| distances.
double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Correspondence& c);

Point2 project_point(const Homography& h, Point2 p);
Polygon project_polygon(const Homography& h, const Polygon& poly);

inline constexpr double kDefaultGridScale = 4.0;

double iou(const Polygon& a, const Polygon& b, double grid_scale = kDefaultGridScale);
double iou_analytic_rect(const Polygon& a, const Polygon& b);
double iou_rasterized(const Polygon& a, const Polygon& b, double grid_scale = kDefaultGridScale);

double ground_distance(const Homography& h_ground, Point2 a, Point2 b);

// Connected components (size >= 2) of the graph with an edge wherever two
// positions are strictly closer than `threshold`. Groups are index-sorted and
// ordered by their smallest member.
std::vector<std::vector<std::size_t>> distance_violations(std::span<const Point2> positions,
                                                          double threshold);

}  // namespace meshcount::geometry
