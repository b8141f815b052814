#include "core/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "core/error.hpp"

namespace meshcount::scene {

namespace {

using geometry::Homography;
using geometry::Point2;
using geometry::Polygon;

constexpr double kBorderMargin = 8.0;
constexpr double kMinVehicleGap = 40.0;
constexpr int kAttemptsPerVehicle = 4000;
constexpr int kMinSharedKeypoints = 16;

Homography centred(const Homography& core, double cx, double cy) {
  return Homography::translation(cx, cy) * core * Homography::translation(-cx, -cy);
}

Homography make_warp(WarpFamily family, const SyntheticSceneSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double tx = 0.03 * spec.width * u(rng), ty = 0.03 * spec.height * u(rng);
  if (family == WarpFamily::Translation) return Homography::translation(tx, ty);
  const double theta = 4.0 * std::numbers::pi / 180.0 * u(rng);
  const double s = 1.0 + 0.05 * u(rng);
  const double shear = 0.03 * u(rng);
  const double c = std::cos(theta) * s, n = std::sin(theta) * s;
  double p1 = 0.0, p2 = 0.0;
  if (family == WarpFamily::Projective) {
    p1 = 2e-4 * u(rng);
    p2 = 2e-4 * u(rng);
  }
  const Homography core(Homography::Matrix{c, -n + shear, tx, n, c, ty, p1, p2, 1.0});
  return centred(core, spec.width / 2.0, spec.height / 2.0);
}

// Positive inside the image, negative outside.
double border_distance(Point2 p, int w, int h) { return std::min({p.x, w - p.x, p.y, h - p.y}); }

Point2 apply(const Homography& h, Point2 p) { return geometry::project_point(h, p); }

}  // namespace

const char* to_string(WarpFamily w) noexcept {
  switch (w) {
    case WarpFamily::Translation: return "translation";
    case WarpFamily::Affine: return "affine";
    case WarpFamily::Projective: return "projective";
  }
  return "?";
}

WarpFamily parse_warp(const std::string& s) {
  if (s == "translation") return WarpFamily::Translation;
  if (s == "affine") return WarpFamily::Affine;
  if (s == "projective") return WarpFamily::Projective;
  fail(ErrorCode::InvalidArgument, "unknown warp family '" + s + "'");
}

void validate(const SyntheticSceneSpec& spec) {
  if (spec.n_cameras < 1 || spec.n_cameras > 64) fail(ErrorCode::InvalidArgument, "n_cameras must lie in [1, 64]");
  if (spec.width < 64 || spec.height < 64) fail(ErrorCode::InvalidArgument, "image shape must be at least 64x64");
  if (spec.n_vehicles < 0) fail(ErrorCode::InvalidArgument, "n_vehicles must be >= 0");
  if (spec.n_frames < 0) fail(ErrorCode::InvalidArgument, "n_frames must be >= 0");
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0)) fail(ErrorCode::InvalidArgument, "overlap must lie in [0,1]");
  const auto& n = spec.noise;
  if (!(n.drop_rate >= 0.0 && n.drop_rate <= 1.0)) fail(ErrorCode::InvalidArgument, "drop rate must lie in [0,1]");
  if (!(n.spurious_rate >= 0.0 && n.spurious_rate <= 1.0))
    fail(ErrorCode::InvalidArgument, "spurious rate must lie in [0,1]");
  if (!(n.jitter_px >= 0.0 && n.jitter_px <= 10.0)) fail(ErrorCode::InvalidArgument, "jitter must lie in [0,10] px");
  if (spec.keypoints_per_camera < 0) fail(ErrorCode::InvalidArgument, "keypoints_per_camera must be >= 0");
  if (spec.descriptor_dim < 1) fail(ErrorCode::InvalidArgument, "descriptor_dim must be >= 1");
  if (!(spec.descriptor_noise >= 0.0)) fail(ErrorCode::InvalidArgument, "descriptor noise must be >= 0");
  if (spec.n_cameras >= 3 && spec.overlap > 0.5)
    fail(ErrorCode::InfeasibleOverlap, "overlap above 0.5 with three or more cameras forces triple overlaps");
}

GeneratedScene generate_scene(const SyntheticSceneSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n = spec.n_cameras;
  const double ww = spec.width, wh = spec.height;
  const double spacing = spec.overlap > 0.0 ? ww * (1.0 - spec.overlap) : ww * 1.1;
  const double world_w = spacing * (n - 1) + ww;
  const bool linked = spec.overlap > 0.0;

  GeneratedScene out;
  auto& sc = out.scenario;
  std::vector<Homography> g(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    g[c] = make_warp(spec.warp, spec, rng) * Homography::translation(-spacing * c, 0.0);
    out.world_to_image[c] = g[c];
    protocol::NodeSpec node;
    node.id = c;
    node.width = spec.width;
    node.height = spec.height;
    if (linked) {
      if (c > 0) node.neighbors.push_back(c - 1);
      if (c + 1 < n) node.neighbors.push_back(c + 1);
    }
    sc.nodes.push_back(std::move(node));
  }
  for (const auto& node : sc.nodes)
    for (int j : node.neighbors) sc.true_homographies[{j, node.id}] = g[node.id] * g[j].inverse();

  auto sees = [&](int c, Point2 w) {
    const Point2 p = apply(g[c], w);
    return p.x >= 0.0 && p.x < spec.width && p.y >= 0.0 && p.y < spec.height;
  };

  // Calibration keypoints: world points with a shared descriptor, observed
  // with independent descriptor noise by every camera that sees them.
  std::vector<Point2> world_pts;
  const int total_pts = static_cast<int>(std::lround(spec.keypoints_per_camera * world_w / ww));
  for (int k = 0; k < total_pts; ++k) world_pts.push_back({unit(rng) * world_w, unit(rng) * wh});
  if (linked)
    for (int c = 0; c + 1 < n; ++c) {
      int shared = 0;
      for (auto p : world_pts) shared += sees(c, p) && sees(c + 1, p);
      const double x0 = spacing * (c + 1), x1 = spacing * c + ww;
      for (int tries = 0; shared < kMinSharedKeypoints && tries < 10000; ++tries) {
        const Point2 p{x0 + unit(rng) * (x1 - x0), unit(rng) * wh};
        if (sees(c, p) && sees(c + 1, p)) {
          world_pts.push_back(p);
          ++shared;
        }
      }
    }
  std::vector<std::vector<double>> world_desc(world_pts.size());
  for (auto& d : world_desc) {
    d.resize(static_cast<std::size_t>(spec.descriptor_dim));
    for (auto& v : d) v = gauss(rng);
  }
  for (int c = 0; c < n; ++c)
    for (std::size_t k = 0; k < world_pts.size(); ++k) {
      if (!sees(c, world_pts[k])) continue;
      matching::Feature f{apply(g[c], world_pts[k]), world_desc[k]};
      for (auto& v : f.descriptor) v += spec.descriptor_noise * gauss(rng);
      sc.nodes[c].features.push_back(std::move(f));
    }

  for (int frame = 0; frame < spec.n_frames; ++frame) {
    struct Vehicle {
      Polygon world;
      Point2 centre;
      std::vector<int> cams;
    };
    std::vector<Vehicle> vehicles;
    for (int v = 0; v < spec.n_vehicles; ++v) {
      bool placed = false;
      for (int attempt = 0; attempt < kAttemptsPerVehicle && !placed; ++attempt) {
        const double bw = 18.0 + 10.0 * unit(rng), bh = 10.0 + 5.0 * unit(rng);
        const Point2 c{10.0 + unit(rng) * (world_w - 20.0), 10.0 + unit(rng) * (wh - 20.0)};
        bool apart = true;
        for (const auto& o : vehicles) apart = apart && geometry::distance(o.centre, c) >= kMinVehicleGap;
        if (!apart) continue;
        const Polygon rect = Polygon::rectangle(c.x - bw / 2, c.y - bh / 2, c.x + bw / 2, c.y + bh / 2);
        std::vector<int> cams;
        bool clear = true;
        for (int k = 0; k < n && clear; ++k) {
          const double d = border_distance(geometry::project_polygon(g[k], rect).centroid(), spec.width, spec.height);
          if (std::abs(d) < kBorderMargin) clear = false;
          if (d > 0.0) cams.push_back(k);
        }
        if (!clear || cams.empty() || cams.size() > 2) continue;
        if (cams.size() == 2 && !(linked && cams[1] == cams[0] + 1)) continue;
        vehicles.push_back({rect, c, cams});
        placed = true;
      }
      if (!placed)
        fail(ErrorCode::InfeasibleOverlap, "could not place vehicle " + std::to_string(v) + " of frame " +
                                               std::to_string(frame) + "; reduce n_vehicles or change the overlap");
    }

    FrameTruth truth{frame, static_cast<int>(vehicles.size()), 0};
    for (const auto& v : vehicles) truth.duplicates += static_cast<int>(v.cams.size()) - 1;
    out.truth.push_back(truth);
    sc.ground_truth.push_back({frame, static_cast<double>(vehicles.size())});

    for (int c = 0; c < n; ++c) {
      protocol::Frame fr{frame, {}};
      std::vector<Polygon> occupied;
      for (std::size_t v = 0; v < vehicles.size(); ++v) {
        const Polygon exact = geometry::project_polygon(g[c], vehicles[v].world);
        occupied.push_back(exact);
        if (std::find(vehicles[v].cams.begin(), vehicles[v].cams.end(), c) == vehicles[v].cams.end()) continue;
        Polygon det = exact;
        const bool dropped = unit(rng) < spec.noise.drop_rate;
        if (spec.noise.jitter_px > 0.0) {
          for (int tries = 0; tries < 10; ++tries) {
            std::vector<Point2> vs(exact.vertices().begin(), exact.vertices().end());
            for (auto& p : vs) {
              p.x += spec.noise.jitter_px * gauss(rng);
              p.y += spec.noise.jitter_px * gauss(rng);
            }
            if (geometry::is_simple(vs) && geometry::signed_area(vs) != 0.0) {
              det = Polygon(vs);
              break;
            }
          }
        }
        const double score = 0.6 + 0.4 * unit(rng);
        if (!dropped) fr.detections.push_back({det, score, static_cast<int>(v)});
      }
      if (unit(rng) < spec.noise.spurious_rate) {
        for (int tries = 0; tries < 200; ++tries) {
          const double bw = 18.0 + 10.0 * unit(rng), bh = 10.0 + 5.0 * unit(rng);
          const double x = kBorderMargin + unit(rng) * (spec.width - 2 * kBorderMargin - bw);
          const double y = kBorderMargin + unit(rng) * (spec.height - 2 * kBorderMargin - bh);
          const Polygon fp = Polygon::rectangle(x, y, x + bw, y + bh);
          const auto b = fp.bounds();
          const bool free = std::none_of(occupied.begin(), occupied.end(), [&](const Polygon& o) {
            const auto ob = o.bounds();
            return ob.x0 < b.x1 + 4 && b.x0 < ob.x1 + 4 && ob.y0 < b.y1 + 4 && b.y0 < ob.y1 + 4;
          });
          if (free) {
            fr.detections.push_back({fp, 0.3 + 0.6 * unit(rng), -1});
            break;
          }
        }
      }
      sc.nodes[c].frames.push_back(std::move(fr));
    }
  }
  return out;
}

}  // namespace meshcount::scene
