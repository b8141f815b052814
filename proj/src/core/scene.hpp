#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/protocol.hpp"

namespace meshcount::scene {

enum class WarpFamily { Translation, Affine, Projective };

const char* to_string(WarpFamily w) noexcept;
WarpFamily parse_warp(const std::string& s);

struct DetectionNoise {
  double drop_rate = 0.0;
  double jitter_px = 0.0;
  // Probability of one false positive per camera and frame.
  double spurious_rate = 0.0;
};

struct SyntheticSceneSpec {
  int n_cameras = 2;
  int width = 320;
  int height = 240;
  int n_vehicles = 8;
  int n_frames = 5;
  double overlap = 0.3;
  WarpFamily warp = WarpFamily::Affine;
  DetectionNoise noise;
  int keypoints_per_camera = 200;
  int descriptor_dim = 32;
  double descriptor_noise = 0.05;
  std::uint64_t seed = 0;
};

void validate(const SyntheticSceneSpec& spec);

struct FrameTruth {
  int frame_id = 0;
  int vehicles = 0;
  // Sum over visible vehicles of (cameras seeing it - 1).
  int duplicates = 0;
};

struct GeneratedScene {
  protocol::Scenario scenario;
  // World plane to camera image, per node id.
  std::map<int, geometry::Homography> world_to_image;
  std::vector<FrameTruth> truth;
};

// Cameras form a chain along world x with adjacent windows overlapping by the
// requested fraction; every vehicle is seen by one camera or two neighbours,
// and no vehicle centroid lies near an image border.
GeneratedScene generate_scene(const SyntheticSceneSpec& spec);

}  // namespace meshcount::scene
