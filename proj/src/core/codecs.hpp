#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/annotate.hpp"
#include "core/density.hpp"
#include "core/geometry.hpp"
#include "core/matching.hpp"
#include "core/metrics.hpp"
#include "core/protocol.hpp"
#include "core/rescoring.hpp"

// Readers and writers for every file format. Text decoders report
// "source:line:column", binary and JSON decoders "source: byte N".
namespace meshcount::codecs {

// src_x,src_y,dst_x,dst_y
std::vector<geometry::Correspondence> decode_correspondences(std::string_view data, const std::string& source);
std::string encode_correspondences(std::span<const geometry::Correspondence> corrs);

// x,y,d0,...,d{D-1}
std::vector<matching::Feature> decode_features(std::string_view data, const std::string& source);
std::string encode_features(std::span<const matching::Feature> features, std::size_t dim);

// x,y[,sigma]
density::DotAnnotation decode_dots(std::string_view data, const std::string& source);
std::string encode_dots(const density::DotAnnotation& dots);

// The 3x3 matrix as three lines of three comma or space separated numbers.
geometry::Homography decode_homography(std::string_view data, const std::string& source);
std::string encode_homography(const geometry::Homography& h);

// image_id,class_id,score,geom... and image_id,class_id,geom...[,agreement].
// Geometry is x,y for a point, x0,y0,x1,y1 for an axis-aligned box, or three
// or more polygon vertices.
using DetectionTable = std::map<std::string, metrics::ImageDetections>;

void decode_predictions(std::string_view data, const std::string& source, DetectionTable& into);
void decode_ground_truth(std::string_view data, const std::string& source, DetectionTable& into);
std::string encode_predictions(const DetectionTable& table);
std::string encode_ground_truth(const DetectionTable& table);

// DMF1: magic, H and W as u32, then H*W float32, all little-endian. Values
// are stored in single precision.
std::string encode_dmf(const density::DensityMap& map);
density::DensityMap decode_dmf(std::string_view data, const std::string& source);

// H lines of W values.
std::string encode_density_csv(const density::DensityMap& map);
density::DensityMap decode_density_csv(std::string_view data, const std::string& source);

// image_id,count or image_id,density where density names a DMF1 file relative
// to `base_dir`.
struct CountEntry {
  double count = 0.0;
  std::optional<density::DensityMap> map;
};

std::map<std::string, CountEntry> decode_counts(std::string_view data, const std::string& source,
                                                const std::string& base_dir);

// Scenario JSON. Features either inline or in a sidecar file named by
// `features_file`, resolved against `base_dir`.
protocol::Scenario decode_scenario(std::string_view data, const std::string& source, const std::string& base_dir);
// Nodes with a features_file get their features written to `sidecars`
// (file name -> CSV) instead of inline.
std::string encode_scenario(const protocol::Scenario& scenario, std::map<std::string, std::string>* sidecars);

protocol::Scenario load_scenario(const std::string& path);
void save_scenario(const protocol::Scenario& scenario, const std::string& path);

// agreement,f0,...,f{D-1}
rescoring::Dataset decode_samples(std::string_view data, const std::string& source, int raters);
std::string encode_samples(const rescoring::Dataset& data);

rescoring::ScorerModel decode_model(std::string_view data, const std::string& source);
std::string encode_model(const rescoring::ScorerModel& model);

// epoch,loss with epoch 0 the initial loss.
std::vector<double> decode_loss_trace(std::string_view data, const std::string& source);
std::string encode_loss_trace(std::span<const double> trace);

// image_id,f0,...,f{D-1}: one row per detection to rescore.
std::map<std::string, std::vector<std::vector<double>>> decode_image_features(std::string_view data,
                                                                             const std::string& source);

// h_s,w_s,z[,h_m]
struct AnnotationTable {
  std::vector<annotate::SkeletonBox> boxes;
  std::vector<std::optional<double>> h_m;
};

AnnotationTable decode_annotations(std::string_view data, const std::string& source);

}  // namespace meshcount::codecs
