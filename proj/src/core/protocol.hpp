#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "core/geometry.hpp"
#include "core/matching.hpp"

namespace meshcount::protocol {

using geometry::Homography;
using geometry::Point2;
using geometry::Polygon;

inline constexpr int kSinkId = -1;

struct Detection {
  Polygon polygon;
  double score = 1.0;
  // Generator identity of the underlying vehicle; -1 when unknown or spurious.
  int identity = -1;
};

using DetectionSet = std::vector<Detection>;

struct Frame {
  int frame_id = 0;
  DetectionSet detections;
};

struct NodeSpec {
  int id = 0;
  std::vector<int> neighbors;
  int width = 0;
  int height = 0;
  std::vector<matching::Feature> features;
  // Where the features came from, kept for re-serialisation; may be empty.
  std::string features_file;
  std::vector<Frame> frames;
};

struct GroundTruthFrame {
  int frame_id = 0;
  double global_count = 0.0;
};

// Directed key (from, to): the transform maps plane `from` into plane `to`.
using PairKey = std::pair<int, int>;

struct Scenario {
  std::vector<NodeSpec> nodes;
  std::vector<GroundTruthFrame> ground_truth;
  std::map<PairKey, Homography> true_homographies;

  const NodeSpec& node(int id) const;
  // Frame ids in processing order: the ground-truth order, else the order of
  // the first node.
  std::vector<int> frame_ids() const;
};

// Ids unique, neighbour lists symmetric without self loops, positive image
// shapes, and every node listing each frame exactly once.
void validate(const Scenario& scenario);

enum class Aggregation { Min, Max, Mean };

const char* to_string(Aggregation a) noexcept;
Aggregation parse_aggregation(const std::string& s);

struct ProtocolConfig {
  double tau = 0.2;
  Aggregation aggregation = Aggregation::Mean;
  geometry::RansacParams ransac;
  double ratio = matching::kDefaultRatio;
  bool cross_check = false;
  // Distance filter bound; <= 0 selects twice the median match distance.
  double max_dist = 0.0;
  // Use the scenario's true transforms instead of calibrating.
  bool use_true_homographies = false;
};

void validate(const ProtocolConfig& config);

enum class MessageKind { InitSignal, FeatureShare, ComputeSignal, MaskShare, EtaReport, MuReport };

const char* to_string(MessageKind k) noexcept;

struct MuPayload {
  int from;  // j: owner of the projected masks
  int to;    // i: node that computed the value
  int mu;
  int skipped;
};

using Payload = std::variant<std::monostate, std::vector<matching::Feature>, DetectionSet, int, MuPayload>;

struct Message {
  MessageKind kind;
  int src;
  int dst;
  int frame_id = 0;
  Payload payload;
};

struct PairCalibration {
  std::size_t ratio_matches = 0;
  // Matches surviving the distance filter, as (j, i) point pairs.
  std::vector<geometry::Correspondence> correspondences;
  geometry::RansacResult fit;
};

PairCalibration calibrate_pair_detailed(std::span<const matching::Feature> features_j,
                                        std::span<const matching::Feature> features_i, const ProtocolConfig& config,
                                        int i, int j);

// H_{j,i}: ratio test from features_j to features_i, distance filter, RANSAC.
Homography calibrate_pair(std::span<const matching::Feature> features_j, std::span<const matching::Feature> features_i,
                          const ProtocolConfig& config, int i, int j);

struct MuResult {
  int mu = 0;
  // Masks whose projection hit the line at infinity or degenerated.
  int skipped = 0;
  // For each mask of j, the index of the matched mask of i or -1.
  std::vector<int> matched;
};

MuResult compute_mu(const DetectionSet& masks_i, const DetectionSet& masks_j, const Homography& h_ji, double tau,
                    int width, int height);

double aggregate(int mu_ij, int mu_ji, Aggregation mode);
double global_count(std::span<const int> etas, std::span<const double> aggregated);
int naive_count(std::span<const int> etas);

// A node drops detections whose centroid lies inside the projected image
// rectangle of any neighbour with a smaller id.
int masking_count(const Scenario& scenario, const std::map<PairKey, Homography>& homographies, int frame_id);

double round_half_even(double v);

struct PairMu {
  int a;  // smaller id
  int b;
  int mu_ab;  // masks of a already seen by b, computed by b
  int mu_ba;  // masks of b already seen by a, computed by a
  double aggregated;

  friend bool operator==(const PairMu&, const PairMu&) = default;
};

struct FrameReport {
  int frame_id = 0;
  std::vector<int> etas;  // node order of the scenario
  std::vector<PairMu> pairs;
  int naive = 0;
  int masking = 0;
  double ours_raw = 0.0;
  double ours_rounded = 0.0;
  std::optional<double> gt;
  int skipped_projections = 0;
  // Masks matched by projections from two or more neighbours.
  int triple_overlap_candidates = 0;

  friend bool operator==(const FrameReport&, const FrameReport&) = default;
};

struct Report {
  ProtocolConfig config;
  std::vector<int> node_ids;
  std::vector<FrameReport> frames;
  // Message counts by kind, in MessageKind order.
  std::vector<std::size_t> message_counts;
  std::map<PairKey, Homography> homographies;
};

// Deterministic single-threaded bus: per-link FIFO with global send order.
class Simulator {
 public:
  Simulator(const Scenario& scenario, const ProtocolConfig& config);

  void init_phase();
  FrameReport run_frame(int frame_id);

  const std::map<PairKey, Homography>& homographies() const noexcept { return homographies_; }
  const std::vector<std::size_t>& message_counts() const noexcept { return counts_; }

 private:
  struct NodeState {
    const NodeSpec* spec = nullptr;
    std::map<int, Homography> homographies;  // neighbour j -> H_{j,i}
    const DetectionSet* masks = nullptr;
    std::vector<Message> pending;  // masks that arrived before the compute signal
    int eta = 0;
    std::map<int, int> mu_sent;
    std::map<int, std::vector<int>> matched_by;  // neighbour -> matched mask indices
  };

  struct SinkState {
    int frame_id = 0;
    std::map<int, int> etas;
    std::map<PairKey, MuPayload> mus;
  };

  void send(Message m);
  void drain();
  void deliver(const Message& m);
  void on_node(NodeState& node, const Message& m);
  void handle_mask(NodeState& node, const Message& m);

  const Scenario& scenario_;
  ProtocolConfig config_;
  std::vector<NodeState> nodes_;
  std::map<int, std::size_t> index_;
  std::vector<Message> queue_;
  std::size_t head_ = 0;
  SinkState sink_;
  std::map<PairKey, Homography> homographies_;
  std::vector<std::size_t> counts_;
  bool initialised_ = false;
};

Report run_scenario(const Scenario& scenario, const ProtocolConfig& config);

}  // namespace meshcount::protocol
