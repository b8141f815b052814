#include "core/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/error.hpp"

namespace meshcount::protocol {

namespace {

std::string pair_name(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

bool inside_image(Point2 p, int width, int height) {
  return p.x >= 0.0 && p.x < width && p.y >= 0.0 && p.y < height;
}

}  // namespace

const NodeSpec& Scenario::node(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return n;
  fail(ErrorCode::ValidationError, "unknown node id " + std::to_string(id));
}

std::vector<int> Scenario::frame_ids() const {
  std::vector<int> out;
  if (!ground_truth.empty()) {
    for (const auto& g : ground_truth) out.push_back(g.frame_id);
  } else if (!nodes.empty()) {
    for (const auto& f : nodes.front().frames) out.push_back(f.frame_id);
  }
  return out;
}

void validate(const Scenario& scenario) {
  std::set<int> ids;
  for (const auto& n : scenario.nodes) {
    if (n.id < 0) fail(ErrorCode::ValidationError, "node ids must be >= 0, got " + std::to_string(n.id));
    if (!ids.insert(n.id).second) fail(ErrorCode::ValidationError, "duplicate node id " + std::to_string(n.id));
    if (n.width <= 0 || n.height <= 0)
      fail(ErrorCode::ValidationError, "node " + std::to_string(n.id) + " needs a positive image shape");
  }
  for (const auto& n : scenario.nodes) {
    std::set<int> seen;
    for (int j : n.neighbors) {
      if (j == n.id) fail(ErrorCode::ValidationError, "node " + std::to_string(n.id) + " lists itself as a neighbour");
      if (!ids.count(j))
        fail(ErrorCode::ValidationError, "node " + std::to_string(n.id) + " lists unknown neighbour " + std::to_string(j));
      if (!seen.insert(j).second)
        fail(ErrorCode::ValidationError, "node " + std::to_string(n.id) + " lists neighbour " + std::to_string(j) + " twice");
      const auto& other = scenario.node(j);
      if (std::find(other.neighbors.begin(), other.neighbors.end(), n.id) == other.neighbors.end())
        fail(ErrorCode::ValidationError, "asymmetric neighbour lists: node " + std::to_string(n.id) + " lists " +
                                             std::to_string(j) + " but node " + std::to_string(j) + " does not list " +
                                             std::to_string(n.id));
    }
  }
  const auto frames = scenario.frame_ids();
  const std::set<int> frame_set(frames.begin(), frames.end());
  if (frame_set.size() != frames.size()) fail(ErrorCode::ValidationError, "duplicate frame ids");
  for (const auto& n : scenario.nodes) {
    std::set<int> own;
    for (const auto& f : n.frames)
      if (!own.insert(f.frame_id).second)
        fail(ErrorCode::ValidationError, "node " + std::to_string(n.id) + " repeats frame " + std::to_string(f.frame_id));
    if (own != frame_set)
      fail(ErrorCode::ValidationError, "node " + std::to_string(n.id) + " does not list exactly the scenario frames");
  }
}

const char* to_string(Aggregation a) noexcept {
  switch (a) {
    case Aggregation::Min: return "min";
    case Aggregation::Max: return "max";
    case Aggregation::Mean: return "mean";
  }
  return "?";
}

Aggregation parse_aggregation(const std::string& s) {
  if (s == "min") return Aggregation::Min;
  if (s == "max") return Aggregation::Max;
  if (s == "mean") return Aggregation::Mean;
  fail(ErrorCode::InvalidArgument, "unknown aggregation '" + s + "' (expected min, max or mean)");
}

const char* to_string(MessageKind k) noexcept {
  switch (k) {
    case MessageKind::InitSignal: return "InitSignal";
    case MessageKind::FeatureShare: return "FeatureShare";
    case MessageKind::ComputeSignal: return "ComputeSignal";
    case MessageKind::MaskShare: return "MaskShare";
    case MessageKind::EtaReport: return "EtaReport";
    case MessageKind::MuReport: return "MuReport";
  }
  return "?";
}

void validate(const ProtocolConfig& config) {
  if (!(config.tau > 0.0 && config.tau < 1.0)) fail(ErrorCode::InvalidArgument, "tau must lie in (0,1)");
  if (!(config.ratio > 0.0 && config.ratio < 1.0)) fail(ErrorCode::InvalidArgument, "ratio must lie in (0,1)");
  if (!std::isfinite(config.max_dist)) fail(ErrorCode::InvalidArgument, "max_dist must be finite");
  geometry::validate(config.ransac);
}

PairCalibration calibrate_pair_detailed(std::span<const matching::Feature> features_j,
                                        std::span<const matching::Feature> features_i, const ProtocolConfig& config,
                                        int i, int j) {
  try {
    PairCalibration out;
    const auto matches = matching::ratio_match(features_j, features_i, {config.ratio, config.cross_check});
    out.ratio_matches = matches.size();
    const double bound = config.max_dist > 0.0 ? config.max_dist : matching::default_max_dist(matches);
    const auto kept = std::isinf(bound) ? matches : matching::distance_filter(matches, bound);
    out.correspondences = matching::to_correspondences(features_j, features_i, kept);
    out.fit = geometry::ransac_homography(out.correspondences, config.ransac);
    if (out.fit.inlier_count < 4)
      fail(ErrorCode::NoConsensus, "only " + std::to_string(out.fit.inlier_count) + " inliers");
    return out;
  } catch (const Error& e) {
    fail(ErrorCode::CalibrationFailed, "nodes " + pair_name(i, j) + ": " + e.what());
  }
}

Homography calibrate_pair(std::span<const matching::Feature> features_j, std::span<const matching::Feature> features_i,
                          const ProtocolConfig& config, int i, int j) {
  return calibrate_pair_detailed(features_j, features_i, config, i, j).fit.homography;
}

MuResult compute_mu(const DetectionSet& masks_i, const DetectionSet& masks_j, const Homography& h_ji, double tau,
                    int width, int height) {
  MuResult out;
  out.matched.assign(masks_j.size(), -1);
  for (std::size_t k = 0; k < masks_j.size(); ++k) {
    std::optional<Polygon> projected;
    try {
      projected = geometry::project_polygon(h_ji, masks_j[k].polygon);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PointAtInfinity && e.code() != ErrorCode::DegeneratePolygon) throw;
      ++out.skipped;
      continue;
    }
    if (!inside_image(projected->centroid(), width, height)) continue;
    double best = -1.0;
    int best_idx = -1;
    for (std::size_t m = 0; m < masks_i.size(); ++m) {
      const double v = geometry::iou(*projected, masks_i[m].polygon);
      if (v > best) {
        best = v;
        best_idx = static_cast<int>(m);
      }
    }
    if (best_idx >= 0 && best > tau) {
      ++out.mu;
      out.matched[k] = best_idx;
    }
  }
  return out;
}

double aggregate(int mu_ij, int mu_ji, Aggregation mode) {
  switch (mode) {
    case Aggregation::Min: return std::min(mu_ij, mu_ji);
    case Aggregation::Max: return std::max(mu_ij, mu_ji);
    case Aggregation::Mean: return (mu_ij + mu_ji) / 2.0;
  }
  return 0.0;
}

double global_count(std::span<const int> etas, std::span<const double> aggregated) {
  double total = 0.0;
  for (int e : etas) total += e;
  for (double m : aggregated) total -= m;
  return total;
}

int naive_count(std::span<const int> etas) {
  int total = 0;
  for (int e : etas) total += e;
  return total;
}

int masking_count(const Scenario& scenario, const std::map<PairKey, Homography>& homographies, int frame_id) {
  int total = 0;
  for (const auto& node : scenario.nodes) {
    std::vector<Polygon> covered;
    for (int j : node.neighbors) {
      if (j >= node.id) continue;
      const auto it = homographies.find({j, node.id});
      if (it == homographies.end()) continue;
      const auto& other = scenario.node(j);
      try {
        covered.push_back(geometry::project_polygon(it->second, Polygon::rectangle(0, 0, other.width, other.height)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PointAtInfinity && e.code() != ErrorCode::DegeneratePolygon) throw;
      }
    }
    for (const auto& f : node.frames) {
      if (f.frame_id != frame_id) continue;
      for (const auto& d : f.detections) {
        const Point2 c = d.polygon.centroid();
        const bool masked = std::any_of(covered.begin(), covered.end(), [&](const Polygon& p) { return p.contains(c); });
        total += masked ? 0 : 1;
      }
    }
  }
  return total;
}

double round_half_even(double v) { return std::nearbyint(v); }

Simulator::Simulator(const Scenario& scenario, const ProtocolConfig& config)
    : scenario_(scenario), config_(config), counts_(6, 0) {
  validate(scenario_);
  validate(config_);
  nodes_.reserve(scenario_.nodes.size());
  for (const auto& n : scenario_.nodes) {
    index_[n.id] = nodes_.size();
    NodeState s;
    s.spec = &n;
    nodes_.push_back(std::move(s));
  }
}

void Simulator::send(Message m) {
  ++counts_[static_cast<std::size_t>(m.kind)];
  queue_.push_back(std::move(m));
}

void Simulator::drain() {
  while (head_ < queue_.size()) {
    const Message m = std::move(queue_[head_++]);
    deliver(m);
  }
  queue_.clear();
  head_ = 0;
}

void Simulator::deliver(const Message& m) {
  if (m.dst == kSinkId) {
    if (m.frame_id != sink_.frame_id) fail(ErrorCode::ProtocolError, "sink received a report for a stale frame");
    if (m.kind == MessageKind::EtaReport) {
      sink_.etas[m.src] = std::get<int>(m.payload);
    } else if (m.kind == MessageKind::MuReport) {
      const auto& mu = std::get<MuPayload>(m.payload);
      sink_.mus[{mu.from, mu.to}] = mu;
    } else {
      fail(ErrorCode::ProtocolError, std::string("sink cannot handle ") + to_string(m.kind));
    }
    return;
  }
  const auto it = index_.find(m.dst);
  if (it == index_.end()) fail(ErrorCode::ProtocolError, "message to unknown node " + std::to_string(m.dst));
  on_node(nodes_[it->second], m);
}

void Simulator::on_node(NodeState& node, const Message& m) {
  const NodeSpec& spec = *node.spec;
  switch (m.kind) {
    case MessageKind::InitSignal:
      for (int j : spec.neighbors) send({MessageKind::FeatureShare, spec.id, j, 0, spec.features});
      break;
    case MessageKind::FeatureShare: {
      Homography h;
      if (config_.use_true_homographies) {
        const auto it = scenario_.true_homographies.find({m.src, spec.id});
        if (it == scenario_.true_homographies.end())
          fail(ErrorCode::ValidationError, "no true homography for pair " + pair_name(m.src, spec.id));
        h = it->second;
      } else {
        const auto& theirs = std::get<std::vector<matching::Feature>>(m.payload);
        h = calibrate_pair(theirs, spec.features, config_, spec.id, m.src);
      }
      node.homographies[m.src] = h;
      homographies_[{m.src, spec.id}] = h;
      break;
    }
    case MessageKind::ComputeSignal: {
      node.masks = nullptr;
      for (const auto& f : spec.frames)
        if (f.frame_id == m.frame_id) node.masks = &f.detections;
      if (node.masks == nullptr) fail(ErrorCode::ProtocolError, "node has no frame " + std::to_string(m.frame_id));
      node.eta = static_cast<int>(node.masks->size());
      node.mu_sent.clear();
      node.matched_by.clear();
      send({MessageKind::EtaReport, spec.id, kSinkId, m.frame_id, node.eta});
      for (int j : spec.neighbors) send({MessageKind::MaskShare, spec.id, j, m.frame_id, *node.masks});
      auto pending = std::move(node.pending);
      node.pending.clear();
      for (const auto& p : pending) handle_mask(node, p);
      break;
    }
    case MessageKind::MaskShare:
      handle_mask(node, m);
      break;
    default:
      fail(ErrorCode::ProtocolError, std::string("node cannot handle ") + to_string(m.kind));
  }
}

void Simulator::handle_mask(NodeState& node, const Message& m) {
  const NodeSpec& spec = *node.spec;
  if (node.masks == nullptr) {
    node.pending.push_back(m);
    return;
  }
  const auto hit = node.homographies.find(m.src);
  if (hit == node.homographies.end())
    fail(ErrorCode::ProtocolError, "node " + std::to_string(spec.id) + " has no homography for " + std::to_string(m.src));
  const auto r = compute_mu(*node.masks, std::get<DetectionSet>(m.payload), hit->second, config_.tau, spec.width,
                            spec.height);
  node.mu_sent[m.src] = r.mu;
  node.matched_by[m.src] = r.matched;
  send({MessageKind::MuReport, spec.id, kSinkId, m.frame_id, MuPayload{m.src, spec.id, r.mu, r.skipped}});
}

void Simulator::init_phase() {
  for (const auto& n : nodes_) send({MessageKind::InitSignal, kSinkId, n.spec->id, 0, {}});
  drain();
  for (const auto& n : nodes_)
    for (int j : n.spec->neighbors)
      if (!n.homographies.count(j))
        fail(ErrorCode::ProtocolError, "calibration incomplete for pair " + pair_name(n.spec->id, j));
  initialised_ = true;
}

FrameReport Simulator::run_frame(int frame_id) {
  if (!initialised_) fail(ErrorCode::ProtocolError, "run the init phase first");
  sink_ = SinkState{frame_id, {}, {}};
  for (auto& n : nodes_) n.masks = nullptr;
  for (const auto& n : nodes_) send({MessageKind::ComputeSignal, kSinkId, n.spec->id, frame_id, {}});
  drain();

  FrameReport out;
  out.frame_id = frame_id;
  for (const auto& n : nodes_) {
    const auto it = sink_.etas.find(n.spec->id);
    if (it == sink_.etas.end()) fail(ErrorCode::ProtocolError, "missing count from node " + std::to_string(n.spec->id));
    out.etas.push_back(it->second);
  }
  std::vector<int> ids;
  for (const auto& n : nodes_) ids.push_back(n.spec->id);
  std::sort(ids.begin(), ids.end());
  std::vector<double> aggregated;
  for (int a : ids)
    for (int b : scenario_.node(a).neighbors) {
      if (b <= a) continue;
      const auto ab = sink_.mus.find({a, b});
      const auto ba = sink_.mus.find({b, a});
      if (ab == sink_.mus.end() || ba == sink_.mus.end())
        fail(ErrorCode::ProtocolError, "missing duplicate counts for pair " + pair_name(a, b));
      const double agg = aggregate(ab->second.mu, ba->second.mu, config_.aggregation);
      out.pairs.push_back({a, b, ab->second.mu, ba->second.mu, agg});
      out.skipped_projections += ab->second.skipped + ba->second.skipped;
      aggregated.push_back(agg);
    }
  for (const auto& n : nodes_) {
    std::map<int, int> hits;
    for (const auto& [j, matched] : n.matched_by)
      for (int idx : matched)
        if (idx >= 0) ++hits[idx];
    for (const auto& [idx, c] : hits) out.triple_overlap_candidates += c >= 2 ? 1 : 0;
  }
  out.naive = naive_count(out.etas);
  out.ours_raw = global_count(out.etas, aggregated);
  out.ours_rounded = round_half_even(out.ours_raw);
  out.masking = masking_count(scenario_, homographies_, frame_id);
  for (const auto& g : scenario_.ground_truth)
    if (g.frame_id == frame_id) out.gt = g.global_count;
  return out;
}

Report run_scenario(const Scenario& scenario, const ProtocolConfig& config) {
  Simulator sim(scenario, config);
  sim.init_phase();
  Report report;
  report.config = config;
  for (const auto& n : scenario.nodes) report.node_ids.push_back(n.id);
  for (int f : scenario.frame_ids()) report.frames.push_back(sim.run_frame(f));
  report.message_counts = sim.message_counts();
  report.homographies = sim.homographies();
  return report;
}

}  // namespace meshcount::protocol
