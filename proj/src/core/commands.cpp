#include "core/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "core/annotate.hpp"
#include "core/codecs.hpp"
#include "core/error.hpp"
#include "core/text.hpp"

namespace meshcount::commands {

using nlohmann::ordered_json;
using report::Cell;
using report::Row;
using report::RunReport;

namespace {

ordered_json number(double v) {
  if (!std::isfinite(v)) return text::format_number(v);
  return v;
}

ordered_json matrix_json(const geometry::Homography& h) { return h.matrix(); }

ordered_json ransac_json(const geometry::RansacParams& p) {
  return {{"max_iterations", p.max_iterations},
          {"inlier_threshold", p.inlier_threshold},
          {"confidence", p.confidence},
          {"seed", p.seed}};
}

ordered_json protocol_json(const protocol::ProtocolConfig& c) {
  return {{"tau", c.tau},
          {"aggregation", protocol::to_string(c.aggregation)},
          {"ratio", c.ratio},
          {"cross_check", c.cross_check},
          {"max_dist", c.max_dist},
          {"use_true_homographies", c.use_true_homographies},
          {"ransac", ransac_json(c.ransac)}};
}

void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::InvalidArgument, msg);
}

std::string read(const std::string& path) { return text::read_file(path); }

const char* kernel_name(density::KernelSpec::Mode m) {
  switch (m) {
    case density::KernelSpec::Mode::Fixed: return "fixed";
    case density::KernelSpec::Mode::PerPoint: return "per-point";
    case density::KernelSpec::Mode::KnnAdaptive: return "knn";
  }
  return "?";
}

std::string file_stem(const std::string& path) {
  const auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  if (name.size() > 5 && name.compare(name.size() - 5, 5, ".json") == 0) name.resize(name.size() - 5);
  return name;
}

}  // namespace

RunReport calibrate(const CalibrateOptions& o) {
  const bool from_features = !o.features_a.empty() || !o.features_b.empty();
  require(from_features != !o.correspondences.empty(), "give either two feature files or a correspondence file");
  require(!from_features || (!o.features_a.empty() && !o.features_b.empty()), "feature mode needs both feature files");
  protocol::validate(o.matcher);

  RunReport r;
  r.command = "calibrate";
  r.seed = o.matcher.ransac.seed;
  r.config = {{"features_a", o.features_a},
              {"features_b", o.features_b},
              {"correspondences", o.correspondences},
              {"ratio", o.matcher.ratio},
              {"cross_check", o.matcher.cross_check},
              {"max_dist", o.matcher.max_dist},
              {"ransac", ransac_json(o.matcher.ransac)}};

  std::vector<geometry::Correspondence> corrs;
  geometry::RansacResult fit;
  if (from_features) {
    const auto a = codecs::decode_features(read(o.features_a), o.features_a);
    const auto b = codecs::decode_features(read(o.features_b), o.features_b);
    auto cal = protocol::calibrate_pair_detailed(a, b, o.matcher, 1, 0);
    r.details["ratio_matches"] = cal.ratio_matches;
    corrs = std::move(cal.correspondences);
    fit = std::move(cal.fit);
  } else {
    corrs = codecs::decode_correspondences(read(o.correspondences), o.correspondences);
    fit = geometry::ransac_homography(corrs, o.matcher.ransac);
  }

  const auto inv = fit.homography.inverse();
  r.columns = {"index", "src_x", "src_y", "dst_x", "dst_y", "inlier", "transfer_error"};
  for (std::size_t k = 0; k < corrs.size(); ++k) {
    const auto& c = corrs[k];
    Cell err;
    try {
      err = geometry::symmetric_transfer_error(fit.homography, inv, c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PointAtInfinity) throw;
    }
    r.rows.push_back({static_cast<long long>(k), c.src.x, c.src.y, c.dst.x, c.dst.y,
                      static_cast<long long>(fit.inlier_mask[k] ? 1 : 0), err});
  }
  r.summary = report::mean_summary(r, {"src_x", "src_y", "dst_x", "dst_y"}, {});
  r.details["homography"] = matrix_json(fit.homography);
  r.details["correspondences"] = corrs.size();
  r.details["inliers"] = fit.inlier_count;
  r.details["iterations"] = fit.iterations;
  if (!o.homography_out.empty()) text::write_file(o.homography_out, codecs::encode_homography(fit.homography));
  return r;
}

RunReport simulate(const std::string& scenario_path, const protocol::ProtocolConfig& config) {
  protocol::validate(config);
  return simulate(codecs::load_scenario(scenario_path), config, scenario_path);
}

RunReport simulate(const protocol::Scenario& scenario, const protocol::ProtocolConfig& config,
                   const std::string& label) {
  protocol::validate(config);
  protocol::validate(scenario);
  const auto rep = protocol::run_scenario(scenario, config);

  RunReport r;
  r.command = "simulate";
  r.seed = config.ransac.seed;
  r.config = protocol_json(config);
  r.config["scenario"] = label;
  r.columns = {"frame_id", "naive", "masking", "ours_raw", "ours_rounded", "gt", "err_n", "err_m", "err_o"};
  ordered_json frames = ordered_json::array();
  for (const auto& f : rep.frames) {
    Row row{static_cast<long long>(f.frame_id), static_cast<long long>(f.naive), static_cast<long long>(f.masking),
            f.ours_raw, f.ours_rounded, Cell{}, Cell{}, Cell{}, Cell{}};
    if (f.gt) {
      row[5] = *f.gt;
      row[6] = f.naive - *f.gt;
      row[7] = f.masking - *f.gt;
      row[8] = f.ours_rounded - *f.gt;
    }
    r.rows.push_back(std::move(row));

    ordered_json etas = ordered_json::object();
    for (std::size_t k = 0; k < rep.node_ids.size(); ++k) etas[std::to_string(rep.node_ids[k])] = f.etas[k];
    ordered_json pairs = ordered_json::array();
    for (const auto& p : f.pairs)
      pairs.push_back({{"a", p.a}, {"b", p.b}, {"mu_ab", p.mu_ab}, {"mu_ba", p.mu_ba}, {"aggregated", p.aggregated}});
    frames.push_back({{"frame_id", f.frame_id},
                      {"etas", std::move(etas)},
                      {"pairs", std::move(pairs)},
                      {"skipped_projections", f.skipped_projections},
                      {"triple_overlap_candidates", f.triple_overlap_candidates}});
  }
  r.summary = report::mean_summary(r, {}, {"err_n", "err_m", "err_o"});
  r.details["node_ids"] = rep.node_ids;
  ordered_json counts = ordered_json::object();
  for (std::size_t k = 0; k < rep.message_counts.size(); ++k)
    counts[protocol::to_string(static_cast<protocol::MessageKind>(k))] = rep.message_counts[k];
  r.details["messages"] = std::move(counts);
  ordered_json hs = ordered_json::array();
  for (const auto& [key, h] : rep.homographies)
    hs.push_back({{"from", key.first}, {"to", key.second}, {"matrix", matrix_json(h)}});
  r.details["homographies"] = std::move(hs);
  r.details["frames"] = std::move(frames);
  return r;
}

RunReport gen_scene(const GenSceneOptions& o) {
  require(!o.scenario_out.empty(), "an output scenario path is required");
  auto g = scene::generate_scene(o.spec);
  const std::string stem = file_stem(o.scenario_out);
  for (auto& n : g.scenario.nodes) n.features_file = stem + ".node" + std::to_string(n.id) + ".csv";
  codecs::save_scenario(g.scenario, o.scenario_out);

  const auto& s = o.spec;
  RunReport r;
  r.command = "gen-scene";
  r.seed = s.seed;
  r.config = {{"n_cameras", s.n_cameras},
              {"width", s.width},
              {"height", s.height},
              {"n_vehicles", s.n_vehicles},
              {"n_frames", s.n_frames},
              {"overlap", s.overlap},
              {"warp", scene::to_string(s.warp)},
              {"drop_rate", s.noise.drop_rate},
              {"jitter_px", s.noise.jitter_px},
              {"spurious_rate", s.noise.spurious_rate},
              {"keypoints_per_camera", s.keypoints_per_camera},
              {"descriptor_dim", s.descriptor_dim},
              {"descriptor_noise", s.descriptor_noise},
              {"scenario", o.scenario_out}};
  r.columns = {"frame_id", "vehicles", "duplicates", "detections", "spurious"};
  for (std::size_t f = 0; f < g.truth.size(); ++f) {
    long long dets = 0, spurious = 0;
    for (const auto& n : g.scenario.nodes)
      for (const auto& d : n.frames[f].detections) {
        ++dets;
        if (d.identity < 0) ++spurious;
      }
    r.rows.push_back({static_cast<long long>(g.truth[f].frame_id), static_cast<long long>(g.truth[f].vehicles),
                      static_cast<long long>(g.truth[f].duplicates), dets, spurious});
  }
  r.summary = report::mean_summary(r, {}, {});
  ordered_json w2i = ordered_json::object();
  for (const auto& [id, h] : g.world_to_image) w2i[std::to_string(id)] = matrix_json(h);
  r.details["world_to_image"] = std::move(w2i);
  return r;
}

RunReport density_map(const DensityOptions& o) {
  require(o.height > 0 && o.width > 0, "map height and width must be positive");
  const auto dots = codecs::decode_dots(read(o.dots), o.dots);
  const auto map = density::dots_to_density(dots, o.height, o.width, o.kernel);
  std::vector<double> sigmas;
  switch (o.kernel.mode) {
    case density::KernelSpec::Mode::Fixed: sigmas.assign(dots.points.size(), o.kernel.sigma); break;
    case density::KernelSpec::Mode::PerPoint: sigmas = dots.sigmas; break;
    case density::KernelSpec::Mode::KnnAdaptive: sigmas = density::knn_sigmas(dots.points, o.kernel.k, o.kernel.beta); break;
  }

  RunReport r;
  r.command = "density";
  r.config = {{"dots", o.dots},
              {"height", o.height},
              {"width", o.width},
              {"kernel", kernel_name(o.kernel.mode)},
              {"sigma", o.kernel.sigma},
              {"k", o.kernel.k},
              {"beta", o.kernel.beta}};
  r.columns = {"index", "x", "y", "sigma"};
  for (std::size_t k = 0; k < dots.points.size(); ++k)
    r.rows.push_back({static_cast<long long>(k), dots.points[k].x, dots.points[k].y, sigmas[k]});
  r.summary = report::mean_summary(r, {}, {});
  r.details["dots"] = dots.points.size();
  r.details["count"] = density::count(map);
  if (!o.map_out.empty()) text::write_file(o.map_out, codecs::encode_dmf(map));
  if (!o.csv_out.empty()) text::write_file(o.csv_out, codecs::encode_density_csv(map));
  return r;
}

RunReport eval_count(const EvalCountOptions& o) {
  const auto pred = codecs::decode_counts(read(o.pred), o.pred, text::directory_of(o.pred));
  const auto gt = codecs::decode_counts(read(o.gt), o.gt, text::directory_of(o.gt));
  for (const auto& [id, e] : gt)
    if (!pred.count(id)) fail(ErrorCode::ValidationError, "image '" + id + "' has no prediction");
  for (const auto& [id, e] : pred)
    if (!gt.count(id)) fail(ErrorCode::ValidationError, "image '" + id + "' has no ground truth");

  std::vector<metrics::CountPair> pairs;
  std::vector<density::DensityMap> pm, gm;
  bool maps = true;
  for (const auto& [id, g] : gt) {
    const auto& p = pred.at(id);
    pairs.push_back({g.count, p.count});
    if (g.map && p.map) {
      pm.push_back(*p.map);
      gm.push_back(*g.map);
    } else {
      maps = false;
    }
  }
  require(o.game <= 0 || maps, "GAME above level 0 needs density maps for every image");

  RunReport r;
  r.command = "eval-count";
  r.config = {{"pred", o.pred}, {"gt", o.gt}, {"game", o.game}};
  r.columns = {"metric", "value"};
  r.rows.push_back({std::string("MAE"), metrics::mae(pairs)});
  r.rows.push_back({std::string("MSE"), metrics::mse(pairs)});
  r.rows.push_back({std::string("RMSE"), metrics::rmse(pairs)});
  Cell mare;
  try {
    mare = metrics::mare(pairs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroGroundTruth) throw;
    r.details["mare_undefined"] = "zero ground-truth count";
  }
  r.rows.push_back({std::string("MARE"), mare});
  for (int l = 0; l <= o.game; ++l) {
    const double v = maps ? metrics::game(pm, gm, l) : metrics::mae(pairs);
    r.rows.push_back({"GAME(" + std::to_string(l) + ")", v});
  }

  ordered_json images = ordered_json::array();
  std::size_t k = 0;
  for (const auto& [id, g] : gt) {
    ordered_json img{{"image_id", id}, {"gt", g.count}, {"pred", pairs[k].pred}};
    if (maps) {
      ordered_json levels = ordered_json::array();
      for (int l = 0; l <= o.game; ++l) levels.push_back(metrics::game_image(pm[k], gm[k], l));
      img["game"] = std::move(levels);
    }
    images.push_back(std::move(img));
    ++k;
  }
  r.details["images"] = std::move(images);
  return r;
}

RunReport eval_detect(const EvalDetectOptions& o) {
  require(!(o.iou_sweep && o.matcher.kind == metrics::MatcherConfig::Kind::Point), "the IoU sweep needs box geometry");
  require(o.min_agreement >= 0, "min agreement must be non-negative");
  codecs::DetectionTable table;
  codecs::decode_predictions(read(o.pred), o.pred, table);
  codecs::decode_ground_truth(read(o.gt), o.gt, table);
  std::vector<std::string> ids;
  std::vector<metrics::ImageDetections> images;
  std::set<int> classes;
  for (const auto& [id, img] : table) {
    ids.push_back(id);
    images.push_back(img);
    for (const auto& p : img.preds) classes.insert(p.class_id);
    for (const auto& g : img.gts) classes.insert(g.class_id);
  }
  if (images.empty()) fail(ErrorCode::EmptyInput, "no detections or ground truth");

  RunReport r;
  r.command = "eval-detect";
  r.config = {{"pred", o.pred},
              {"gt", o.gt},
              {"matcher", o.matcher.kind == metrics::MatcherConfig::Kind::Box ? "box" : "point"},
              {"iou_threshold", o.matcher.iou_threshold},
              {"radius", o.matcher.radius},
              {"score_threshold", o.score_threshold},
              {"iou_sweep", o.iou_sweep},
              {"min_agreement", o.min_agreement},
              {"raters", o.raters}};
  r.columns = {"class_id", "gt", "pred", "tp", "fp", "fn", "precision", "recall", "f1", "ap"};
  ordered_json curves = ordered_json::object();
  for (int c : classes) {
    long long n_gt = 0, n_pred = 0;
    metrics::MatchResult total;
    for (const auto& img : images) {
      metrics::ImageDetections only;
      for (const auto& p : img.preds)
        if (p.class_id == c) only.preds.push_back(p);
      for (const auto& g : img.gts)
        if (g.class_id == c) only.gts.push_back(g);
      n_gt += static_cast<long long>(only.gts.size());
      n_pred += static_cast<long long>(only.preds.size());
      const auto m = metrics::match_image(only, o.matcher, o.score_threshold);
      total.tp += m.tp;
      total.fp += m.fp;
      total.fn += m.fn;
    }
    const auto pr = metrics::precision_recall_f1(total);
    const auto curve = metrics::pr_curve_and_ap(images, o.matcher, c);
    r.rows.push_back({static_cast<long long>(c), n_gt, n_pred, static_cast<long long>(total.tp),
                      static_cast<long long>(total.fp), static_cast<long long>(total.fn), pr.precision, pr.recall,
                      pr.f1, curve.ap});
    ordered_json pts = ordered_json::array();
    for (const auto& p : curve.curve)
      pts.push_back({{"threshold", p.threshold}, {"recall", p.recall}, {"precision", p.precision}});
    curves[std::to_string(c)] = std::move(pts);
  }
  r.summary = report::mean_summary(r, {}, {});
  r.details["curves"] = std::move(curves);
  if (o.iou_sweep) r.details["map_sweep"] = metrics::mean_ap_sweep(images, metrics::coco_iou_thresholds());
  if (o.min_agreement > 0) {
    const auto counts = metrics::agreement_filtered_counts(images, o.min_agreement, o.raters, o.score_threshold);
    ordered_json per = ordered_json::array();
    for (std::size_t k = 0; k < counts.size(); ++k)
      per.push_back({{"image_id", ids[k]}, {"gt", counts[k].gt}, {"pred", counts[k].pred}});
    r.details["agreement_counts"] = {{"mae", metrics::mae(counts)}, {"images", std::move(per)}};
  }
  return r;
}

RunReport rescore_train(const RescoreTrainOptions& o) {
  require(!o.model_out.empty(), "a model output path is required");
  rescoring::validate(o.train);
  const auto data = codecs::decode_samples(read(o.samples), o.samples, o.raters);
  const auto result = rescoring::train(data, o.train);
  text::write_file(o.model_out, codecs::encode_model(result.model));
  if (!o.trace_out.empty()) text::write_file(o.trace_out, codecs::encode_loss_trace(result.loss_trace));

  RunReport r;
  r.command = "rescore-train";
  r.seed = o.train.seed;
  r.config = {{"samples", o.samples},
              {"raters", o.raters},
              {"method", rescoring::to_string(o.train.method)},
              {"learning_rate", o.train.learning_rate},
              {"epochs", o.train.epochs},
              {"batch_size", o.train.batch_size},
              {"margin", o.train.margin},
              {"tuples_per_epoch", o.train.tuples_per_epoch},
              {"model", o.model_out}};
  r.columns = {"epoch", "loss"};
  for (std::size_t k = 0; k < result.loss_trace.size(); ++k)
    r.rows.push_back({static_cast<long long>(k), result.loss_trace[k]});
  std::vector<double> scores, agreements;
  for (const auto& s : data.samples) {
    scores.push_back(rescoring::score(result.model, s.features));
    agreements.push_back(s.agreement);
  }
  try {
    r.details["train_pearson"] = rescoring::pearson_r(scores, agreements);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantInput) throw;
    r.details["train_pearson"] = nullptr;
  }
  return r;
}

RunReport rescore_eval(const RescoreEvalOptions& o) {
  const bool counts = !o.detections.empty() || !o.gt_counts.empty();
  require(counts != !o.samples.empty(), "give either samples or detections with ground-truth counts");
  require(!counts || (!o.detections.empty() && !o.gt_counts.empty()), "count mode needs detections and gt counts");
  const auto model = codecs::decode_model(read(o.model), o.model);

  RunReport r;
  r.command = "rescore-eval";
  r.config = {{"model", o.model}, {"samples", o.samples}, {"detections", o.detections}, {"gt_counts", o.gt_counts}};
  r.config["threshold"] = o.threshold ? number(*o.threshold) : ordered_json(nullptr);

  if (!counts) {
    const auto data = codecs::decode_samples(read(o.samples), o.samples, model.raters);
    r.columns = {"index", "agreement", "score"};
    std::vector<double> scores, agreements;
    for (std::size_t k = 0; k < data.samples.size(); ++k) {
      const auto& s = data.samples[k];
      if (s.features.size() != model.dim) fail(ErrorCode::DimensionMismatch, "sample dimension differs from the model");
      scores.push_back(rescoring::score(model, s.features));
      agreements.push_back(s.agreement);
      r.rows.push_back({static_cast<long long>(k), static_cast<long long>(s.agreement), scores.back()});
    }
    r.summary = report::mean_summary(r, {}, {});
    r.details["pearson"] = rescoring::pearson_r(scores, agreements);
    return r;
  }

  const auto dets = codecs::decode_image_features(read(o.detections), o.detections);
  const auto gt = codecs::decode_counts(read(o.gt_counts), o.gt_counts, text::directory_of(o.gt_counts));
  for (const auto& [id, d] : dets)
    if (!gt.count(id)) fail(ErrorCode::ValidationError, "image '" + id + "' has no ground-truth count");
  std::vector<std::string> ids;
  std::vector<std::vector<double>> scores;
  std::vector<double> gts;
  for (const auto& [id, g] : gt) {
    ids.push_back(id);
    gts.push_back(g.count);
    scores.emplace_back();
    const auto it = dets.find(id);
    if (it == dets.end()) continue;
    for (const auto& f : it->second) {
      if (f.size() != model.dim) fail(ErrorCode::DimensionMismatch, "detection dimension differs from the model");
      scores.back().push_back(rescoring::score(model, f));
    }
  }
  if (ids.empty()) fail(ErrorCode::EmptyInput, "no images");
  const double threshold = o.threshold ? *o.threshold : rescoring::tune_threshold(scores, gts);
  r.columns = {"image_id", "gt", "unfiltered", "filtered", "err_unfiltered", "err_filtered"};
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto kept = std::count_if(scores[k].begin(), scores[k].end(), [&](double s) { return s >= threshold; });
    const double all = static_cast<double>(scores[k].size());
    r.rows.push_back({ids[k], gts[k], all, static_cast<double>(kept), all - gts[k], static_cast<double>(kept) - gts[k]});
  }
  r.summary = report::mean_summary(r, {}, {"err_unfiltered", "err_filtered"});
  r.details["threshold"] = number(threshold);
  r.details["tuned"] = !o.threshold.has_value();
  return r;
}

RunReport sanitize_bboxes(const SanitizeOptions& o) {
  require(o.max_z > 0.0, "max_z must be positive");
  const auto input = codecs::decode_annotations(read(o.input), o.input);
  const bool input_has_hm = std::any_of(input.h_m.begin(), input.h_m.end(), [](const auto& v) { return v.has_value(); });

  RunReport r;
  r.command = "sanitize-bboxes";
  r.config = {{"input", o.input}, {"calibration", o.calibration}, {"max_z", o.max_z}};
  r.config["alpha"] = o.alpha ? number(*o.alpha) : ordered_json(nullptr);

  double alpha = 0.0;
  if (o.alpha) {
    alpha = *o.alpha;
  } else {
    const auto calib = o.calibration.empty() ? input : codecs::decode_annotations(read(o.calibration), o.calibration);
    std::vector<annotate::CalibrationSample> samples;
    for (std::size_t k = 0; k < calib.boxes.size(); ++k)
      if (calib.h_m[k]) samples.push_back({calib.boxes[k].h_s, calib.boxes[k].z, *calib.h_m[k]});
    const auto fit = annotate::fit_alpha(samples);
    alpha = fit.alpha;
    r.details["fit"] = {{"alpha", fit.alpha},
                        {"residual_rmse", fit.residual_rmse},
                        {"n_samples", fit.n_samples},
                        {"std_error", fit.std_error}};
  }
  r.details["alpha"] = alpha;

  r.columns = {"h_s", "w_s", "z"};
  if (input_has_hm) r.columns.push_back("h_m");
  r.columns.push_back(input_has_hm ? "sanitized_h_m" : "h_m");
  r.columns.push_back(input_has_hm ? "sanitized_w_m" : "w_m");
  std::size_t pruned = 0;
  for (std::size_t k = 0; k < input.boxes.size(); ++k) {
    const auto& b = input.boxes[k];
    if (annotate::prune_far(std::span(&b, 1), o.max_z).empty()) {
      ++pruned;
      continue;
    }
    const auto s = annotate::sanitize_box(b, alpha);
    Row row{b.h_s, b.w_s, b.z};
    if (input_has_hm) row.push_back(input.h_m[k] ? Cell(*input.h_m[k]) : Cell{});
    row.push_back(s.h_m);
    row.push_back(s.w_m);
    r.rows.push_back(std::move(row));
  }
  r.details["pruned"] = pruned;
  return r;
}

RunReport distance_check(const DistanceCheckOptions& o) {
  require(o.threshold > 0.0 && std::isfinite(o.threshold), "threshold must be positive");
  const auto dots = codecs::decode_dots(read(o.positions), o.positions);
  const auto h = codecs::decode_homography(read(o.homography), o.homography);
  std::vector<geometry::Point2> ground;
  for (const auto& p : dots.points) ground.push_back(geometry::project_point(h, p));
  const auto groups = geometry::distance_violations(ground, o.threshold);
  std::vector<long long> group_of(ground.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (std::size_t i : groups[g]) group_of[i] = static_cast<long long>(g);

  RunReport r;
  r.command = "distance-check";
  r.config = {{"positions", o.positions}, {"homography", o.homography}, {"threshold", o.threshold}};
  r.columns = {"index", "x", "y", "ground_x", "ground_y", "nearest", "group"};
  std::size_t close_pairs = 0;
  for (std::size_t i = 0; i < ground.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ground.size(); ++j) {
      if (i == j) continue;
      const double d = geometry::distance(ground[i], ground[j]);
      nearest = std::min(nearest, d);
      if (j > i && d < o.threshold) ++close_pairs;
    }
    r.rows.push_back({static_cast<long long>(i), dots.points[i].x, dots.points[i].y, ground[i].x, ground[i].y,
                      std::isinf(nearest) ? Cell{} : Cell(nearest), group_of[i]});
  }
  r.details["groups"] = groups;
  r.details["close_pairs"] = close_pairs;
  return r;
}

}  // namespace meshcount::commands
