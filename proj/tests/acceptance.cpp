// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core/annotate.hpp"
#include "core/codecs.hpp"
#include "core/commands.hpp"
#include "core/density.hpp"
#include "core/geometry.hpp"
#include "core/metrics.hpp"
#include "core/protocol.hpp"
#include "core/rescoring.hpp"
#include "core/scene.hpp"
#include "core/text.hpp"

using namespace meshcount;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass;
  std::string detail;
};

double cell(const report::Row& row, std::size_t c) {
  if (const auto* d = std::get_if<double>(&row[c])) return *d;
  return static_cast<double>(std::get<long long>(row[c]));
}

std::size_t col(const report::RunReport& r, const std::string& name) {
  return static_cast<std::size_t>(std::find(r.columns.begin(), r.columns.end(), name) - r.columns.begin());
}

// Identity-label oracle: for each frame, the sum over vehicles of
// (number of cameras reporting that identity - 1).
std::vector<int> duplicates_by_identity(const protocol::Scenario& s) {
  std::vector<int> out;
  for (std::size_t f = 0; f < s.nodes.front().frames.size(); ++f) {
    std::map<int, int> seen;
    for (const auto& n : s.nodes)
      for (const auto& d : n.frames[f].detections)
        if (d.identity >= 0) ++seen[d.identity];
    int dup = 0;
    for (const auto& [id, c] : seen) dup += c - 1;
    out.push_back(dup);
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome protocol_exactness() {
  const auto t0 = Clock::now();
  int bad_frames = 0, frames = 0;
  for (int s = 0; s < 100; ++s) {
    scene::SyntheticSceneSpec spec;
    spec.n_cameras = 2 + s % 4;
    spec.warp = static_cast<scene::WarpFamily>(s % 3);
    spec.overlap = 0.2 + 0.05 * (s % 7);
    spec.n_vehicles = 10;
    spec.n_frames = 5;
    spec.seed = static_cast<std::uint64_t>(s);
    const auto g = scene::generate_scene(spec);
    protocol::ProtocolConfig cfg;
    cfg.ransac.seed = static_cast<std::uint64_t>(s);
    const auto r = commands::simulate(g.scenario, cfg, "generated");
    const auto dups = duplicates_by_identity(g.scenario);
    for (std::size_t f = 0; f < r.rows.size(); ++f) {
      ++frames;
      const double gt = cell(r.rows[f], col(r, "gt"));
      const double ours = cell(r.rows[f], col(r, "ours_raw"));
      const double naive = cell(r.rows[f], col(r, "naive"));
      if (ours != gt || naive - gt != dups[f]) ++bad_frames;
    }
  }
  const double secs = seconds_since(t0);
  return {bad_frames == 0 && secs < 10.0, std::to_string(frames - bad_frames) + "/" + std::to_string(frames) +
                                              " frames exact with naive error = duplicates, " +
                                              text::format_number(std::round(secs * 100) / 100) + " s"};
}

Outcome noisy_ordering() {
  int ordered = 0;
  double sum_n = 0, sum_m = 0, sum_o = 0;
  for (int s = 0; s < 100; ++s) {
    scene::SyntheticSceneSpec spec;
    spec.n_cameras = 2 + s % 4;
    spec.warp = static_cast<scene::WarpFamily>(s % 3);
    spec.overlap = 0.3 + 0.04 * (s % 6);
    spec.n_vehicles = 16;
    spec.n_frames = 30;
    spec.noise = {0.05, 2.0, 0.05};
    spec.seed = static_cast<std::uint64_t>(1000 + s);
    const auto g = scene::generate_scene(spec);
    protocol::ProtocolConfig cfg;
    cfg.ransac.seed = static_cast<std::uint64_t>(s);
    const auto r = commands::simulate(g.scenario, cfg, "generated");
    const double n = cell(r.summary, col(r, "err_n"));
    const double m = cell(r.summary, col(r, "err_m"));
    const double o = cell(r.summary, col(r, "err_o"));
    sum_n += n;
    sum_m += m;
    sum_o += o;
    if (n > m && m > o) ++ordered;
  }
  return {ordered >= 90, std::to_string(ordered) + "/100 scenarios with N > M > O; mean |err| N " +
                             text::format_number(std::round(sum_n) / 100) + ", M " +
                             text::format_number(std::round(sum_m) / 100) + ", O " +
                             text::format_number(std::round(sum_o) / 100)};
}

geometry::Homography random_homography(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = 0.1 * u(rng), s = 1.0 + 0.1 * u(rng);
  return geometry::Homography(geometry::Homography::Matrix{
      s * std::cos(a) + 0.05 * u(rng), -s * std::sin(a) + 0.05 * u(rng), 20.0 * u(rng),
      s * std::sin(a) + 0.05 * u(rng), s * std::cos(a) + 0.05 * u(rng), 20.0 * u(rng), 3e-4 * u(rng), 3e-4 * u(rng),
      1.0});
}

Outcome homography_recovery() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> px(0.0, 640.0), py(0.0, 480.0);
  std::normal_distribution<double> noise(0.0, 0.5);
  double total = 0.0, worst = 0.0;
  int over = 0;
  for (int t = 0; t < 100; ++t) {
    const auto h = random_homography(rng);
    std::vector<geometry::Correspondence> clean, corrs;
    for (int k = 0; k < 100; ++k) {
      const geometry::Point2 p{px(rng), py(rng)};
      const auto q = geometry::project_point(h, p);
      clean.push_back({p, q});
      if (k % 10 < 3)
        corrs.push_back({p, {px(rng), py(rng)}});
      else
        corrs.push_back({{p.x + noise(rng), p.y + noise(rng)}, {q.x + noise(rng), q.y + noise(rng)}});
    }
    std::shuffle(corrs.begin(), corrs.end(), rng);
    geometry::RansacParams params;
    params.seed = static_cast<std::uint64_t>(t);
    const auto fit = geometry::ransac_homography(corrs, params);
    const auto inv = fit.homography.inverse();
    double err = 0.0;
    for (const auto& c : clean) err += geometry::symmetric_transfer_error(fit.homography, inv, c);
    err /= static_cast<double>(clean.size());
    total += err;
    worst = std::max(worst, err);
    if (err > 3.0) ++over;
  }
  const double mean = total / 100.0;
  return {mean < 1.0 && over == 0, "mean transfer error " + text::format_number(std::round(mean * 1e4) / 1e4) +
                                       " px, worst " + text::format_number(std::round(worst * 1e4) / 1e4) +
                                       " px, trials over 3 px: " + std::to_string(over)};
}

Outcome density_conservation() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  std::vector<density::DensityMap> preds, gts;
  std::vector<metrics::CountPair> pairs;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t h = 8 + rng() % 40, w = 8 + rng() % 40;
    std::uniform_real_distribution<double> ux(0.0, static_cast<double>(w)), uy(0.0, static_cast<double>(h));
    density::DotAnnotation dots;
    const int n = static_cast<int>(rng() % 30);
    for (int k = 0; k < n; ++k) {
      geometry::Point2 p{ux(rng), uy(rng)};
      // A third of the dots sit on or next to the border.
      switch (rng() % 9) {
        case 0: p.x = 0.0; break;
        case 1: p.y = 0.0; break;
        case 2: p.x = std::nextafter(static_cast<double>(w), 0.0); break;
        default: break;
      }
      dots.points.push_back(p);
    }
    const double sigma = 0.3 + 6.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto gt = density::dots_to_density(dots, h, w, density::KernelSpec::fixed(sigma));
    worst = std::max(worst, std::fabs(density::count(gt) - n));
    density::DotAnnotation fewer = dots;
    if (!fewer.points.empty() && rng() % 2) fewer.points.pop_back();
    const auto pred = density::dots_to_density(fewer, h, w, density::KernelSpec::fixed(sigma * 1.3));
    worst = std::max(worst, std::fabs(density::count(pred) - static_cast<double>(fewer.points.size())));
    preds.push_back(pred);
    gts.push_back(gt);
    pairs.push_back({density::count(gt), density::count(pred)});
  }
  const double g0 = metrics::game(preds, gts, 0), mae = metrics::mae(pairs);
  return {worst < 1e-6 && g0 == mae, "worst |count - dots| " + text::format_number(worst) + ", GAME(0) " +
                                         text::format_number(g0) + (g0 == mae ? " == " : " != ") + "MAE " +
                                         text::format_number(mae)};
}

// AP by enumerating every threshold: precision and recall among predictions
// scoring at least t, then the area under the right envelope.
double ap_by_enumeration(const std::vector<double>& scores, const std::vector<bool>& tp, std::size_t n_gt) {
  std::set<double, std::greater<>> thresholds(scores.begin(), scores.end());
  std::vector<std::pair<double, double>> pr;  // recall, precision
  for (double t : thresholds) {
    std::size_t kept = 0, hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i)
      if (scores[i] >= t) {
        ++kept;
        hits += tp[i] ? 1 : 0;
      }
    pr.push_back({n_gt ? static_cast<double>(hits) / n_gt : 0.0, static_cast<double>(hits) / kept});
  }
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    double best = 0.0;
    for (std::size_t j = i; j < pr.size(); ++j) best = std::max(best, pr[j].second);
    ap += (pr[i].first - prev_recall) * best;
    prev_recall = pr[i].first;
  }
  return ap;
}

Outcome metric_oracles() {
  std::mt19937_64 rng(5);
  // SSIM of a map with itself.
  double ssim_worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t h = 11 + rng() % 30, w = 11 + rng() % 30;
    std::vector<double> v(h * w);
    std::exponential_distribution<double> e(1.0 + static_cast<double>(rng() % 5));
    for (auto& x : v) x = (rng() % 4 == 0) ? 0.0 : e(rng);
    const density::DensityMap m(h, w, v);
    ssim_worst = std::max(ssim_worst, std::fabs(metrics::ssim(m, m) - 1.0));
  }

  // Every labelling of five detections as hit or miss, every assignment of
  // scores from {0.25, 0.5, 0.75}, and up to two unmatched ground truths.
  std::size_t ap_cases = 0, ap_bad = 0;
  const double levels[3] = {0.25, 0.5, 0.75};
  for (int mask = 0; mask < 32; ++mask)
    for (int code = 0; code < 243; ++code)
      for (int missed = 0; missed <= 2; ++missed) {
        metrics::ImageDetections img;
        std::vector<double> scores;
        std::vector<bool> tp;
        int c = code;
        for (int i = 0; i < 5; ++i) {
          const double s = levels[c % 3];
          c /= 3;
          const bool hit = (mask >> i) & 1;
          const double x = 40.0 * i;
          img.preds.push_back({geometry::Polygon::rectangle(x, hit ? 0 : 100, x + 10, hit ? 10 : 110), s, 0});
          if (hit) img.gts.push_back({geometry::Polygon::rectangle(x, 0, x + 10, 10), 0, 0});
          scores.push_back(s);
          tp.push_back(hit);
        }
        for (int k = 0; k < missed; ++k)
          img.gts.push_back({geometry::Polygon::rectangle(400.0 + 40 * k, 0, 410.0 + 40 * k, 10), 0, 0});
        const auto got = metrics::pr_curve_and_ap(std::span(&img, 1), {}, -1).ap;
        const double want = ap_by_enumeration(scores, tp, img.gts.size());
        ++ap_cases;
        if (std::fabs(got - want) > 1e-12) ++ap_bad;
      }

  // Hungarian against every permutation.
  std::size_t h_cases = 0, h_bad = 0;
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (std::size_t rows = 1; rows <= 8; ++rows)
    for (std::size_t cols = 1; cols <= 8; ++cols)
      for (int t = 0; t < 6; ++t) {
        std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
        for (auto& r : cost)
          for (auto& v : r) v = (rng() % 5 == 0) ? std::round(u(rng)) : u(rng);
        const auto assign = metrics::hungarian(cost);
        double got = 0.0;
        for (std::size_t r = 0; r < rows; ++r)
          if (assign[r] >= 0) got += cost[r][static_cast<std::size_t>(assign[r])];
        // Brute force over permutations of the larger side.
        const std::size_t n = std::max(rows, cols), k = std::min(rows, cols);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        double best = INFINITY;
        do {
          double c = 0.0;
          for (std::size_t i = 0; i < k; ++i) c += rows <= cols ? cost[i][perm[i]] : cost[perm[i]][i];
          best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        ++h_cases;
        if (std::fabs(got - best) > 1e-9) ++h_bad;
      }

  return {ssim_worst <= 1e-12 && ap_bad == 0 && h_bad == 0,
          "ssim(a,a) worst deviation " + text::format_number(ssim_worst) + "; AP " +
              std::to_string(ap_cases - ap_bad) + "/" + std::to_string(ap_cases) + " instances match; Hungarian " +
              std::to_string(h_cases - h_bad) + "/" + std::to_string(h_cases) + " match brute force"};
}

rescoring::ScorerModel random_model(std::mt19937_64& rng, rescoring::Method method, int k, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 0.5);
  auto m = rescoring::init_model(method, k, dim);
  for (auto& w : m.weights) w = g(rng);
  for (auto& b : m.biases) b = g(rng);
  if (!m.thetas.empty()) {
    m.thetas[0] = -2.0 + g(rng);
    for (std::size_t i = 1; i < m.thetas.size(); ++i) m.thetas[i] = m.thetas[i - 1] + 0.2 + std::fabs(g(rng));
  }
  return m;
}

bool gradient_matches(const rescoring::ScorerModel& m, const rescoring::Gradient& g,
                      const std::function<double(const rescoring::ScorerModel&)>& loss, double& worst) {
  const double h = 1e-5;
  bool ok = true;
  auto probe = [&](std::vector<double> rescoring::ScorerModel::*field, const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < (m.*field).size(); ++i) {
      auto a = m, b = m;
      (a.*field)[i] += h;
      (b.*field)[i] -= h;
      const double num = (loss(a) - loss(b)) / (2 * h);
      const double scale = std::max({std::fabs(num), std::fabs(analytic[i]), 1e-3});
      const double rel = std::fabs(num - analytic[i]) / scale;
      worst = std::max(worst, rel);
      if (rel > 1e-4) ok = false;
    }
  };
  probe(&rescoring::ScorerModel::weights, g.weights);
  probe(&rescoring::ScorerModel::biases, g.biases);
  probe(&rescoring::ScorerModel::thetas, g.thetas);
  return ok;
}

Outcome rescoring_gradients() {
  using rescoring::Method;
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  std::map<std::string, int> passed;
  double worst = 0.0;
  for (Method method : {Method::AR, Method::AC, Method::OR, Method::RL}) {
    for (int t = 0; t < 50; ++t) {
      const int k = 2 + static_cast<int>(rng() % 7);
      const std::size_t dim = 1 + rng() % 5;
      const auto m = random_model(rng, method, k, dim);
      std::vector<rescoring::AgreementSample> batch;
      const std::size_t n = method == Method::RL ? static_cast<std::size_t>(k + 1) : 1 + rng() % 8;
      for (std::size_t i = 0; i < n; ++i) {
        rescoring::AgreementSample s;
        for (std::size_t d = 0; d < dim; ++d) s.features.push_back(g(rng));
        s.agreement = method == Method::RL ? static_cast<int>(i) : static_cast<int>(rng() % (k + 1));
        batch.push_back(std::move(s));
      }
      std::function<double(const rescoring::ScorerModel&, rescoring::Gradient*)> loss;
      switch (method) {
        case Method::AR: loss = [&](const auto& mm, auto* gr) { return rescoring::loss_ar(mm, batch, gr); }; break;
        case Method::AC: loss = [&](const auto& mm, auto* gr) { return rescoring::loss_ac(mm, batch, gr); }; break;
        case Method::OR: loss = [&](const auto& mm, auto* gr) { return rescoring::loss_or(mm, batch, gr); }; break;
        case Method::RL:
          loss = [&](const auto& mm, auto* gr) { return rescoring::loss_rl(mm, batch, 0.1, gr); };
          break;
      }
      rescoring::Gradient grad;
      loss(m, &grad);
      if (gradient_matches(m, grad, [&](const auto& mm) { return loss(mm, nullptr); }, worst))
        ++passed[rescoring::to_string(method)];
    }
  }
  double sum_worst = 0.0;
  std::uniform_real_distribution<double> us(-20.0, 20.0);
  for (int t = 0; t < 100000; ++t) {
    const std::size_t k = 1 + rng() % 10;
    std::vector<double> th(k);
    for (auto& v : th) v = us(rng);
    std::sort(th.begin(), th.end());
    for (std::size_t i = 1; i < k; ++i)
      if (th[i] <= th[i - 1]) th[i] = std::nextafter(th[i - 1], INFINITY);
    const auto p = rescoring::or_class_probs(us(rng), th);
    sum_worst = std::max(sum_worst, std::fabs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
  }
  bool all = sum_worst <= 1e-12;
  std::string detail;
  for (const char* m : {"AR", "AC", "OR", "RL"}) {
    all = all && passed[m] == 50;
    detail += std::string(m) + " " + std::to_string(passed[m]) + "/50, ";
  }
  detail += "worst relative gap " + text::format_number(worst) + "; or_class_probs worst |sum - 1| " +
            text::format_number(sum_worst);
  return {all, detail};
}

Outcome rescoring_efficacy() {
  const auto t0 = Clock::now();
  const int raters = 7, per_image = 25;
  const auto train_set = rescoring::synthetic_dataset(2000, raters, 4, 0.6, 41);
  const auto test_set = rescoring::synthetic_dataset(2000, raters, 4, 0.6, 42);
  bool ok = true;
  std::string detail;
  for (auto method : {rescoring::Method::OR, rescoring::Method::RL}) {
    rescoring::TrainConfig cfg;
    cfg.method = method;
    cfg.learning_rate = 0.5;
    cfg.epochs = 40;
    cfg.seed = 3;
    const auto model = rescoring::train(train_set, cfg).model;

    std::vector<double> scores, agreements;
    for (const auto& s : test_set.samples) {
      scores.push_back(rescoring::score(model, s.features));
      agreements.push_back(s.agreement);
    }
    const double r = rescoring::pearson_r(scores, agreements);

    // Images of `per_image` detections; ground truth counts objects that at
    // least four raters marked.
    auto images = [&](const rescoring::Dataset& d, std::vector<std::vector<double>>& img_scores,
                      std::vector<double>& gt) {
      for (std::size_t start = 0; start + per_image <= d.samples.size(); start += per_image) {
        img_scores.emplace_back();
        double count = 0.0;
        for (std::size_t i = start; i < start + per_image; ++i) {
          img_scores.back().push_back(rescoring::score(model, d.samples[i].features));
          count += d.samples[i].agreement >= 4 ? 1.0 : 0.0;
        }
        gt.push_back(count);
      }
    };
    std::vector<std::vector<double>> tr_scores, te_scores;
    std::vector<double> tr_gt, te_gt;
    images(train_set, tr_scores, tr_gt);
    images(test_set, te_scores, te_gt);
    const double threshold = rescoring::tune_threshold(tr_scores, tr_gt);
    std::vector<metrics::CountPair> unfiltered, filtered;
    for (std::size_t i = 0; i < te_scores.size(); ++i) {
      const auto kept = std::count_if(te_scores[i].begin(), te_scores[i].end(), [&](double s) { return s >= threshold; });
      unfiltered.push_back({te_gt[i], static_cast<double>(te_scores[i].size())});
      filtered.push_back({te_gt[i], static_cast<double>(kept)});
    }
    const double mae_u = metrics::mae(unfiltered), mae_f = metrics::mae(filtered);
    ok = ok && r >= 0.9 && mae_f < mae_u;
    detail += std::string(rescoring::to_string(method)) + " r " + text::format_number(std::round(r * 1e4) / 1e4) +
              ", MAE " + text::format_number(std::round(mae_u * 100) / 100) + " -> " +
              text::format_number(std::round(mae_f * 100) / 100) + "; ";
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, detail + text::format_number(std::round(secs * 100) / 100) + " s"};
}

Outcome alpha_calibration() {
  const double alpha = 150.0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uz(5.0, 40.0), uh(40.0, 200.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto draw = [&](bool noisy) {
    std::vector<annotate::CalibrationSample> s;
    for (int k = 0; k < 50; ++k) {
      const double z = uz(rng), h = uh(rng);
      s.push_back({h, z, h + alpha / z + (noisy ? noise(rng) : 0.0)});
    }
    return s;
  };
  const double clean_err = std::fabs(annotate::fit_alpha(draw(false)).alpha - alpha);
  const int reps = 1000;
  double sum = 0.0, sum_sq = 0.0, sum_se = 0.0;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    const auto fit = annotate::fit_alpha(draw(true));
    sum += fit.alpha;
    sum_sq += fit.alpha * fit.alpha;
    sum_se += fit.std_error;
    if (std::fabs(fit.alpha - alpha) <= 3.0 * fit.std_error) ++covered;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt((sum_sq - reps * mean * mean) / (reps - 1));
  const double se_of_mean = sd / std::sqrt(static_cast<double>(reps));
  const bool unbiased = std::fabs(mean - alpha) <= 3.0 * se_of_mean;
  const bool coverage = covered >= 990;
  return {clean_err < 1e-6 && unbiased && coverage,
          "noiseless error " + text::format_number(clean_err) + "; noisy mean " +
              text::format_number(std::round(mean * 1e4) / 1e4) + " vs " + text::format_number(alpha) + " (" +
              text::format_number(std::round(std::fabs(mean - alpha) / se_of_mean * 100) / 100) +
              " standard errors); " + std::to_string(covered) + "/1000 fits within 3 reported standard errors" +
              " (mean reported " + text::format_number(std::round(sum_se / reps * 1e4) / 1e4) + ", empirical " +
              text::format_number(std::round(sd * 1e4) / 1e4) + ")"};
}

// Every command, twice, in sibling directories with identical relative paths.
Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / ("meshcount-accept-" + std::to_string(std::random_device{}()));
  fs::create_directories(root / "in");
  const std::string cli = MESHCOUNT_CLI;
  auto run = [&](const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" + cli + "' " + args + " > stdout.txt 2> stderr.txt";
    return std::system(cmd.c_str()) == 0;
  };
  auto put = [&](const std::string& name, const std::string& body) { text::write_file((root / "in" / name).string(), body); };

  bool ok = run(root / "in", "gen-scene --scenario s.json --cameras 3 --frames 3 --drop 0.05 --jitter 2 --spurious 0.2 --seed 4");
  put("dots.csv", "x,y\n3,4\n10.5,7\n20,20\n21,22\n0,0\n");
  std::mt19937_64 rng(6);
  for (const char* name : {"p", "g"}) {
    std::vector<double> v(16 * 16);
    for (auto& x : v) x = static_cast<float>(std::uniform_real_distribution<double>(0, 1)(rng));
    put(std::string(name) + ".dmf", codecs::encode_dmf(density::DensityMap(16, 16, v)));
  }
  put("pc.csv", "image_id,density\nimg,p.dmf\n");
  put("gc.csv", "image_id,density\nimg,g.dmf\n");
  put("dp.csv", "image_id,class_id,score,x0,y0,x1,y1\na,0,0.9,0,0,10,10\na,0,0.8,20,20,30,30\nb,1,0.5,0,0,4,4\n");
  put("dg.csv", "image_id,class_id,x0,y0,x1,y1,agreement\na,0,1,0,11,10,5\nb,1,0,0,4,5,3\n");
  put("samples.csv", codecs::encode_samples(rescoring::synthetic_dataset(200, 7, 3, 0.5, 2)));
  std::string det = "image_id,f0,f1,f2\n", gtc = "image_id,count\n";
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 5; ++k) det += "im" + std::to_string(i) + "," + text::format_number(0.2 * k) + ",0,1\n";
    gtc += "im" + std::to_string(i) + "," + std::to_string(1 + i % 3) + "\n";
  }
  put("det.csv", det);
  put("gtc.csv", gtc);
  put("boxes.csv", "h_s,w_s,z,h_m\n1.5,0.5,10,1.61\n1.4,0.5,20,1.44\n1.7,0.6,5,1.92\n1.6,0.4,50,\n");
  put("pos.csv", "x,y\n0,0\n10,0\n10.5,0\n100,100\n");
  put("h.txt", "0.1 0 0\n0 0.1 0\n0 0 1\n");
  ok = ok && run(root / "in", "rescore-train --samples samples.csv --model model.json --epochs 3");

  const std::vector<std::string> commands{
      "gen-scene --scenario s.json --cameras 4 --frames 2 --drop 0.1 --jitter 1 --spurious 0.3 --seed 9 --out gen.csv",
      "simulate --scenario ../in/s.json --tau 0.2 --agg mean --seed 3 --out sim.csv",
      "simulate --scenario ../in/s.json --agg min",
      "calibrate --features-a ../in/s.node0.csv --features-b ../in/s.node1.csv --homography-out h.txt --seed 5 --out cal.csv",
      "density --dots ../in/dots.csv --height 24 --width 32 --kernel knn --k 2 --map m.dmf --map-csv m.csv --out den.csv",
      "eval-count --pred ../in/pc.csv --gt ../in/gc.csv --game 3 --out ec.csv",
      "eval-detect --pred ../in/dp.csv --gt ../in/dg.csv --iou-sweep --min-agreement 4 --out ed.csv",
      "rescore-train --samples ../in/samples.csv --method RL --epochs 4 --model model.json --trace trace.csv --seed 9 --out rt.csv",
      "rescore-train --samples ../in/samples.csv --method OR --epochs 4 --model model_or.json --seed 2 --out rt_or.csv",
      "rescore-eval --model ../in/model.json --detections ../in/det.csv --gt-counts ../in/gtc.csv --out re.csv",
      "rescore-eval --model ../in/model.json --samples ../in/samples.csv --out re_s.csv",
      "sanitize-bboxes --input ../in/boxes.csv --out sb.csv",
      "distance-check --positions ../in/pos.csv --homography ../in/h.txt --threshold 1.5 --out dc.csv"};
  std::size_t identical = 0, files = 0;
  std::string first_diff;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path a = root / ("a" + std::to_string(c)), b = root / ("b" + std::to_string(c));
    fs::create_directories(a);
    fs::create_directories(b);
    if (!run(a, commands[c]) || !run(b, commands[c])) {
      ok = false;
      if (first_diff.empty()) first_diff = "failed: " + commands[c];
      continue;
    }
    bool same = true;
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(a)) names.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b)) names.insert(e.path().filename().string());
    for (const auto& n : names) {
      if (n == "stderr.txt") continue;
      ++files;
      if (!fs::exists(a / n) || !fs::exists(b / n) ||
          text::read_file((a / n).string()) != text::read_file((b / n).string())) {
        same = false;
        if (first_diff.empty()) first_diff = "differs: " + n + " of " + commands[c];
      }
    }
    if (same) ++identical;
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  ok = ok && identical == commands.size();
  return {ok, std::to_string(identical) + "/" + std::to_string(commands.size()) + " invocations byte-identical over " +
                  std::to_string(files) + " files" + (first_diff.empty() ? "" : "; " + first_diff)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"protocol exactness", protocol_exactness},
      {"noisy ordering naive > masking > ours", noisy_ordering},
      {"homography recovery", homography_recovery},
      {"density mass conservation", density_conservation},
      {"metric oracles", metric_oracles},
      {"rescoring gradients", rescoring_gradients},
      {"rescoring efficacy", rescoring_efficacy},
      {"alpha calibration", alpha_calibration},
      {"cli determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
