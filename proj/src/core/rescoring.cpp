#include "core/rescoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace meshcount::rescoring {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_dim(const ScorerModel& model, std::span<const double> x) {
  if (x.size() != model.dim)
    fail(ErrorCode::DimensionMismatch,
         "feature length " + std::to_string(x.size()) + " != model dimension " + std::to_string(model.dim));
}

void check_agreement(const ScorerModel& model, int a) {
  if (a < 0 || a > model.raters) fail(ErrorCode::InvalidArgument, "agreement " + std::to_string(a) + " outside [0, K]");
}

void require_scalar(const ScorerModel& model) {
  if (model.head != Head::Scalar) fail(ErrorCode::HeadMismatch, "loss needs a scalar head");
}

void check_thetas(std::span<const double> thetas) {
  for (std::size_t k = 1; k < thetas.size(); ++k)
    if (!(thetas[k - 1] < thetas[k])) fail(ErrorCode::UnorderedThetas, "thresholds must be strictly increasing");
}

Gradient zero_gradient(const ScorerModel& m) {
  return {std::vector<double>(m.weights.size(), 0.0), std::vector<double>(m.biases.size(), 0.0),
          std::vector<double>(m.thetas.size(), 0.0)};
}

void ensure_shape(const ScorerModel& m, Gradient* g) {
  if (g != nullptr && (g->weights.size() != m.weights.size() || g->biases.size() != m.biases.size() ||
                       g->thetas.size() != m.thetas.size()))
    *g = zero_gradient(m);
}

double linear(const ScorerModel& m, std::span<const double> x) {
  double s = m.biases[0];
  for (std::size_t i = 0; i < m.dim; ++i) s += m.weights[i] * x[i];
  return s;
}

// d(score)/d(params) for a scalar head, scaled by `coef`.
void add_scalar_grad(const ScorerModel& m, std::span<const double> x, double coef, Gradient& g) {
  for (std::size_t i = 0; i < m.dim; ++i) g.weights[i] += coef * x[i];
  g.biases[0] += coef;
}

std::vector<double> logits(const ScorerModel& m, std::span<const double> x) {
  const auto classes = static_cast<std::size_t>(m.raters) + 1;
  std::vector<double> z(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    double s = m.biases[c];
    for (std::size_t i = 0; i < m.dim; ++i) s += m.weights[c * m.dim + i] * x[i];
    z[c] = s;
  }
  return z;
}

std::vector<double> softmax(std::vector<double> z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) sum += v = std::exp(v - mx);
  for (auto& v : z) v /= sum;
  return z;
}

void step(ScorerModel& m, const Gradient& g, double scale) {
  for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] -= scale * g.weights[i];
  for (std::size_t i = 0; i < m.biases.size(); ++i) m.biases[i] -= scale * g.biases[i];
  for (std::size_t i = 0; i < m.thetas.size(); ++i) m.thetas[i] -= scale * g.thetas[i];
  for (std::size_t k = 1; k < m.thetas.size(); ++k)
    m.thetas[k] = std::max(m.thetas[k], m.thetas[k - 1] + kThetaGap);
}

std::vector<AgreementSample> gather(const Dataset& data, const Tuple& t) {
  std::vector<AgreementSample> out;
  out.reserve(t.size());
  for (std::size_t i : t) out.push_back(data.samples[i]);
  return out;
}

std::size_t tuple_count(const Dataset& data, const TrainConfig& config) {
  return config.tuples_per_epoch > 0 ? config.tuples_per_epoch : data.samples.size();
}

constexpr std::uint64_t kEvalTupleSalt = 0x9e3779b97f4a7c15ULL;

double batch_loss(const ScorerModel& m, std::span<const AgreementSample> batch, double margin, Method method,
                  Gradient* g) {
  switch (method) {
    case Method::AR: return loss_ar(m, batch, g);
    case Method::AC: return loss_ac(m, batch, g);
    case Method::OR: return loss_or(m, batch, g);
    case Method::RL: return loss_rl(m, batch, margin, g);
  }
  return 0.0;
}

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::AR: return "AR";
    case Method::AC: return "AC";
    case Method::OR: return "OR";
    case Method::RL: return "RL";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "AR" || s == "ar") return Method::AR;
  if (s == "AC" || s == "ac") return Method::AC;
  if (s == "OR" || s == "or") return Method::OR;
  if (s == "RL" || s == "rl") return Method::RL;
  fail(ErrorCode::InvalidArgument, "unknown rescoring method '" + s + "'");
}

void validate(const Dataset& data) {
  if (data.raters < 1) fail(ErrorCode::InvalidArgument, "rater count must be positive");
  if (data.samples.empty()) fail(ErrorCode::EmptyInput, "dataset has no samples");
  const std::size_t d = data.dim();
  if (d == 0) fail(ErrorCode::DimensionMismatch, "feature vectors must be non-empty");
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const auto& s = data.samples[i];
    if (s.features.size() != d)
      fail(ErrorCode::DimensionMismatch, "sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) +
                                             " features, expected " + std::to_string(d));
    if (s.agreement < 0 || s.agreement > data.raters)
      fail(ErrorCode::InvalidArgument, "sample " + std::to_string(i) + " agreement outside [0, K]");
    for (double v : s.features)
      if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "sample " + std::to_string(i) + " has a non-finite feature");
  }
}

void validate(const TrainConfig& config) {
  if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate))
    fail(ErrorCode::InvalidArgument, "learning rate must be finite and >= 0");
  if (config.epochs < 0) fail(ErrorCode::InvalidArgument, "epochs must be >= 0");
  if (config.batch_size < 1) fail(ErrorCode::InvalidArgument, "batch size must be >= 1");
  if (!(config.margin > 0.0)) fail(ErrorCode::InvalidArgument, "margin must be positive");
}

ScorerModel init_model(Method method, int raters, std::size_t dim) {
  if (raters < 1) fail(ErrorCode::InvalidArgument, "rater count must be positive");
  if (dim == 0) fail(ErrorCode::DimensionMismatch, "model dimension must be positive");
  ScorerModel m;
  m.method = method;
  m.raters = raters;
  m.dim = dim;
  if (method == Method::AC) {
    m.head = Head::Categorical;
    m.weights.assign((static_cast<std::size_t>(raters) + 1) * dim, 0.0);
    m.biases.assign(static_cast<std::size_t>(raters) + 1, 0.0);
  } else {
    m.head = Head::Scalar;
    m.weights.assign(dim, 0.0);
    m.biases.assign(1, 0.0);
  }
  if (method == Method::OR)
    for (int k = 0; k < raters; ++k) m.thetas.push_back(k - (raters - 1) / 2.0);
  return m;
}

std::vector<double> class_probabilities(const ScorerModel& model, std::span<const double> features) {
  if (model.head != Head::Categorical) fail(ErrorCode::HeadMismatch, "class probabilities need a categorical head");
  check_dim(model, features);
  return softmax(logits(model, features));
}

double expected_score(const ScorerModel& model, std::span<const double> features) {
  const auto p = class_probabilities(model, features);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += static_cast<double>(i) * p[i];
  return s / model.raters;
}

double score(const ScorerModel& model, std::span<const double> features) {
  if (model.head == Head::Categorical) return expected_score(model, features);
  check_dim(model, features);
  return linear(model, features);
}

std::vector<double> or_class_probs(double s, std::span<const double> thetas) {
  if (thetas.empty()) fail(ErrorCode::InvalidArgument, "need at least one threshold");
  check_thetas(thetas);
  const std::size_t K = thetas.size();
  std::vector<double> y(K + 1);
  double prev = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double c = sigmoid(thetas[k] - s);
    y[k] = c - prev;
    prev = c;
  }
  y[K] = 1.0 - prev;
  return y;
}

double loss_ar(const ScorerModel& model, std::span<const AgreementSample> batch, Gradient* grad) {
  require_scalar(model);
  ensure_shape(model, grad);
  double loss = 0.0;
  for (const auto& smp : batch) {
    check_dim(model, smp.features);
    check_agreement(model, smp.agreement);
    const double r = static_cast<double>(smp.agreement) / model.raters - linear(model, smp.features);
    loss += 0.5 * r * r;
    if (grad) add_scalar_grad(model, smp.features, -r, *grad);
  }
  return loss;
}

double loss_ac(const ScorerModel& model, std::span<const AgreementSample> batch, Gradient* grad) {
  if (model.head != Head::Categorical) fail(ErrorCode::HeadMismatch, "AC loss needs a categorical head");
  ensure_shape(model, grad);
  double loss = 0.0;
  for (const auto& smp : batch) {
    check_dim(model, smp.features);
    check_agreement(model, smp.agreement);
    const auto p = softmax(logits(model, smp.features));
    const auto a = static_cast<std::size_t>(smp.agreement);
    loss -= std::log(std::max(p[a], kLogEpsilon));
    if (grad && p[a] > kLogEpsilon) {
      for (std::size_t c = 0; c < p.size(); ++c) {
        const double d = p[c] - (c == a ? 1.0 : 0.0);
        for (std::size_t i = 0; i < model.dim; ++i) grad->weights[c * model.dim + i] += d * smp.features[i];
        grad->biases[c] += d;
      }
    }
  }
  return loss;
}

double loss_or(const ScorerModel& model, std::span<const AgreementSample> batch, Gradient* grad) {
  require_scalar(model);
  if (model.thetas.size() != static_cast<std::size_t>(model.raters))
    fail(ErrorCode::HeadMismatch, "OR loss needs K thresholds");
  check_thetas(model.thetas);
  ensure_shape(model, grad);
  const std::size_t K = model.thetas.size();
  double loss = 0.0;
  for (const auto& smp : batch) {
    check_dim(model, smp.features);
    check_agreement(model, smp.agreement);
    const double s = linear(model, smp.features);
    const auto a = static_cast<std::size_t>(smp.agreement);
    // y_a = hi - lo with hi = sigma(theta_a - s) (1 for a = K) and
    // lo = sigma(theta_{a-1} - s) (0 for a = 0).
    const double hi = a < K ? sigmoid(model.thetas[a] - s) : 1.0;
    const double lo = a > 0 ? sigmoid(model.thetas[a - 1] - s) : 0.0;
    const double y = hi - lo;
    loss -= std::log(std::max(y, kLogEpsilon));
    if (grad && y > kLogEpsilon) {
      const double dhi = a < K ? hi * (1.0 - hi) : 0.0;
      const double dlo = a > 0 ? lo * (1.0 - lo) : 0.0;
      // dy/ds = -dhi + dlo; loss gradient is -dy / y.
      add_scalar_grad(model, smp.features, (dhi - dlo) / y, *grad);
      if (a < K) grad->thetas[a] -= dhi / y;
      if (a > 0) grad->thetas[a - 1] += dlo / y;
    }
  }
  return loss;
}

double loss_rl(const ScorerModel& model, std::span<const AgreementSample> tuple, double margin, Gradient* grad) {
  require_scalar(model);
  const auto K = static_cast<std::size_t>(model.raters);
  if (tuple.size() % (K + 1) != 0 || tuple.empty())
    fail(ErrorCode::BadTuple, "tuple batch length must be a positive multiple of K+1");
  ensure_shape(model, grad);
  const std::size_t tuples = tuple.size() / (K + 1);
  double loss = 0.0;
  for (std::size_t t = 0; t < tuples; ++t) {
    const auto one = tuple.subspan(t * (K + 1), K + 1);
    std::vector<double> s(K + 1);
    for (std::size_t i = 0; i <= K; ++i) {
      if (one[i].agreement != static_cast<int>(i))
        fail(ErrorCode::BadTuple, "tuple position " + std::to_string(i) + " has agreement " +
                                      std::to_string(one[i].agreement));
      check_dim(model, one[i].features);
      s[i] = linear(model, one[i].features);
    }
    const double scale = 1.0 / (static_cast<double>(K) * static_cast<double>(tuples));
    for (std::size_t i = 1; i <= K; ++i) {
      const double h = margin - s[i] + s[i - 1];
      if (h > 0.0) {
        loss += scale * h;
        if (grad) {
          add_scalar_grad(model, one[i].features, -scale, *grad);
          add_scalar_grad(model, one[i - 1].features, scale, *grad);
        }
      }
    }
  }
  return loss;
}

std::vector<Tuple> make_tuples(const Dataset& data, std::size_t count, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> levels(static_cast<std::size_t>(data.raters) + 1);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const int a = data.samples[i].agreement;
    if (a < 0 || a > data.raters) fail(ErrorCode::InvalidArgument, "agreement outside [0, K]");
    levels[static_cast<std::size_t>(a)].push_back(i);
  }
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (levels[k].empty()) fail(ErrorCode::EmptyAgreementLevel, "agreement level " + std::to_string(k) + " has no samples");
  std::mt19937_64 rng(seed);
  std::vector<Tuple> out(count);
  for (auto& t : out) {
    t.reserve(levels.size());
    for (const auto& lvl : levels) {
      std::uniform_int_distribution<std::size_t> pick(0, lvl.size() - 1);
      t.push_back(lvl[pick(rng)]);
    }
  }
  return out;
}

double dataset_loss(const ScorerModel& model, const Dataset& data, const TrainConfig& config) {
  if (config.method != Method::RL) return batch_loss(model, data.samples, config.margin, config.method, nullptr);
  std::vector<AgreementSample> all;
  for (const auto& t : make_tuples(data, tuple_count(data, config), config.seed ^ kEvalTupleSalt)) {
    auto g = gather(data, t);
    all.insert(all.end(), g.begin(), g.end());
  }
  return loss_rl(model, all, config.margin);
}

TrainResult train(const Dataset& data, const TrainConfig& config) {
  validate(data);
  validate(config);
  TrainResult out{init_model(config.method, data.raters, data.dim()), {}};
  out.loss_trace.push_back(dataset_loss(out.model, data, config));

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.samples.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.method == Method::RL) {
      const auto tuples = make_tuples(data, tuple_count(data, config), rng());
      for (std::size_t b = 0; b < tuples.size(); b += config.batch_size) {
        std::vector<AgreementSample> batch;
        for (std::size_t t = b; t < std::min(tuples.size(), b + config.batch_size); ++t) {
          auto g = gather(data, tuples[t]);
          batch.insert(batch.end(), g.begin(), g.end());
        }
        Gradient g = zero_gradient(out.model);
        loss_rl(out.model, batch, config.margin, &g);
        step(out.model, g, config.learning_rate);
      }
    } else {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
        std::vector<AgreementSample> batch;
        for (std::size_t i = b; i < std::min(order.size(), b + config.batch_size); ++i)
          batch.push_back(data.samples[order[i]]);
        Gradient g = zero_gradient(out.model);
        batch_loss(out.model, batch, config.margin, config.method, &g);
        step(out.model, g, config.learning_rate / static_cast<double>(batch.size()));
      }
    }
    out.loss_trace.push_back(dataset_loss(out.model, data, config));
  }
  return out;
}

double pearson_r(std::span<const double> scores, std::span<const double> agreements) {
  if (scores.size() != agreements.size()) fail(ErrorCode::DimensionMismatch, "sequences differ in length");
  if (scores.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two values");
  const double n = static_cast<double>(scores.size());
  const double mx = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
  const double my = std::accumulate(agreements.begin(), agreements.end(), 0.0) / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double dx = scores[i] - mx, dy = agreements[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::ConstantInput, "correlation undefined for a constant sequence");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<Detection> rescore_and_filter(std::span<const Detection> detections, const ScorerModel& model,
                                          double threshold) {
  std::vector<Detection> out;
  for (const auto& d : detections) {
    const double s = score(model, d.features);
    if (s >= threshold) out.push_back({d.features, s});
  }
  return out;
}

double tune_threshold(std::span<const std::vector<double>> image_scores, std::span<const double> gt_counts) {
  if (image_scores.size() != gt_counts.size()) fail(ErrorCode::DimensionMismatch, "one ground-truth count per image");
  if (image_scores.empty()) fail(ErrorCode::EmptyInput, "no images");
  std::vector<double> cands{std::numeric_limits<double>::infinity()};
  for (const auto& im : image_scores) cands.insert(cands.end(), im.begin(), im.end());
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  double best_t = cands.back(), best = std::numeric_limits<double>::infinity();
  for (double t : cands) {
    double err = 0.0;
    for (std::size_t i = 0; i < image_scores.size(); ++i) {
      const auto kept = std::count_if(image_scores[i].begin(), image_scores[i].end(), [t](double s) { return s >= t; });
      err += std::abs(static_cast<double>(kept) - gt_counts[i]);
    }
    if (err < best) {
      best = err;
      best_t = t;
    }
  }
  return best_t;
}

Dataset synthetic_dataset(std::size_t n, int raters, std::size_t dim, double noise, std::uint64_t seed) {
  if (raters < 1 || dim == 0) fail(ErrorCode::InvalidArgument, "need raters >= 1 and dim >= 1");
  if (!(noise >= 0.0)) fail(ErrorCode::InvalidArgument, "noise must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset out{raters, {}};
  out.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AgreementSample s;
    s.features.resize(dim);
    s.features[0] = u(rng);
    for (std::size_t k = 1; k < dim; ++k) s.features[k] = g(rng);
    const double a = std::round(raters * s.features[0] + noise * g(rng));
    s.agreement = static_cast<int>(std::clamp(a, 0.0, static_cast<double>(raters)));
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace meshcount::rescoring
