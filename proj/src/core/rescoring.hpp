#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace meshcount::rescoring {

struct AgreementSample {
  std::vector<double> features;
  int agreement = 0;
};

struct Dataset {
  int raters = 7;
  std::vector<AgreementSample> samples;

  std::size_t dim() const noexcept { return samples.empty() ? 0 : samples.front().features.size(); }
};

// Checks agreements in [0, K] and a common non-zero dimension.
void validate(const Dataset& data);

enum class Method { AR, AC, OR, RL };
enum class Head { Scalar, Categorical };

const char* to_string(Method m) noexcept;
Method parse_method(const std::string& s);

struct ScorerModel {
  Method method = Method::OR;
  Head head = Head::Scalar;
  int raters = 7;
  std::size_t dim = 0;
  // Scalar: dim weights and one bias. Categorical: (K+1) rows of dim weights
  // and K+1 biases.
  std::vector<double> weights;
  std::vector<double> biases;
  // K strictly increasing thresholds, OR only.
  std::vector<double> thetas;
};

// Zero weights and biases; OR thresholds at k - (K-1)/2.
ScorerModel init_model(Method method, int raters, std::size_t dim);

inline constexpr double kLogEpsilon = 1e-12;
inline constexpr double kThetaGap = 1e-6;
inline constexpr double kDefaultMargin = 0.1;

double score(const ScorerModel& model, std::span<const double> features);
double expected_score(const ScorerModel& model, std::span<const double> features);
std::vector<double> class_probabilities(const ScorerModel& model, std::span<const double> features);
std::vector<double> or_class_probs(double s, std::span<const double> thetas);

// Same layout as the model parameters.
struct Gradient {
  std::vector<double> weights;
  std::vector<double> biases;
  std::vector<double> thetas;
};

double loss_ar(const ScorerModel& model, std::span<const AgreementSample> batch, Gradient* grad = nullptr);
double loss_ac(const ScorerModel& model, std::span<const AgreementSample> batch, Gradient* grad = nullptr);
double loss_or(const ScorerModel& model, std::span<const AgreementSample> batch, Gradient* grad = nullptr);
// One tuple: sample i carries agreement i for i = 0..K.
double loss_rl(const ScorerModel& model, std::span<const AgreementSample> tuple, double margin,
               Gradient* grad = nullptr);

using Tuple = std::vector<std::size_t>;
std::vector<Tuple> make_tuples(const Dataset& data, std::size_t count, std::uint64_t seed);

struct TrainConfig {
  Method method = Method::OR;
  double learning_rate = 0.05;
  int epochs = 50;
  std::size_t batch_size = 32;
  double margin = kDefaultMargin;
  std::uint64_t seed = 0;
  // Tuples drawn per epoch for RL; 0 means one per sample.
  std::size_t tuples_per_epoch = 0;
};

void validate(const TrainConfig& config);

struct TrainResult {
  ScorerModel model;
  // Full-dataset loss before training, then after every epoch.
  std::vector<double> loss_trace;
};

// Full-dataset objective of the configured method. RL uses a fixed tuple set
// drawn from the config seed.
double dataset_loss(const ScorerModel& model, const Dataset& data, const TrainConfig& config);

TrainResult train(const Dataset& data, const TrainConfig& config);

double pearson_r(std::span<const double> scores, std::span<const double> agreements);

struct Detection {
  std::vector<double> features;
  double score = 0.0;
};

std::vector<Detection> rescore_and_filter(std::span<const Detection> detections, const ScorerModel& model,
                                          double threshold);

// Candidate thresholds are the distinct per-detection scores plus +inf; the
// one minimising MAE between kept counts and `gt_counts` wins, lowest on ties.
double tune_threshold(std::span<const std::vector<double>> image_scores, std::span<const double> gt_counts);

// Samples with feature 0 uniform in [0,1], agreement round(K * f0 + noise)
// clamped to [0, K], and the remaining features standard normal.
Dataset synthetic_dataset(std::size_t n, int raters, std::size_t dim, double noise, std::uint64_t seed);

}  // namespace meshcount::rescoring
