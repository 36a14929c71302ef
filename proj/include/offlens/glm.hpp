#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offlens/corpus.hpp"
#include "offlens/text.hpp"

namespace offlens {

enum class ModelKind { kBinary, kMultinomial };

struct GlmConfig {
  double l2_lambda = 1e-4;
  std::size_t max_iters = 200;
  double tolerance = 1e-6;  // stop when the relative loss decrease drops below
  double learning_rate = 0.1;
  // Step multiplier after an accepted step; a rejected step halves it.
  // 1.0 gives plain gradient descent with halving.
  double step_growth = 1.2;
  std::uint64_t seed = 0;
  std::vector<double> class_weights;  // empty = uniform
  double decision_threshold = 0.5;

  void validate() const;
};

// Weight rows are row-major, one row per modeled class: 1 for binary, K for
// multinomial. The binary row scores label_order[0].
struct Parameters {
  std::size_t rows = 0;
  std::size_t dimension = 0;
  std::vector<double> weights;
  std::vector<double> intercepts;

  Parameters() = default;
  Parameters(std::size_t rows, std::size_t dimension)
      : rows(rows), dimension(dimension), weights(rows * dimension, 0.0), intercepts(rows, 0.0) {}

  double& weight(std::size_t row, std::size_t col) { return weights[row * dimension + col]; }
  double weight(std::size_t row, std::size_t col) const { return weights[row * dimension + col]; }

  bool operator==(const Parameters&) const = default;
};

struct Dataset {
  std::vector<SparseVector> features;
  std::vector<std::size_t> labels;  // index into the label order
  std::size_t dimension = 0;
  std::size_t classes = 0;

  std::size_t size() const { return features.size(); }
};

std::size_t parameter_rows(ModelKind kind, std::size_t classes);

struct LossGradient {
  double loss = 0.0;
  Parameters gradient;
};

// Mean (class-weighted) cross-entropy plus (lambda/2)*||weights||^2, with
// intercepts unpenalized, and its exact gradient.
LossGradient loss_and_gradient(const Parameters& params, ModelKind kind, const Dataset& data,
                               const GlmConfig& config);

struct GlmModel {
  ModelKind kind = ModelKind::kBinary;
  Parameters params;
  std::vector<Label> label_order;
  Vocabulary vocabulary;
  TextOptions text_options;
  double l2_lambda = 0.0;
  double decision_threshold = 0.5;

  std::size_t classes() const { return label_order.size(); }
  std::size_t dimension() const { return params.dimension; }
};

struct TrainResult {
  GlmModel model;
  std::vector<double> loss_history;  // accepted steps only; non-increasing
  std::size_t iterations = 0;
  bool converged = false;
  std::optional<std::string> warning;
};

// Full-batch gradient descent from all-zero parameters. The returned model
// carries an empty vocabulary; train_text_model attaches one.
TrainResult train(const Dataset& data, ModelKind kind, std::span<const Label> label_order,
                  const GlmConfig& config);

// Per-class probabilities in label_order; binary gives (p, 1 - p).
std::vector<double> predict_proba(const GlmModel& model, const SparseVector& x);
std::vector<double> predict_proba(const Parameters& params, ModelKind kind,
                                  const SparseVector& x);

// Binary: label_order[0] iff its probability >= threshold. Multinomial:
// argmax, ties to the earlier label.
Label predict(const GlmModel& model, const SparseVector& x, double decision_threshold);
Label predict(const GlmModel& model, const SparseVector& x);

// Inverse-frequency weights N / (K * n_k); classes absent from the data get
// weight 1.
std::vector<double> inverse_frequency_weights(const Dataset& data);

struct TextTrainOptions {
  std::size_t min_df = 2;
  TextOptions text;
  bool inverse_class_weights = false;
  std::size_t threads = 1;
};

Dataset build_dataset(const LabeledCorpus& corpus, const Vocabulary& vocabulary,
                      const TextOptions& text, std::span<const Label> label_order,
                      std::size_t threads = 1);

// Fits the vocabulary on the corpus, trains binary (A, B) or softmax (C)
// regression, and returns a self-contained model.
TrainResult train_text_model(const LabeledCorpus& corpus, const GlmConfig& config,
                             const TextTrainOptions& options);

std::vector<Label> predict_texts(const GlmModel& model, std::span<const std::string> texts,
                                 std::size_t threads = 1);

}  // namespace offlens
