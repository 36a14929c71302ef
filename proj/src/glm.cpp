#include "offlens/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "offlens/error.hpp"
#include "offlens/parallel.hpp"

namespace offlens {
namespace {

constexpr int kMaxHalvings = 60;

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_vector(const SparseVector& x, std::size_t dimension) {
  if (x.dimension != dimension) {
    throw Error(ErrorKind::kDimensionMismatch, "vector dimension " + std::to_string(x.dimension) +
                                                   " vs model dimension " +
                                                   std::to_string(dimension));
  }
  if (!x.indices.empty() && x.indices.back() >= dimension) {
    throw Error(ErrorKind::kDimensionMismatch, "feature index out of range");
  }
}

double row_score(const Parameters& params, std::size_t row, const SparseVector& x) {
  double z = params.intercepts[row];
  const double* w = params.weights.data() + row * params.dimension;
  for (std::size_t k = 0; k < x.indices.size(); ++k) z += w[x.indices[k]] * x.values[k];
  return z;
}

void check_dataset(const Dataset& data, std::size_t rows_expected, const Parameters& params) {
  if (data.features.size() != data.labels.size()) {
    throw Error(ErrorKind::kLengthMismatch, "features and labels differ in length");
  }
  if (params.dimension != data.dimension || params.rows != rows_expected) {
    throw Error(ErrorKind::kDimensionMismatch, "parameters do not match dataset shape");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    check_vector(data.features[i], data.dimension);
    if (data.labels[i] >= data.classes) {
      throw Error(ErrorKind::kUnknownLabel, "label index " + std::to_string(data.labels[i]) +
                                                " outside " + std::to_string(data.classes) +
                                                " classes");
    }
  }
}

double class_weight(const GlmConfig& config, std::size_t label) {
  return config.class_weights.empty() ? 1.0 : config.class_weights[label];
}

bool all_finite(const Parameters& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(p.weights.begin(), p.weights.end(), finite) &&
         std::all_of(p.intercepts.begin(), p.intercepts.end(), finite);
}

}  // namespace

void GlmConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, what); };
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) fail("l2_lambda must be >= 0");
  if (max_iters == 0) fail("max_iters must be positive");
  if (!(tolerance > 0.0)) fail("tolerance must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (!(step_growth >= 1.0) || !std::isfinite(step_growth)) fail("step_growth must be >= 1");
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    fail("decision_threshold must lie strictly inside (0,1)");
  }
  for (double w : class_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) fail("class weights must be positive");
  }
}

std::size_t parameter_rows(ModelKind kind, std::size_t classes) {
  return kind == ModelKind::kBinary ? 1 : classes;
}

LossGradient loss_and_gradient(const Parameters& params, ModelKind kind, const Dataset& data,
                               const GlmConfig& config) {
  if (kind == ModelKind::kBinary && data.classes != 2) {
    throw Error(ErrorKind::kInvalidArgument, "binary model needs exactly 2 classes");
  }
  check_dataset(data, parameter_rows(kind, data.classes), params);
  if (!config.class_weights.empty() && config.class_weights.size() != data.classes) {
    throw Error(ErrorKind::kInvalidArgument, "class_weights size differs from class count");
  }

  LossGradient out;
  out.gradient = Parameters(params.rows, params.dimension);
  auto& grad = out.gradient;
  if (data.size() == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double loss = 0.0;
  std::vector<double> scores(params.rows);

  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.features[i];
    const std::size_t y = data.labels[i];
    const double c = class_weight(config, y) * inv_n;
    if (kind == ModelKind::kBinary) {
      const double z = row_score(params, 0, x);
      const bool positive = y == 0;
      loss += c * softplus(positive ? -z : z);
      const double dz = c * (sigmoid(z) - (positive ? 1.0 : 0.0));
      grad.intercepts[0] += dz;
      double* g = grad.weights.data();
      for (std::size_t k = 0; k < x.indices.size(); ++k) g[x.indices[k]] += dz * x.values[k];
    } else {
      double max_score = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < params.rows; ++r) {
        scores[r] = row_score(params, r, x);
        max_score = std::max(max_score, scores[r]);
      }
      double sum = 0.0;
      for (std::size_t r = 0; r < params.rows; ++r) sum += std::exp(scores[r] - max_score);
      const double log_norm = max_score + std::log(sum);
      loss += c * (log_norm - scores[y]);
      for (std::size_t r = 0; r < params.rows; ++r) {
        const double p = std::exp(scores[r] - log_norm);
        const double dz = c * (p - (r == y ? 1.0 : 0.0));
        grad.intercepts[r] += dz;
        double* g = grad.weights.data() + r * params.dimension;
        for (std::size_t k = 0; k < x.indices.size(); ++k) g[x.indices[k]] += dz * x.values[k];
      }
    }
  }

  double norm2 = 0.0;
  for (std::size_t j = 0; j < params.weights.size(); ++j) {
    norm2 += params.weights[j] * params.weights[j];
    grad.weights[j] += config.l2_lambda * params.weights[j];
  }
  out.loss = loss + 0.5 * config.l2_lambda * norm2;
  return out;
}

TrainResult train(const Dataset& data, ModelKind kind, std::span<const Label> label_order,
                  const GlmConfig& config) {
  config.validate();
  if (data.size() == 0) throw Error(ErrorKind::kEmptyInput, "cannot train on an empty dataset");
  if (label_order.size() != data.classes || data.classes < 2) {
    throw Error(ErrorKind::kInvalidArgument, "label order does not match dataset classes");
  }
  if (kind == ModelKind::kBinary && data.classes != 2) {
    throw Error(ErrorKind::kInvalidArgument, "binary model needs exactly 2 classes");
  }

  TrainResult result;
  auto& model = result.model;
  model.kind = kind;
  model.label_order.assign(label_order.begin(), label_order.end());
  model.l2_lambda = config.l2_lambda;
  model.decision_threshold = config.decision_threshold;
  model.params = Parameters(parameter_rows(kind, data.classes), data.dimension);
  check_dataset(data, model.params.rows, model.params);

  std::vector<std::size_t> class_counts(data.classes, 0);
  for (auto y : data.labels) ++class_counts[y];
  const auto present = std::count_if(class_counts.begin(), class_counts.end(),
                                     [](std::size_t n) { return n > 0; });
  if (present < 2) {
    // Constant model from smoothed class frequencies (add one half).
    const double n = static_cast<double>(data.size());
    const double k = static_cast<double>(data.classes);
    auto freq = [&](std::size_t c) { return (static_cast<double>(class_counts[c]) + 0.5) / (n + 0.5 * k); };
    if (kind == ModelKind::kBinary) {
      model.params.intercepts[0] = std::log(freq(0) / freq(1));
    } else {
      for (std::size_t c = 0; c < data.classes; ++c) model.params.intercepts[c] = std::log(freq(c));
    }
    result.converged = true;
    result.warning = "DegenerateLabels: only one class present; returning a constant model";
    return result;
  }

  auto current = loss_and_gradient(model.params, kind, data, config);
  if (!std::isfinite(current.loss)) {
    throw Error(ErrorKind::kNonFinite, "initial loss is not finite");
  }
  result.loss_history.push_back(current.loss);
  double step = config.learning_rate;

  Parameters trial(model.params.rows, model.params.dimension);
  for (std::size_t iter = 0; iter < config.max_iters; ++iter) {
    std::optional<LossGradient> next;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t j = 0; j < trial.weights.size(); ++j) {
        trial.weights[j] = model.params.weights[j] - step * current.gradient.weights[j];
      }
      for (std::size_t r = 0; r < trial.rows; ++r) {
        trial.intercepts[r] = model.params.intercepts[r] - step * current.gradient.intercepts[r];
      }
      if (all_finite(trial)) {
        auto candidate = loss_and_gradient(trial, kind, data, config);
        if (std::isfinite(candidate.loss) && candidate.loss <= current.loss) {
          next = std::move(candidate);
          break;
        }
      }
      step *= 0.5;
    }
    if (!next) {
      // No descent direction survives halving: at a minimum to machine precision.
      result.converged = true;
      break;
    }
    const double decrease = current.loss - next->loss;
    const double relative = decrease / std::max(std::abs(current.loss), 1e-300);
    std::swap(model.params, trial);
    current = std::move(*next);
    result.loss_history.push_back(current.loss);
    result.iterations = iter + 1;
    step *= config.step_growth;
    if (relative < config.tolerance) {
      result.converged = true;
      break;
    }
  }
  if (!all_finite(model.params) || !std::isfinite(current.loss)) {
    throw Error(ErrorKind::kNonFinite, "training diverged");
  }
  return result;
}

std::vector<double> predict_proba(const Parameters& params, ModelKind kind,
                                  const SparseVector& x) {
  check_vector(x, params.dimension);
  if (kind == ModelKind::kBinary) {
    const double p = sigmoid(row_score(params, 0, x));
    return {p, 1.0 - p};
  }
  std::vector<double> scores(params.rows);
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < params.rows; ++r) {
    scores[r] = row_score(params, r, x);
    max_score = std::max(max_score, scores[r]);
  }
  double sum = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - max_score);
    sum += s;
  }
  for (auto& s : scores) s /= sum;
  return scores;
}

std::vector<double> predict_proba(const GlmModel& model, const SparseVector& x) {
  return predict_proba(model.params, model.kind, x);
}

Label predict(const GlmModel& model, const SparseVector& x, double decision_threshold) {
  const auto p = predict_proba(model, x);
  if (model.kind == ModelKind::kBinary) {
    return p[0] >= decision_threshold ? model.label_order[0] : model.label_order[1];
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  return model.label_order[best];
}

Label predict(const GlmModel& model, const SparseVector& x) {
  return predict(model, x, model.decision_threshold);
}

std::vector<double> inverse_frequency_weights(const Dataset& data) {
  std::vector<std::size_t> counts(data.classes, 0);
  for (auto y : data.labels) ++counts[y];
  std::vector<double> weights(data.classes, 1.0);
  const double n = static_cast<double>(data.size());
  const double k = static_cast<double>(data.classes);
  for (std::size_t c = 0; c < data.classes; ++c) {
    if (counts[c] > 0) weights[c] = n / (k * static_cast<double>(counts[c]));
  }
  return weights;
}

Dataset build_dataset(const LabeledCorpus& corpus, const Vocabulary& vocabulary,
                      const TextOptions& text, std::span<const Label> label_order,
                      std::size_t threads) {
  Dataset data;
  data.dimension = vocabulary.size();
  data.classes = label_order.size();
  data.features.resize(corpus.records.size());
  data.labels.resize(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    auto it = std::find(label_order.begin(), label_order.end(), corpus.records[i].label);
    if (it == label_order.end()) {
      throw Error(ErrorKind::kUnknownLabel, "label " +
                                                std::string(to_string(corpus.records[i].label)) +
                                                " not in model label order");
    }
    data.labels[i] = static_cast<std::size_t>(it - label_order.begin());
  }
  parallel_for(corpus.records.size(), threads, [&](std::size_t i) {
    data.features[i] = featurize(corpus.records[i].text, vocabulary, text);
  });
  return data;
}

TrainResult train_text_model(const LabeledCorpus& corpus, const GlmConfig& config,
                             const TextTrainOptions& options) {
  std::vector<std::vector<std::string>> docs(corpus.records.size());
  parallel_for(docs.size(), options.threads, [&](std::size_t i) {
    docs[i] = tokenize(clean(corpus.records[i].text, options.text));
  });
  auto vocabulary = fit_vocabulary(docs, options.min_df);
  const auto labels = label_set(corpus.task);
  const auto kind = corpus.task == TaskId::C ? ModelKind::kMultinomial : ModelKind::kBinary;

  Dataset data;
  data.dimension = vocabulary.size();
  data.classes = labels.size();
  data.features.resize(docs.size());
  data.labels.resize(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto it = std::find(labels.begin(), labels.end(), corpus.records[i].label);
    if (it == labels.end()) throw Error(ErrorKind::kUnknownLabel, "label outside task label set");
    data.labels[i] = static_cast<std::size_t>(it - labels.begin());
  }
  parallel_for(docs.size(), options.threads, [&](std::size_t i) {
    data.features[i] = vectorize(docs[i], vocabulary, options.text);
  });

  GlmConfig effective = config;
  if (options.inverse_class_weights) effective.class_weights = inverse_frequency_weights(data);
  auto result = train(data, kind, labels, effective);
  result.model.vocabulary = std::move(vocabulary);
  result.model.text_options = options.text;
  return result;
}

std::vector<Label> predict_texts(const GlmModel& model, std::span<const std::string> texts,
                                 std::size_t threads) {
  if (model.vocabulary.size() != model.dimension()) {
    throw Error(ErrorKind::kDimensionMismatch, "model vocabulary size " +
                                                   std::to_string(model.vocabulary.size()) +
                                                   " differs from weight dimension " +
                                                   std::to_string(model.dimension()));
  }
  std::vector<Label> out(texts.size(), model.label_order.front());
  parallel_for(texts.size(), threads, [&](std::size_t i) {
    out[i] = predict(model, featurize(texts[i], model.vocabulary, model.text_options));
  });
  return out;
}

}  // namespace offlens
