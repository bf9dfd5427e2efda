#include "gmf/gcnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmf/rng.hpp"

namespace gmf {

namespace {

constexpr double kProbabilityFloor = 1e-300;

// x, Sx, S^2 x, ..., S^{M-1} x
std::vector<GraphSignal> shift_powers(const ShiftOperator& op, const GraphSignal& x, int m) {
  std::vector<GraphSignal> powers;
  powers.reserve(static_cast<std::size_t>(m));
  powers.push_back(x);
  for (int i = 1; i < m; ++i) powers.push_back(op.matrix * powers.back());
  return powers;
}

Vector softmax(const Vector& z) {
  const Vector shifted = (z.array() - z.maxCoeff()).exp();
  return shifted / shifted.sum();
}

double activation_derivative(const GcnnConfig& config, double mask) {
  if (config.activation == ActivationKind::Relu) return mask;
  return mask != 0.0 ? 1.0 : config.leaky_slope;
}

void check_trace_shapes(const ForwardTrace& trace, const GcnnConfig& config) {
  if (trace.pre_activation.rows() != config.k_channels ||
      trace.pre_activation.cols() != config.n_vertices ||
      trace.flattened.size() != config.flattened_size() ||
      trace.logits.size() != config.s_outputs)
    throw TraceMismatch("forward trace does not match the configuration shapes");
}

}  // namespace

void GcnnConfig::validate() const {
  if (n_vertices < 1 || k_channels < 1 || filter_order < 1 || s_outputs < 1)
    throw Error("network dimensions must be >= 1");
  if (step_conv <= 0.0 || step_bias <= 0.0 || step_fc <= 0.0)
    throw Error("learning rates must be positive");
  if (activation == ActivationKind::LeakyRelu && (leaky_slope <= 0.0 || leaky_slope >= 1.0))
    throw Error("leaky slope must lie in (0, 1)");
  if (pooling == PoolingKind::CoarsenMax && activation != ActivationKind::Relu)
    throw Error("coarsen-max pooling is defined on post-relu signals");
}

GcnnParams init_gaussian(const GcnnConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return init_gaussian(config, rng);
}

GcnnParams init_gaussian(const GcnnConfig& config, Rng& rng) {
  config.validate();
  GcnnParams params;
  const double conv_scale = std::sqrt(2.0 / config.filter_order);
  params.conv_weights.resize(config.k_channels, config.filter_order);
  for (int k = 0; k < config.k_channels; ++k)
    for (int m = 0; m < config.filter_order; ++m)
      params.conv_weights(k, m) = conv_scale * rng.next_gaussian();
  params.biases = Vector::Zero(config.k_channels);
  const double fc_scale = std::sqrt(2.0 / config.flattened_size());
  params.fc_weights.resize(config.s_outputs, config.flattened_size());
  for (int p = 0; p < config.s_outputs; ++p)
    for (int m = 0; m < config.flattened_size(); ++m)
      params.fc_weights(p, m) = fc_scale * rng.next_gaussian();
  if (config.tie_channel_weights)
    for (int k = 0; k < config.k_channels; ++k)
      params.conv_weights.row(k).setConstant(params.conv_weights(k, 0));
  return params;
}

GcnnParams init_he_uniform(const GcnnConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return init_he_uniform(config, rng);
}

GcnnParams init_he_uniform(const GcnnConfig& config, Rng& rng) {
  config.validate();
  GcnnParams params;
  const double conv_bound = std::sqrt(6.0 / config.filter_order);
  params.conv_weights.resize(config.k_channels, config.filter_order);
  for (int k = 0; k < config.k_channels; ++k)
    for (int m = 0; m < config.filter_order; ++m)
      params.conv_weights(k, m) = conv_bound * (2.0 * rng.next_double() - 1.0);
  params.biases = Vector::Zero(config.k_channels);
  const double fc_bound = std::sqrt(6.0 / config.flattened_size());
  params.fc_weights.resize(config.s_outputs, config.flattened_size());
  for (int p = 0; p < config.s_outputs; ++p)
    for (int m = 0; m < config.flattened_size(); ++m)
      params.fc_weights(p, m) = fc_bound * (2.0 * rng.next_double() - 1.0);
  if (config.tie_channel_weights)
    for (int k = 0; k < config.k_channels; ++k)
      params.conv_weights.row(k).setConstant(params.conv_weights(k, 0));
  return params;
}

void init_xavier_fc(GcnnParams& params, const GcnnConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  init_xavier_fc(params, config, rng);
}

void init_xavier_fc(GcnnParams& params, const GcnnConfig& config, Rng& rng) {
  config.validate();
  const double scale = std::sqrt(2.0 / (config.flattened_size() + config.s_outputs));
  params.fc_weights.resize(config.s_outputs, config.flattened_size());
  for (int p = 0; p < config.s_outputs; ++p)
    for (int m = 0; m < config.flattened_size(); ++m)
      params.fc_weights(p, m) = scale * rng.next_gaussian();
}

ForwardTrace forward(const GraphSignal& x, const GcnnParams& params, const GcnnConfig& config,
                     const ShiftOperator& op, const Vector* target, const Graph* graph) {
  config.validate();
  if (x.size() != config.n_vertices || op.size() != config.n_vertices)
    throw ShapeMismatch("input or operator size does not match the configuration");
  if (params.conv_weights.rows() != config.k_channels ||
      params.conv_weights.cols() != config.filter_order ||
      params.fc_weights.rows() != config.s_outputs ||
      params.fc_weights.cols() != config.flattened_size())
    throw ShapeMismatch("parameter shapes do not match the configuration");

  const int n = config.n_vertices;
  const int k_count = config.k_channels;
  const auto powers = shift_powers(op, x, config.filter_order);

  ForwardTrace trace;
  trace.pre_activation.resize(k_count, n);
  for (int k = 0; k < k_count; ++k) {
    GraphSignal y = GraphSignal::Zero(n);
    for (int m = 0; m < config.filter_order; ++m) y += params.conv_weights(k, m) * powers[static_cast<std::size_t>(m)];
    trace.pre_activation.row(k) = y.transpose();
  }

  trace.relu_mask.resize(k_count, n);
  trace.post_activation.resize(k_count, n);
  for (int k = 0; k < k_count; ++k)
    for (int v = 0; v < n; ++v) {
      const double pre = trace.pre_activation(k, v) + params.biases(k);
      trace.relu_mask(k, v) = pre > 0.0 ? 1.0 : 0.0;
      trace.post_activation(k, v) =
          config.activation == ActivationKind::Relu
              ? std::max(0.0, pre)
              : (pre > 0.0 ? pre : config.leaky_slope * pre);
    }

  if (config.pooling == PoolingKind::CoarsenMax) {
    if (graph == nullptr) throw Error("coarsen-max pooling needs the graph");
    std::vector<CoarseningResult> per_channel;
    per_channel.reserve(static_cast<std::size_t>(k_count));
    for (int k = 0; k < k_count; ++k)
      per_channel.push_back(max_pool_coarsen(*graph, trace.post_activation.row(k).transpose()));
    trace.pool_mask = pool_indicator(trace.relu_mask, per_channel);
    trace.post_activation = trace.post_activation.cwiseProduct(trace.pool_mask);
  } else {
    trace.pool_mask = Matrix::Ones(k_count, n);
  }

  trace.flattened.resize(config.flattened_size());
  for (int k = 0; k < k_count; ++k)
    trace.flattened.segment(k * n, n) = trace.post_activation.row(k).transpose();

  trace.logits = params.fc_weights * trace.flattened;
  if (config.loss == LossKind::SoftmaxCrossEntropy) trace.probabilities = softmax(trace.logits);
  if (target != nullptr) trace.loss_value = loss(trace, *target, config);
  return trace;
}

double loss(const ForwardTrace& trace, const Vector& target, const GcnnConfig& config) {
  if (target.size() != trace.logits.size())
    throw ShapeMismatch("target length does not match the output layer");
  if (config.loss == LossKind::MseOnLogits) return 0.5 * (trace.logits - target).squaredNorm();
  double ce = 0.0;
  for (Eigen::Index p = 0; p < target.size(); ++p)
    if (target(p) != 0.0)
      ce -= target(p) * std::log(std::max(trace.probabilities(p), kProbabilityFloor));
  return ce;
}

namespace {

Vector output_delta(const ForwardTrace& trace, const Vector& target, const GcnnConfig& config) {
  return config.loss == LossKind::SoftmaxCrossEntropy ? Vector(trace.probabilities - target)
                                                      : Vector(trace.logits - target);
}

// Delta error at the conv layer given the FC weights to back-propagate through.
Matrix conv_delta(const Vector& delta_out, const Matrix& fc_weights, const ForwardTrace& trace,
                  const GcnnConfig& config) {
  const int n = config.n_vertices;
  Matrix delta(config.k_channels, n);
  for (int k = 0; k < config.k_channels; ++k)
    for (int v = 0; v < n; ++v) {
      double acc = 0.0;
      for (int p = 0; p < config.s_outputs; ++p) acc += delta_out(p) * fc_weights(p, k * n + v);
      acc *= trace.pool_mask(k, v) * activation_derivative(config, trace.relu_mask(k, v));
      delta(k, v) = acc;
    }
  return delta;
}

Matrix conv_gradient(const Matrix& delta, const ShiftOperator& op, const GraphSignal& x,
                     const GcnnConfig& config) {
  const auto powers = shift_powers(op, x, config.filter_order);
  Matrix grad(config.k_channels, config.filter_order);
  for (int k = 0; k < config.k_channels; ++k)
    for (int m = 0; m < config.filter_order; ++m)
      grad(k, m) = powers[static_cast<std::size_t>(m)].dot(delta.row(k).transpose());
  if (config.tie_channel_weights) {
    // one shared parameter per channel: its gradient is the sum over taps
    for (int k = 0; k < config.k_channels; ++k) grad.row(k).setConstant(grad.row(k).sum());
  }
  return grad;
}

}  // namespace

Gradients backward(const ForwardTrace& trace, const Vector& target, const GcnnParams& params,
                   const GcnnConfig& config, const ShiftOperator& op, const GraphSignal& x) {
  check_trace_shapes(trace, config);
  if (target.size() != config.s_outputs) throw ShapeMismatch("target length mismatch");

  Gradients grads;
  grads.delta_out = output_delta(trace, target, config);
  grads.grad_fc = grads.delta_out * trace.flattened.transpose();
  grads.delta_conv = conv_delta(grads.delta_out, params.fc_weights, trace, config);
  grads.grad_conv = conv_gradient(grads.delta_conv, op, x, config);
  grads.grad_bias = grads.delta_conv.rowwise().sum();
  return grads;
}

void sgd_step(GcnnParams& params, const Gradients& grads, const GcnnConfig& config) {
  params.conv_weights -= config.step_conv * grads.grad_conv;
  params.biases -= config.step_bias * grads.grad_bias;
  params.fc_weights -= config.step_fc * grads.grad_fc;
}

ForwardTrace train_step(GcnnParams& params, const TrainingSample& sample,
                        const GcnnConfig& config, const ShiftOperator& op,
                        Gradients* grads_out, const Graph* graph) {
  ForwardTrace trace = forward(sample.input, params, config, op, &sample.target, graph);

  Gradients grads;
  grads.delta_out = output_delta(trace, sample.target, config);
  grads.grad_fc = grads.delta_out * trace.flattened.transpose();
  if (config.sequential_fc_update) {
    params.fc_weights -= config.step_fc * grads.grad_fc;
    grads.delta_conv = conv_delta(grads.delta_out, params.fc_weights, trace, config);
  } else {
    grads.delta_conv = conv_delta(grads.delta_out, params.fc_weights, trace, config);
    params.fc_weights -= config.step_fc * grads.grad_fc;
  }
  grads.grad_conv = conv_gradient(grads.delta_conv, op, sample.input, config);
  grads.grad_bias = grads.delta_conv.rowwise().sum();

  params.conv_weights -= config.step_conv * grads.grad_conv;
  params.biases -= config.step_bias * grads.grad_bias;

  if (grads_out != nullptr) *grads_out = grads;
  return trace;
}

TrainLog train(const std::vector<TrainingSample>& dataset, const GcnnConfig& config,
               GcnnParams& params, int epochs, const ShiftOperator& op, const Graph* graph) {
  if (dataset.empty()) throw Error("training dataset is empty");
  TrainLog log;
  log.rows.reserve(static_cast<std::size_t>(epochs) * dataset.size());
  int iteration = 0;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    for (const auto& sample : dataset) {
      ForwardTrace trace = train_step(params, sample, config, op, nullptr, graph);
      TrainLogRow row;
      row.iteration = ++iteration;
      row.epoch = epoch;
      int kind = 0;
      sample.target.maxCoeff(&kind);
      row.sample_kind = kind + 1;
      row.loss = trace.loss_value;
      row.p1 = config.loss == LossKind::SoftmaxCrossEntropy ? trace.probabilities(0)
                                                            : softmax(trace.logits)(0);
      row.fc_weights.resize(params.fc_weights.size());
      for (Eigen::Index p = 0, idx = 0; p < params.fc_weights.rows(); ++p)
        for (Eigen::Index m = 0; m < params.fc_weights.cols(); ++m)
          row.fc_weights(idx++) = params.fc_weights(p, m);
      log.rows.push_back(std::move(row));
    }
  }
  return log;
}

Prediction predict(const GraphSignal& x, const GcnnParams& params, const GcnnConfig& config,
                   const ShiftOperator& op, const Graph* graph) {
  const ForwardTrace trace = forward(x, params, config, op, nullptr, graph);
  const Vector probs = config.loss == LossKind::SoftmaxCrossEntropy ? trace.probabilities
                                                                    : softmax(trace.logits);
  int winner = 0;
  for (Eigen::Index p = 1; p < probs.size(); ++p)
    if (probs(p) > probs(winner)) winner = static_cast<int>(p);
  return {winner + 1, probs};
}

}  // namespace gmf
