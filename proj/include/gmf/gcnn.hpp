#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "gmf/coarsening.hpp"
#include "gmf/graph.hpp"

namespace gmf {

enum class LossKind { MseOnLogits, SoftmaxCrossEntropy };
enum class ActivationKind { Relu, LeakyRelu };
enum class PoolingKind { None, CoarsenMax };

/// Two-layer network shape and training hyperparameters. The defaults are
/// the worked-example configuration: K=2 channels of order M=2 over the
/// normalized weight matrix, one fully connected layer with S=2 outputs,
/// softmax cross-entropy, steps alpha (conv), beta (bias), gamma (FC).
struct GcnnConfig {
  int n_vertices = 8;
  int k_channels = 2;
  int filter_order = 2;
  int s_outputs = 2;
  LossKind loss = LossKind::SoftmaxCrossEntropy;
  ActivationKind activation = ActivationKind::Relu;
  double leaky_slope = 0.01;
  PoolingKind pooling = PoolingKind::None;  // coarsen-max requires relu
  double step_conv = 0.1;
  double step_bias = 0.05;
  double step_fc = 0.1;
  // Update order used by train_step: the FC weights are updated first and the
  // delta error is back-propagated through the *updated* FC weights. This is
  // what the reference worked example does; turn off for simultaneous updates.
  bool sequential_fc_update = true;
  // Single-parameter channels w_k(0)=w_k(1)=...=theta_k (kept for comparison).
  bool tie_channel_weights = false;

  int flattened_size() const { return k_channels * n_vertices; }
  void validate() const;
};

struct GcnnParams {
  Matrix conv_weights;  // K x M, entry w_k(nu)
  Vector biases;        // K
  Matrix fc_weights;    // S x (K*N), entry v_p(m)
};

/// Every intermediate of one forward pass.
struct ForwardTrace {
  Matrix pre_activation;   // K x N, y_k(n) before the bias
  Matrix post_activation;  // K x N, o_k(n) = f(y_k(n) + b_k), after pooling mask
  Matrix relu_mask;        // K x N, 1 iff y_k(n) + b_k > 0 (strict)
  Matrix pool_mask;        // K x N, survivors of max-pooling (all ones when off)
  Vector flattened;        // K*N, o_F((k-1)N + n) = o_k(n)
  Vector logits;           // S
  Vector probabilities;    // S, present iff softmax loss
  double loss_value = std::numeric_limits<double>::quiet_NaN();  // iff target given
};

struct Gradients {
  Vector delta_out;   // S
  Matrix delta_conv;  // K x N
  Matrix grad_conv;   // K x M
  Vector grad_bias;   // K
  Matrix grad_fc;     // S x (K*N)
};

struct TrainingSample {
  GraphSignal input;
  Vector target;
};

class Rng;

/// Conv weights ~ sqrt(2/M) N(0,1), FC weights ~ sqrt(2/(K*N)) N(0,1),
/// biases zero. Draw order: conv row-major, then FC row-major. The Rng
/// overloads continue an existing stream instead of seeding a fresh one.
GcnnParams init_gaussian(const GcnnConfig& config, std::uint64_t seed);
GcnnParams init_gaussian(const GcnnConfig& config, Rng& rng);

/// Conv and FC weights uniform on [-sqrt(6/fan_in), sqrt(6/fan_in)].
GcnnParams init_he_uniform(const GcnnConfig& config, std::uint64_t seed);
GcnnParams init_he_uniform(const GcnnConfig& config, Rng& rng);

/// Replaces only the FC weights with sqrt(2/(N*K+S)) N(0,1) draws.
void init_xavier_fc(GcnnParams& params, const GcnnConfig& config, std::uint64_t seed);
void init_xavier_fc(GcnnParams& params, const GcnnConfig& config, Rng& rng);

/// Forward pass; loss is filled iff target is non-null; graph is required only
/// for coarsen-max pooling.
ForwardTrace forward(const GraphSignal& x, const GcnnParams& params, const GcnnConfig& config,
                     const ShiftOperator& op, const Vector* target = nullptr,
                     const Graph* graph = nullptr);

double loss(const ForwardTrace& trace, const Vector& target, const GcnnConfig& config);

/// Gradients of the loss at the current parameters (all blocks evaluated at
/// one point; matches central finite differences).
Gradients backward(const ForwardTrace& trace, const Vector& target, const GcnnParams& params,
                   const GcnnConfig& config, const ShiftOperator& op, const GraphSignal& x);

/// params -= steps * gradients (conv: alpha, bias: beta, FC: gamma).
void sgd_step(GcnnParams& params, const Gradients& grads, const GcnnConfig& config);

/// One full training iteration: forward, FC update, delta back-propagation
/// (through the updated FC weights when sequential_fc_update is set), conv and
/// bias updates. Returns the forward trace; fills grads_out when given.
ForwardTrace train_step(GcnnParams& params, const TrainingSample& sample,
                        const GcnnConfig& config, const ShiftOperator& op,
                        Gradients* grads_out = nullptr, const Graph* graph = nullptr);

struct TrainLogRow {
  int iteration;        // 1-based, over all epochs
  int epoch;            // 1-based
  int sample_kind;      // argmax of the target, 1-based
  double loss;
  double p1;            // first softmax output
  Vector fc_weights;    // snapshot after the update
};

struct TrainLog {
  std::vector<TrainLogRow> rows;
};

/// Runs epochs passes over the dataset in order, one train_step per sample.
TrainLog train(const std::vector<TrainingSample>& dataset, const GcnnConfig& config,
               GcnnParams& params, int epochs, const ShiftOperator& op,
               const Graph* graph = nullptr);

struct Prediction {
  int winner;  // 1-based output index; ties go to the lowest index
  Vector probabilities;
};

Prediction predict(const GraphSignal& x, const GcnnParams& params, const GcnnConfig& config,
                   const ShiftOperator& op, const Graph* graph = nullptr);

}  // namespace gmf
