// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_NEURALNET_HPP_
#define DISCGAN_NEURALNET_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "discgan/matrix.hpp"
#include "discgan/rng.hpp"

namespace discgan {

enum class Activation { tanh, relu, identity };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct Layer {
  Matrix w;  // out x in
  std::vector<double> b;
  Activation act = Activation::identity;

  bool operator==(const Layer&) const = default;
};

/// Feed-forward network. When `unit_ball_output` is set, each output row is
/// mapped through y -> y / max(1, |y|) after the last layer.
struct MlpParams {
  std::vector<Layer> layers;
  bool unit_ball_output = false;

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t num_params() const;
  /// Throws DataError when layer shapes do not chain or a value is not finite.
  void validate() const;
  double max_abs() const;
  double l2_norm() const;

  /// Weights row-major then bias, layer by layer.
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  bool operator==(const MlpParams&) const = default;
};

/// Partial derivatives laid out like MlpParams.
struct GradBuffer {
  std::vector<Matrix> dw;
  std::vector<std::vector<double>> db;

  static GradBuffer zeros_like(const MlpParams& net);
  std::vector<double> flatten() const;
  void add(const GradBuffer& other);
  bool matches(const MlpParams& net) const;
};

/// Activations recorded by forward() for the matching backward().
struct Tape {
  std::vector<Matrix> inputs;  // input to each layer
  std::vector<Matrix> outputs;  // post-activation output of each layer
  Matrix final_output;  // after the optional unit-ball map
};

struct ForwardResult {
  Matrix y;
  Tape tape;
};

struct BackwardResult {
  GradBuffer grads;
  Matrix dx;
};

/// Dense layers with weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]
/// and zero biases. `dims` has one more entry than `acts`.
MlpParams init_mlp(const std::vector<std::size_t>& dims, const std::vector<Activation>& acts,
                   RngStream& rng, bool unit_ball_output = false);

ForwardResult forward(const MlpParams& net, const Matrix& x);
Matrix predict(const MlpParams& net, const Matrix& x);

/// Reverse-mode gradients of sum(Y .* dY) with respect to the parameters and
/// the input.
BackwardResult backward(const MlpParams& net, const Tape& tape, const Matrix& dy);

/// Clamps every weight and bias to [-c, c].
MlpParams clip_weights(const MlpParams& net, double c);

enum class OptimizerKind { sgd, adam };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::sgd;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  GradBuffer m;
  GradBuffer v;
};

OptimizerState make_optimizer(OptimizerKind kind, double lr, const MlpParams& net);

/// Moves parameters by lr * step along `direction` (+1 ascent, -1 descent).
void apply_update(MlpParams& net, const GradBuffer& grads, OptimizerState& opt, int direction);

/// Checkpoint document {"layers":[{"w":[[...]],"b":[...],"act":"tanh"},...]},
/// numbers written with 17 significant digits. A generator with a unit-ball
/// output map adds "unit_ball_output":true.
std::string to_checkpoint_json(const MlpParams& net);
MlpParams from_checkpoint_json(std::string_view text);
void save_checkpoint(const MlpParams& net, const std::string& path);
MlpParams load_checkpoint(const std::string& path);

}  // namespace discgan

#endif  // DISCGAN_NEURALNET_HPP_
