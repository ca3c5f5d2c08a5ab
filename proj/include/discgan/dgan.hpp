// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef DISCGAN_DGAN_HPP_
#define DISCGAN_DGAN_HPP_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "discgan/datagen.hpp"
#include "discgan/discrepancy.hpp"
#include "discgan/neuralnet.hpp"

namespace discgan {

struct DganConfig {
  std::size_t batch_real = 64;  // m
  std::size_t batch_gen = 64;   // n
  double lr = 1e-3;
  /// Embedding ascent steps per generator step; 0 keeps the embedding fixed.
  int critic_steps = 3;
  double clip = 0.5;
  int steps = 1000;
  std::size_t embed_dim = 8;
  std::size_t noise_dim = 2;
  std::size_t data_dim = 2;
  OptimizerKind optimizer = OptimizerKind::adam;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRecord {
  int step = 0;
  double F = 0.0;
  bool converged = true;
  double generator_norm = 0.0;
  double embedding_norm = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
};

/// {"step":int,"F":float,"converged":bool}
std::string trace_record_json(const TraceRecord& r);

/// Raised when the loss becomes NaN or infinite; carries the trace so far.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(int step, TrainTrace partial);
  int step() const { return step_; }
  const TrainTrace& partial_trace() const { return partial_; }

 private:
  int step_;
  TrainTrace partial_;
};

struct LossAndGrads {
  /// ||cov(f(g(Z))) - cov(f(Xr))||_2, without the factor 2 of the public
  /// discrepancy.
  double F = 0.0;
  GradBuffer grad_embedding;
  GradBuffer grad_generator;
  bool converged = true;
};

/// Embeds both batches, forms the covariance difference and its dominant
/// eigenpair (v, lambda), and back-propagates F = s v^T M v with v held fixed:
///   dF/dE_g =  s (2/n) E_g v v^T,   dF/dE_r = -s (2/m) E_r v v^T.
/// When M is exactly zero both gradients are zero. A non-finite embedded
/// value yields F = NaN with zero gradients.
LossAndGrads dgan_loss_and_grads(const MlpParams& embedding, const MlpParams& generator,
                                 const SampleMatrix& xr_batch, const SampleMatrix& z_batch,
                                 const DiscOptions& opts = {});

/// F only.
double dgan_loss(const MlpParams& embedding, const MlpParams& generator,
                 const SampleMatrix& xr_batch, const SampleMatrix& z_batch,
                 const DiscOptions& opts = {});

struct DganModels {
  MlpParams generator;
  MlpParams embedding;
};

/// Generator noise->32->32->data (tanh, tanh, identity, then the unit-ball
/// map) and embedding data->16->embed (tanh, identity), the embedding
/// clipped to the configured constant.
DganModels init_toy_models(const DganConfig& cfg);

struct DganRun {
  MlpParams generator;
  MlpParams embedding;
  TrainTrace trace;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// Alternating training: each step runs `critic_steps` rounds of
/// [fresh batches, ascend the embedding, clip], then one round of
/// [fresh batches, descend the generator]. The recorded F is the one from the
/// generator phase. Throws NumericalAbort on a non-finite loss.
DganRun dgan_train(const DganConfig& cfg, Sampler real, Sampler noise, DganModels init,
                   const TraceSink& sink = {});
DganRun dgan_train(const DganConfig& cfg, Sampler real, Sampler noise,
                   const TraceSink& sink = {});

/// |F(theta + eps delta) - F(theta)| along a fixed random unit direction
/// delta in generator parameter space, for each eps.
std::vector<std::pair<double, double>> continuity_probe(const MlpParams& generator,
                                                        const MlpParams& embedding,
                                                        const SampleMatrix& xr,
                                                        const SampleMatrix& z,
                                                        const std::vector<double>& epsilons,
                                                        std::uint64_t direction_seed);

/// True when the gaps shrink (within 1e-9) as eps decreases.
bool continuity_gaps_monotone(const std::vector<std::pair<double, double>>& points);

}  // namespace discgan

#endif  // DISCGAN_DGAN_HPP_
