// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "discgan/dgan.hpp"

#include <cmath>
#include <limits>

#include "discgan/format.hpp"

namespace discgan {

void DganConfig::validate() const {
  if (batch_real < 2 || batch_gen < 2) throw DataError("batch sizes must be >= 2");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw DataError("learning rate must be finite and >= 0");
  if (critic_steps < 0) throw DataError("critic steps must be >= 0");
  if (!(clip > 0.0)) throw DataError("clip constant must be positive");
  if (steps < 1) throw DataError("steps must be >= 1");
  if (embed_dim < 1 || noise_dim < 1 || data_dim < 1) throw DataError("dimensions must be >= 1");
}

std::string trace_record_json(const TraceRecord& r) {
  return "{\"step\":" + std::to_string(r.step) + ",\"F\":" + format_double(r.F) +
         ",\"converged\":" + (r.converged ? "true" : "false") + "}";
}

NumericalAbort::NumericalAbort(int step, TrainTrace partial)
    : std::runtime_error("non-finite loss at step " + std::to_string(step)),
      step_(step),
      partial_(std::move(partial)) {}

namespace {

// dF/dE = coef * E v v^T.
Matrix envelope_gradient(const Matrix& e, std::span<const double> v, double coef) {
  Matrix g(e.rows(), e.cols());
  for (std::size_t i = 0; i < e.rows(); ++i) {
    const double ev = coef * dot(e.row(i), v);
    for (std::size_t j = 0; j < e.cols(); ++j) g(i, j) = ev * v[j];
  }
  return g;
}

bool all_finite(const Matrix& m) {
  for (double x : m.data()) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

LossAndGrads dgan_loss_and_grads(const MlpParams& embedding, const MlpParams& generator,
                                 const SampleMatrix& xr_batch, const SampleMatrix& z_batch,
                                 const DiscOptions& opts) {
  if (xr_batch.empty() || z_batch.empty()) throw DataError("empty sample");
  if (generator.out_dim() != embedding.in_dim()) {
    throw DataError("generator output dim does not match embedding input dim");
  }
  const ForwardResult gen = forward(generator, z_batch);
  const ForwardResult emb_g = forward(embedding, gen.y);
  const ForwardResult emb_r = forward(embedding, xr_batch);

  LossAndGrads out;
  if (!all_finite(emb_g.y) || !all_finite(emb_r.y)) {
    out.F = std::numeric_limits<double>::quiet_NaN();
    out.converged = false;
    out.grad_embedding = GradBuffer::zeros_like(embedding);
    out.grad_generator = GradBuffer::zeros_like(generator);
    return out;
  }
  const SymMatrix m = cov_diff(emb_r.y, emb_g.y);
  const DiscResult dr = discrepancy_from_matrix(m, opts);

  out.F = std::abs(dr.spectral);
  out.converged = dr.converged;
  if (m.is_zero()) {
    out.grad_embedding = GradBuffer::zeros_like(embedding);
    out.grad_generator = GradBuffer::zeros_like(generator);
    return out;
  }
  const double s = static_cast<double>(dr.sign);
  const double n = static_cast<double>(emb_g.y.rows());
  const double mr = static_cast<double>(emb_r.y.rows());
  const Matrix d_eg = envelope_gradient(emb_g.y, dr.direction, s * 2.0 / n);
  const Matrix d_er = envelope_gradient(emb_r.y, dr.direction, -s * 2.0 / mr);

  BackwardResult bg = backward(embedding, emb_g.tape, d_eg);
  const BackwardResult br = backward(embedding, emb_r.tape, d_er);
  bg.grads.add(br.grads);
  out.grad_embedding = std::move(bg.grads);
  out.grad_generator = backward(generator, gen.tape, bg.dx).grads;
  return out;
}

double dgan_loss(const MlpParams& embedding, const MlpParams& generator,
                 const SampleMatrix& xr_batch, const SampleMatrix& z_batch,
                 const DiscOptions& opts) {
  const Matrix eg = predict(embedding, predict(generator, z_batch));
  const Matrix er = predict(embedding, xr_batch);
  if (!all_finite(eg) || !all_finite(er)) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(discrepancy_from_matrix(cov_diff(er, eg), opts).spectral);
}

DganModels init_toy_models(const DganConfig& cfg) {
  cfg.validate();
  RngStream rng = RngStream(cfg.seed).derive(1);
  DganModels m;
  m.generator = init_mlp({cfg.noise_dim, 32, 32, cfg.data_dim},
                         {Activation::tanh, Activation::tanh, Activation::identity}, rng,
                         /*unit_ball_output=*/true);
  m.embedding = clip_weights(
      init_mlp({cfg.data_dim, 16, cfg.embed_dim}, {Activation::tanh, Activation::identity}, rng),
      cfg.clip);
  return m;
}

DganRun dgan_train(const DganConfig& cfg, Sampler real, Sampler noise, DganModels init,
                   const TraceSink& sink) {
  cfg.validate();
  init.generator.validate();
  init.embedding.validate();
  DganRun run{std::move(init.generator), std::move(init.embedding), {}};
  OptimizerState opt_gen = make_optimizer(cfg.optimizer, cfg.lr, run.generator);
  OptimizerState opt_emb = make_optimizer(cfg.optimizer, cfg.lr, run.embedding);

  for (int step = 1; step <= cfg.steps; ++step) {
    for (int c = 0; c < cfg.critic_steps; ++c) {
      const SampleMatrix xr = real(cfg.batch_real);
      const SampleMatrix z = noise(cfg.batch_gen);
      const LossAndGrads lg = dgan_loss_and_grads(run.embedding, run.generator, xr, z);
      if (!std::isfinite(lg.F)) throw NumericalAbort(step, run.trace);
      apply_update(run.embedding, lg.grad_embedding, opt_emb, +1);
      run.embedding = clip_weights(run.embedding, cfg.clip);
    }
    const SampleMatrix xr = real(cfg.batch_real);
    const SampleMatrix z = noise(cfg.batch_gen);
    const LossAndGrads lg = dgan_loss_and_grads(run.embedding, run.generator, xr, z);
    if (!std::isfinite(lg.F)) throw NumericalAbort(step, run.trace);
    apply_update(run.generator, lg.grad_generator, opt_gen, -1);

    TraceRecord rec{step, lg.F, lg.converged, run.generator.l2_norm(), run.embedding.l2_norm()};
    if (!std::isfinite(rec.generator_norm)) throw NumericalAbort(step, run.trace);
    run.trace.records.push_back(rec);
    if (sink) sink(rec);
  }
  return run;
}

DganRun dgan_train(const DganConfig& cfg, Sampler real, Sampler noise, const TraceSink& sink) {
  return dgan_train(cfg, std::move(real), std::move(noise), init_toy_models(cfg), sink);
}

std::vector<std::pair<double, double>> continuity_probe(const MlpParams& generator,
                                                        const MlpParams& embedding,
                                                        const SampleMatrix& xr,
                                                        const SampleMatrix& z,
                                                        const std::vector<double>& epsilons,
                                                        std::uint64_t direction_seed) {
  for (double e : epsilons) {
    if (!(e >= 0.0)) throw DataError("continuity probe step sizes must be >= 0");
  }
  RngStream rng(direction_seed);
  const std::vector<double> base = generator.flatten();
  const std::vector<double> delta = rng.unit_vector(base.size());
  const double f0 = dgan_loss(embedding, generator, xr, z);

  std::vector<std::pair<double, double>> out;
  MlpParams moved = generator;
  std::vector<double> p(base.size());
  for (double eps : epsilons) {
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = base[i] + eps * delta[i];
    moved.assign(p);
    out.emplace_back(eps, std::abs(dgan_loss(embedding, moved, xr, z) - f0));
  }
  return out;
}

bool continuity_gaps_monotone(const std::vector<std::pair<double, double>>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (points[j].first < points[i].first && points[j].second > points[i].second + 1e-9) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace discgan
