// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "discgan/dgan.hpp"
#include "oracles.hpp"

using namespace discgan;

namespace {

MlpParams linear1(double w, double b = 0.0) {
  MlpParams net;
  net.layers.push_back(Layer{Matrix{{w}}, {b}, Activation::identity});
  return net;
}

double second_moment(const Matrix& x) {
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return s / static_cast<double>(x.rows());
}

Sampler normal_sampler(double scale, std::uint64_t seed) {
  return [scale, rng = RngStream(seed)](std::size_t n) mutable {
    Matrix x(n, 1);
    for (double& v : x.data()) v = scale * rng.normal();
    return x;
  };
}

// Rows come in (z, -z) pairs, so every batch has mean exactly zero.
Sampler antithetic_sampler(std::uint64_t seed) {
  return [rng = RngStream(seed)](std::size_t n) mutable {
    Matrix x(n, 1);
    for (std::size_t i = 0; i + 1 < n; i += 2) {
      x(i, 0) = rng.normal();
      x(i + 1, 0) = -x(i, 0);
    }
    return x;
  };
}

}  // namespace

TEST_CASE("scalar linear generator: closed-form gradient") {
  RngStream rng(31);
  for (int t = 0; t < 20; ++t) {
    const Matrix xr = oracle::random_matrix(16, 1, rng);
    const Matrix z = oracle::random_matrix(16, 1, rng, -2.0, 2.0);
    const double theta = rng.uniform(-1.5, 1.5);
    const double sr = second_moment(xr), sz = second_moment(z);
    const auto lg = dgan_loss_and_grads(linear1(1.0), linear1(theta), xr, z);
    const double gap = theta * theta * sz - sr;
    CHECK(lg.F == doctest::Approx(std::abs(gap)).epsilon(1e-12));
    const double want = (gap >= 0 ? 1.0 : -1.0) * 2.0 * theta * sz;
    CHECK(std::abs(lg.grad_generator.dw[0](0, 0) - want) <= 1e-10);
  }
}

TEST_CASE("identical embedded batches give zero loss and zero gradients") {
  RngStream rng(32);
  const MlpParams emb = init_mlp({2, 4, 3}, {Activation::tanh, Activation::identity}, rng);
  MlpParams gen;
  gen.layers.push_back(Layer{Matrix{{1, 0}, {0, 1}}, {0, 0}, Activation::identity});
  const Matrix x = oracle::random_ball_samples(10, 2, rng);
  const auto lg = dgan_loss_and_grads(emb, gen, x, x);
  CHECK(lg.F == 0.0);
  for (double g : lg.grad_embedding.flatten()) CHECK(g == 0.0);
  for (double g : lg.grad_generator.flatten()) CHECK(g == 0.0);
}

TEST_CASE("F equals half the public discrepancy on the embedded batches") {
  RngStream rng(33);
  DganConfig cfg;
  cfg.embed_dim = 4;
  for (int t = 0; t < 10; ++t) {
    cfg.seed = t;
    const DganModels m = init_toy_models(cfg);
    const Matrix xr = oracle::random_ball_samples(20, 2, rng);
    Matrix z(24, 2);
    for (double& v : z.data()) v = rng.normal();
    const double f = dgan_loss_and_grads(m.embedding, m.generator, xr, z).F;
    const Matrix eg = predict(m.embedding, predict(m.generator, z));
    const Matrix er = predict(m.embedding, xr);
    CHECK(std::abs(f - empirical_discrepancy(er, eg).value / 2.0) <= 1e-10);
    CHECK(f == doctest::Approx(dgan_loss(m.embedding, m.generator, xr, z)).epsilon(1e-12));
  }
}

TEST_CASE("envelope gradients match finite differences") {
  RngStream rng(34);
  int checked = 0;
  for (int t = 0; t < 40 && checked < 20; ++t) {
    const MlpParams gen = init_mlp({2, 6, 2}, {Activation::tanh, Activation::identity}, rng, true);
    const MlpParams emb = init_mlp({2, 5, 3}, {Activation::tanh, Activation::identity}, rng);
    const Matrix xr = oracle::random_ball_samples(12, 2, rng);
    Matrix z(10, 2);
    for (double& v : z.data()) v = rng.normal();
    const SymMatrix m = cov_diff(predict(emb, xr), predict(emb, predict(gen, z)));
    if (oracle::magnitude_gap(m) <= 1e-4) continue;
    ++checked;
    const auto lg = dgan_loss_and_grads(emb, gen, xr, z);
    const auto fd_gen = oracle::finite_difference(
        gen, [&](const MlpParams& g) { return dgan_loss(emb, g, xr, z); });
    const auto fd_emb = oracle::finite_difference(
        emb, [&](const MlpParams& e) { return dgan_loss(e, gen, xr, z); });
    CHECK(oracle::relative_error(lg.grad_generator.flatten(), fd_gen) <= 1e-4);
    CHECK(oracle::relative_error(lg.grad_embedding.flatten(), fd_emb) <= 1e-4);
  }
  CHECK(checked == 20);
}

TEST_CASE("dgan_loss_and_grads errors") {
  RngStream rng(35);
  const MlpParams gen = init_mlp({2, 3}, {Activation::identity}, rng);
  const MlpParams emb = init_mlp({2, 2}, {Activation::identity}, rng);
  CHECK_THROWS_AS(dgan_loss_and_grads(emb, gen, Matrix{{0.1, 0.2}}, Matrix{{1, 1}}), DataError);
  CHECK_THROWS_AS(dgan_loss_and_grads(emb, emb, Matrix(), Matrix{{1, 1}}), DataError);
}

TEST_CASE("DganConfig validation") {
  DganConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.batch_real = 1;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = {};
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = {};
  cfg.clip = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = {};
  cfg.lr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
  cfg = {};
  cfg.embed_dim = 0;
  CHECK_THROWS_AS(cfg.validate(), DataError);
}

TEST_CASE("one step at zero learning rate leaves parameters unchanged") {
  DganConfig cfg;
  cfg.steps = 1;
  cfg.lr = 0.0;
  cfg.seed = 3;
  const RingSpec spec;
  const DganModels init = init_toy_models(cfg);
  const DganRun run = dgan_train(cfg, rescaled(ring_sampler(spec, RngStream(1)), spec.unit_bound()),
                                 gaussian_sampler(2, RngStream(2)), init);
  CHECK(run.generator == init.generator);
  CHECK(run.embedding == init.embedding);
  CHECK(run.trace.records.size() == 1);
}

TEST_CASE("scalar training reaches the analytic fixed point") {
  DganConfig cfg;
  cfg.steps = 500;
  cfg.lr = 0.01;
  cfg.critic_steps = 0;
  cfg.batch_real = 256;
  cfg.batch_gen = 256;
  cfg.data_dim = 1;
  cfg.noise_dim = 1;
  cfg.embed_dim = 1;
  // Target second moment 1 and unit noise: theta^2 -> s_r / s_z = 1. With
  // zero-mean noise batches the bias gradient vanishes, keeping g linear.
  const DganRun run = dgan_train(cfg, normal_sampler(1.0, 1), antithetic_sampler(2),
                                 DganModels{linear1(0.3), linear1(1.0)});
  const double theta = run.generator.layers[0].w(0, 0);
  const double b = run.generator.layers[0].b[0];
  CHECK(b == 0.0);
  CHECK(std::abs(theta * theta - 1.0) <= 0.05);
  CHECK(run.embedding == linear1(1.0));
}

TEST_CASE("training is deterministic and clips the embedding") {
  DganConfig cfg;
  cfg.steps = 30;
  cfg.seed = 11;
  cfg.clip = 0.05;
  const RingSpec spec;
  auto go = [&] {
    std::vector<TraceRecord> seen;
    DganRun r = dgan_train(cfg, rescaled(ring_sampler(spec, RngStream(5)), spec.unit_bound()),
                           gaussian_sampler(2, RngStream(6)),
                           [&](const TraceRecord& rec) { seen.push_back(rec); });
    CHECK(seen.size() == r.trace.records.size());
    return r;
  };
  const DganRun a = go(), b = go();
  CHECK(a.trace.records.size() == 30);
  for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
    CHECK(a.trace.records[i].F == b.trace.records[i].F);
    CHECK(a.trace.records[i].step == static_cast<int>(i) + 1);
  }
  CHECK(a.generator == b.generator);
  CHECK(a.embedding.max_abs() <= cfg.clip);
  CHECK(trace_record_json(a.trace.records[0]).rfind("{\"step\":1,\"F\":", 0) == 0);
}

TEST_CASE("non-finite data aborts with the partial trace") {
  DganConfig cfg;
  cfg.steps = 10;
  cfg.critic_steps = 0;
  int calls = 0;
  Sampler real = [&calls](std::size_t n) {
    Matrix x(n, 2, 0.1);
    if (++calls == 4) x(0, 0) = std::nan("");
    return x;
  };
  try {
    dgan_train(cfg, real, gaussian_sampler(2, RngStream(1)));
    FAIL("expected NumericalAbort");
  } catch (const NumericalAbort& e) {
    CHECK(e.step() == 4);
    CHECK(e.partial_trace().records.size() == 3);
    CHECK(std::string(e.what()).find("step 4") != std::string::npos);
  }
}

TEST_CASE("ring training with a fixed embedding lowers F") {
  DganConfig cfg;
  cfg.steps = 5000;
  cfg.seed = 1;
  cfg.critic_steps = 0;
  const RingSpec spec;
  const DganRun run =
      dgan_train(cfg, rescaled(ring_sampler(spec, RngStream(7)), spec.unit_bound()),
                 gaussian_sampler(2, RngStream(8)));
  auto window_mean = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < from + 100; ++i) s += run.trace.records[i].F;
    return s / 100.0;
  };
  const double first = window_mean(0), last = window_mean(run.trace.records.size() - 100);
  CHECK(last <= 0.5 * first);
}

TEST_CASE("adversarial ring training improves the generator under the learned embedding") {
  DganConfig cfg;
  cfg.steps = 2000;
  cfg.seed = 1;
  const RingSpec spec;
  const DganModels init = init_toy_models(cfg);
  const DganRun run =
      dgan_train(cfg, rescaled(ring_sampler(spec, RngStream(7)), spec.unit_bound()),
                 gaussian_sampler(2, RngStream(8)), init);
  RngStream rng(99);
  const Matrix xr = rescale_to_unit_ball(sample_ring(spec, 4000, rng), spec.unit_bound());
  const Matrix z = gaussian_sampler(2, RngStream(100))(4000);
  CHECK(dgan_loss(run.embedding, run.generator, xr, z) <
        dgan_loss(run.embedding, init.generator, xr, z));
}

TEST_CASE("continuity_probe") {
  SUBCASE("scalar analytic gaps") {
    const Matrix z{{0.5}, {-1.0}, {1.5}};
    const Matrix xr{{0.2}, {-0.4}};
    const double w = 0.8;
    const std::vector<double> eps{1e-1, 1e-2, 1e-3, 0.0};
    const auto pts = continuity_probe(linear1(w), linear1(1.0), xr, z, eps, 9);
    const auto delta = RngStream(9).unit_vector(2);
    const double sz = second_moment(z), sr = second_moment(xr);
    double mz = 0.0;
    for (double v : z.data()) mz += v / 3.0;
    auto f = [&](double e) {
      const double a = w + e * delta[0], c = e * delta[1];
      return std::abs(a * a * sz + 2.0 * a * c * mz + c * c - sr);
    };
    for (const auto& [e, gap] : pts) CHECK(std::abs(gap - std::abs(f(e) - f(0.0))) <= 1e-12);
    CHECK(pts.back().second == 0.0);
    CHECK(continuity_gaps_monotone(pts));
  }
  SUBCASE("random network") {
    DganConfig cfg;
    cfg.seed = 4;
    const DganModels m = init_toy_models(cfg);
    RngStream rng(36);
    const Matrix xr = oracle::random_ball_samples(64, 2, rng);
    Matrix z(64, 2);
    for (double& v : z.data()) v = rng.normal();
    const auto pts =
        continuity_probe(m.generator, m.embedding, xr, z, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, 3);
    CHECK(pts.back().second < pts.front().second);
    CHECK(continuity_gaps_monotone(pts));
  }
  CHECK_THROWS_AS(continuity_probe(linear1(1), linear1(1), Matrix{{0.1}}, Matrix{{0.1}}, {-1.0}, 1),
                  DataError);
}
