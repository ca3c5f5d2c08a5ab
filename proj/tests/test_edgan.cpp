// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "discgan/edgan.hpp"
#include "oracles.hpp"

using namespace discgan;

namespace {

EnsembleInputs random_inputs(std::size_t p, std::size_t d, RngStream& rng) {
  EnsembleInputs in;
  for (std::size_t k = 0; k < p; ++k) {
    Matrix x = oracle::random_ball_samples(10 + rng.index(30), d, rng);
    // Give each generator its own scale so the minimizer is not trivial.
    const double s = 0.3 + 0.7 * rng.uniform();
    for (double& v : x.data()) v *= s;
    in.generators.push_back(std::move(x));
  }
  in.real = oracle::random_ball_samples(10 + rng.index(30), d, rng);
  for (double& v : in.real.data()) v *= 0.6;
  return in;
}

Matrix scaled_column(std::initializer_list<double> vals) {
  Matrix x(vals.size(), 1);
  std::size_t i = 0;
  for (double v : vals) x(i++, 0) = v;
  return x;
}

}  // namespace

TEST_CASE("mixture_cov_diff") {
  RngStream rng(41);
  const Matrix xr = oracle::random_ball_samples(12, 3, rng);
  const Matrix x1 = oracle::random_ball_samples(9, 3, rng);
  const Matrix x2 = oracle::random_ball_samples(7, 3, rng);
  const std::vector<double> one{1.0};
  CHECK(mixture_cov_diff(one, EnsembleInputs{{xr}, xr}).is_zero());

  const std::vector<double> corner{1.0, 0.0};
  const SymMatrix a = mixture_cov_diff(corner, EnsembleInputs{{x1, x2}, xr});
  CHECK(a.entries() == cov_diff(xr, x1).entries());

  const EnsembleInputs in = random_inputs(3, 4, rng);
  const std::vector<double> alpha{0.2, 0.5, 0.3};
  const SymMatrix m = mixture_cov_diff(alpha, in);
  Matrix ref = oracle::naive_second_moment(in.real);
  for (double& v : ref.data()) v = -v;
  for (std::size_t k = 0; k < 3; ++k) {
    const Matrix c = oracle::naive_second_moment(in.generators[k]);
    for (std::size_t i = 0; i < c.data().size(); ++i) ref.data()[i] += alpha[k] * c.data()[i];
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(m(i, j) - ref(i, j)) <= 1e-12);

  CHECK_THROWS_AS(mixture_cov_diff(one, EnsembleInputs{{x1, x2}, xr}), DataError);
  CHECK_THROWS_AS(mixture_cov_diff(one, EnsembleInputs{{Matrix{{0.1}}}, xr}), DataError);
  CHECK_THROWS_AS(mixture_cov_diff(one, EnsembleInputs{{}, xr}), DataError);
}

TEST_CASE("ensemble_objective") {
  const std::vector<double> one{1.0};
  const Matrix x = scaled_column({0.5, -0.5});
  CHECK(ensemble_objective(one, EnsembleInputs{{x}, x}).F == 0.0);

  // Second moments 4, 0.25 and 1.
  const EnsembleInputs in{{scaled_column({2, -2}), scaled_column({0.5, -0.5})},
                          scaled_column({1, -1})};
  const std::vector<double> alpha{0.2, 0.8};
  CHECK(std::abs(ensemble_objective(alpha, in).F) <= 1e-15);
  const std::vector<double> half{0.5, 0.5};
  CHECK(ensemble_objective(half, in).F == doctest::Approx(1.125));
}

TEST_CASE("objective is midpoint convex") {
  RngStream rng(42);
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const std::size_t p = 2 + rng.index(3);
    const EnsembleProblem prob(random_inputs(p, 1 + rng.index(5), rng));
    for (int s = 0; s < 100; ++s) {
      std::vector<double> a(p), b(p), m(p);
      for (std::size_t k = 0; k < p; ++k) {
        a[k] = rng.uniform();
        b[k] = rng.uniform();
      }
      a = simplex_project(a);
      b = simplex_project(b);
      for (std::size_t k = 0; k < p; ++k) m[k] = 0.5 * (a[k] + b[k]);
      const double viol =
          prob.objective(m).F - 0.5 * (prob.objective(a).F + prob.objective(b).F);
      worst = std::max(worst, viol);
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("simplex_project") {
  const std::vector<double> on{0.2, 0.3, 0.5};
  const auto same = simplex_project(on);
  for (std::size_t k = 0; k < 3; ++k) CHECK(same[k] == doctest::Approx(on[k]).epsilon(1e-15));
  CHECK(simplex_project(std::vector<double>{2.0, 0.0}) == std::vector<double>{1.0, 0.0});
  CHECK(simplex_project(std::vector<double>{-3.0}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(simplex_project(std::vector<double>{}), DataError);

  RngStream rng(43);
  for (int t = 0; t < 500; ++t) {
    const std::size_t p = 1 + rng.index(8);
    std::vector<double> v(p);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    const auto out = simplex_project(v);
    CHECK(std::accumulate(out.begin(), out.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // KKT: a common threshold tau with out_k = max(v_k - tau, 0).
    double tau = 0.0;
    int active = 0;
    for (std::size_t k = 0; k < p; ++k) {
      CHECK(out[k] >= 0.0);
      if (out[k] > 0.0) {
        tau += v[k] - out[k];
        ++active;
      }
    }
    REQUIRE(active > 0);
    tau /= active;
    for (std::size_t k = 0; k < p; ++k) CHECK(std::abs(out[k] - std::max(v[k] - tau, 0.0)) <= 1e-12);
  }
}

TEST_CASE("edgan_optimize basic behaviour") {
  RngStream rng(44);
  const Matrix xr = oracle::random_ball_samples(20, 2, rng);
  const MixtureWeights single = edgan_optimize(EnsembleInputs{{xr}, xr});
  CHECK(single.alpha == std::vector<double>{1.0});
  CHECK(single.objective_trace.size() == 1);

  // One generator from the real distribution, one grossly mismatched.
  RngStream big(45);
  Matrix real = oracle::random_ball_samples(4000, 2, big);
  Matrix good = oracle::random_ball_samples(4000, 2, big);
  Matrix bad = oracle::random_ball_samples(4000, 2, big);
  for (std::size_t i = 0; i < bad.rows(); ++i) {
    bad(i, 0) = 0.95;
    bad(i, 1) *= 0.1;
  }
  const EnsembleInputs in{{good, bad}, real};
  const MixtureWeights w = edgan_optimize(in);
  CHECK(w.alpha[0] >= 0.95);
  CHECK(grid_minimize(EnsembleProblem(in), 0.01).alpha[0] >= 0.95);

  // Best-so-far objective never increases and the returned alpha attains it.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [t, f] : w.objective_trace) best = std::min(best, f);
  CHECK(EnsembleProblem(in).objective(w.alpha).F == doctest::Approx(best).epsilon(1e-12));
  CHECK(w.objective_trace.front().first == 0);
  CHECK(w.objective_trace.size() == 2001);

  EdganOptions bad_opts;
  bad_opts.iters = 0;
  CHECK_THROWS_AS(edgan_optimize(in, bad_opts), DataError);
}

TEST_CASE("edgan_optimize matches the grid oracle") {
  RngStream rng(46);
  for (int t = 0; t < 20; ++t) {
    const std::size_t p = 2 + rng.index(2);
    const EnsembleInputs in = random_inputs(p, 1 + rng.index(4), rng);
    const EnsembleProblem prob(in);
    const MixtureWeights w = edgan_optimize(prob);
    const GridMinimum g = grid_minimize(prob, 0.01);
    CHECK(prob.objective(w.alpha).F <= g.F + 1e-3);
    CHECK(std::accumulate(w.alpha.begin(), w.alpha.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    for (double a : w.alpha) CHECK(a >= 0.0);
  }
}

TEST_CASE("grid_minimize") {
  RngStream rng(47);
  const EnsembleInputs in = random_inputs(3, 2, rng);
  const EnsembleProblem prob(in);
  const GridMinimum g = grid_minimize(prob, 0.05);
  for (const auto& a : oracle::simplex_lattice(3, 20)) CHECK(g.F <= prob.objective(a).F);
  CHECK_THROWS_AS(grid_minimize(prob, 0.0), DataError);
  CHECK_THROWS_AS(grid_minimize(prob, 1.5), DataError);
}

TEST_CASE("edgan_optimize is permutation equivariant") {
  RngStream rng(48);
  for (int t = 0; t < 5; ++t) {
    const EnsembleInputs in = random_inputs(3, 3, rng);
    const EnsembleInputs perm{{in.generators[2], in.generators[0], in.generators[1]}, in.real};
    const MixtureWeights a = edgan_optimize(in);
    const MixtureWeights b = edgan_optimize(perm);
    CHECK(std::abs(b.alpha[0] - a.alpha[2]) <= 1e-9);
    CHECK(std::abs(b.alpha[1] - a.alpha[0]) <= 1e-9);
    CHECK(std::abs(b.alpha[2] - a.alpha[1]) <= 1e-9);
  }
}

TEST_CASE("reported discrepancy matches the resampled mixture") {
  const RingSpec spec;
  const double bound = spec.unit_bound();
  EnsembleInputs in;
  const std::vector<std::vector<std::size_t>> modes{{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 4}};
  for (std::size_t k = 0; k < modes.size(); ++k) {
    in.generators.push_back(
        rescaled(mode_limited_sampler(spec, modes[k], RngStream(100 + k)), bound)(3000));
  }
  in.real = rescaled(ring_sampler(spec, RngStream(99)), bound)(3000);
  const EnsembleProblem prob(in);
  const MixtureWeights w = edgan_optimize(prob);
  const double disc = 2.0 * prob.objective(w.alpha).F;
  const std::size_t n = 20000;
  RngStream rng(5);
  const double mc = empirical_discrepancy(in.real, resample_mixture(in, w.alpha, n, rng)).value;
  CHECK(std::abs(mc - disc) <= 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("theorem4_probe") {
  const RingSpec spec;
  const double bound = spec.unit_bound();
  Theorem4Options opts;
  opts.seeds = 3;
  opts.eval_size = 2000;
  opts.edgan.iters = 300;

  SUBCASE("p = 1 gives zero gaps") {
    const auto pts = theorem4_probe({rescaled(mode_limited_sampler(spec, {0, 1}, RngStream(1)), bound)},
                                    rescaled(ring_sampler(spec, RngStream(2)), bound), {16, 64}, opts);
    REQUIRE(pts.size() == 2);
    for (const auto& p : pts) CHECK(p.median_gap == 0.0);
  }
  SUBCASE("more than 3 generators rejected") {
    std::vector<Sampler> gens;
    for (int k = 0; k < 4; ++k) gens.push_back(rescaled(ring_sampler(spec, RngStream(k)), bound));
    CHECK_THROWS_AS(theorem4_probe(gens, rescaled(ring_sampler(spec, RngStream(9)), bound), {16}, opts),
                    DataError);
  }
}

TEST_CASE("solver on the evaluation set itself is within tolerance of the grid") {
  // With identical train and eval data the gap F(alpha_hat) - F(alpha_grid)
  // can only be negative by as much as the lattice misses the true optimum.
  RngStream rng(49);
  const EnsembleInputs in = random_inputs(3, 2, rng);
  const EnsembleProblem prob(in);
  const double gap = prob.objective(edgan_optimize(prob).alpha).F - grid_minimize(prob, 0.01).F;
  CHECK(gap <= 1e-3);
  CHECK(gap >= -1e-2);
}

TEST_CASE("mixture_weights_json") {
  MixtureWeights w;
  w.alpha = {0.25, 0.75};
  CHECK(mixture_weights_json(w, 0.5, 10) ==
        R"({"alpha":[0.25,0.75],"objective":0.5,"disc":1.0,"iters":10})");
}
