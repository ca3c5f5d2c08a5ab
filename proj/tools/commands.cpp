// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "discgan/dgan.hpp"
#include "discgan/discrepancy.hpp"
#include "discgan/edgan.hpp"
#include "discgan/evaluation.hpp"
#include "discgan/format.hpp"
#include "discgan/neuralnet.hpp"

namespace discgan::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

RingSpec RunConfig::ring() const {
  RingSpec spec;
  if (ring_p) spec.components = *ring_p;
  if (ring_r) spec.radius = *ring_r;
  if (ring_sigma) spec.sigma = *ring_sigma;
  return spec;
}

namespace {

// Base generators used by the probes: overlapping arcs of the ring.
const std::vector<std::vector<std::size_t>> kProbeModes{
    {0, 1, 2, 3, 4}, {2, 3, 4, 5, 6}, {4, 5, 6, 7, 8}};

void require_inputs(const RunConfig& cfg, std::size_t lo, std::size_t hi) {
  if (cfg.inputs.size() < lo || cfg.inputs.size() > hi) {
    throw DataError(cfg.command + ": expected " + std::to_string(lo) +
                    (hi == lo ? "" : hi > 1000 ? " or more" : " to " + std::to_string(hi)) +
                    " input files, got " + std::to_string(cfg.inputs.size()));
  }
}

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << text;
}

void require_out_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw DataError(cfg.command + ": --out-dir is required");
  if (!fs::is_directory(cfg.out_dir)) throw DataError("output directory does not exist: " + cfg.out_dir);
}

// x,y rows for external plotting.
void write_plot_csv(const RunConfig& cfg, const std::vector<std::pair<double, double>>& pts) {
  if (cfg.out_dir.empty()) return;
  require_out_dir(cfg);
  std::string text = "x,y\n";
  for (const auto& [x, y] : pts) text += format_double(x) + "," + format_double(y) + "\n";
  write_text(fs::path(cfg.out_dir) / (cfg.probe_kind + ".csv"), text);
}

json points_json(const std::vector<std::pair<double, double>>& pts) {
  json arr = json::array();
  for (const auto& [x, y] : pts) arr.push_back({x, y});
  return arr;
}

DganConfig dgan_config(const RunConfig& cfg, std::size_t data_dim) {
  DganConfig dc;
  dc.batch_real = cfg.batch_real;
  dc.batch_gen = cfg.batch_gen;
  dc.lr = cfg.eta.value_or(1e-3);
  dc.critic_steps = cfg.critic_steps;
  dc.clip = cfg.clip;
  dc.steps = cfg.steps.value_or(1000);
  dc.embed_dim = cfg.embed_dim;
  dc.data_dim = data_dim;
  dc.optimizer = cfg.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
  dc.seed = cfg.seed_or(0);
  return dc;
}

// Draws rows of a fixed sample with replacement.
Sampler resampler(SampleMatrix x, RngStream rng) {
  return [x = std::move(x), rng](std::size_t n) mutable {
    SampleMatrix out(n, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(rng.index(x.rows()));
      std::copy(row.begin(), row.end(), out.row(i).begin());
    }
    return out;
  };
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.command == "train-dgan") {
    dgan_config(cfg, 2).validate();
    if (cfg.optimizer != "adam" && cfg.optimizer != "sgd") throw DataError("optimizer must be adam or sgd");
    if (cfg.samples < 1) throw DataError("--samples must be >= 1");
  }
  if (cfg.command == "mix-edgan") {
    if (cfg.steps && *cfg.steps < 1) throw DataError("--steps must be >= 1");
    if (cfg.eta && !(*cfg.eta >= 0.0)) throw DataError("--eta must be >= 0");
  }
  if (cfg.command == "probe") {
    static const std::vector<std::string> kinds{"decay", "continuity", "theorem1", "theorem4"};
    if (std::find(kinds.begin(), kinds.end(), cfg.probe_kind) == kinds.end()) {
      throw DataError("unknown probe kind: " + cfg.probe_kind);
    }
    if (!(cfg.grid_res > 0.0 && cfg.grid_res <= 1.0)) throw DataError("--grid-res must be in (0, 1]");
    if (cfg.repeats < 5 || cfg.trials < 1 || cfg.instances < 1 || cfg.seeds < 1) {
      throw DataError("probe counts out of range");
    }
    for (double e : cfg.eps) {
      if (!(e >= 0.0)) throw DataError("--eps values must be >= 0");
    }
  }
  if (cfg.command == "eval" && cfg.folds < 2) throw DataError("--folds must be >= 2");
  if (cfg.ring_given()) cfg.ring().validate();
}

int cmd_disc(const RunConfig& cfg, std::ostream& out) {
  require_inputs(cfg, 2, 2);
  const SampleMatrix xr = load_samples(cfg.inputs[0]);
  const SampleMatrix xg = load_samples(cfg.inputs[1], xr.cols());
  DiscOptions opts;
  if (cfg.seed) opts.seed = *cfg.seed;
  const DiscResult r = empirical_discrepancy(xr, xg, opts);
  emit(out, json{{"disc", r.value}, {"spectral", r.spectral}, {"converged", r.converged}});
  return kExitOk;
}

int cmd_train_dgan(const RunConfig& cfg, std::ostream& out) {
  require_inputs(cfg, 0, 0);
  require_out_dir(cfg);
  const RngStream root(cfg.seed_or(0));
  const RingSpec spec = cfg.ring();

  Sampler real;
  double bound = 1.0;
  std::size_t data_dim = 2;
  if (!cfg.real_path.empty()) {
    SampleMatrix x = load_samples(cfg.real_path);
    validate_samples(x, UnitBallCheck::on);
    data_dim = x.cols();
    real = resampler(std::move(x), root.derive(1));
  } else {
    spec.validate();
    bound = spec.unit_bound();
    real = rescaled(ring_sampler(spec, root.derive(1)), bound);
  }
  const DganConfig dc = dgan_config(cfg, data_dim);
  dc.validate();

  const fs::path dir(cfg.out_dir);
  std::ofstream trace(dir / "trace.jsonl", std::ios::binary);
  if (!trace) throw DataError("cannot write " + (dir / "trace.jsonl").string());
  const TraceSink sink = [&trace](const TraceRecord& r) { trace << trace_record_json(r) << '\n'; };

  DganRun run;
  try {
    run = dgan_train(dc, real, gaussian_sampler(dc.noise_dim, root.derive(2)), init_toy_models(dc), sink);
  } catch (const NumericalAbort& e) {
    trace.flush();
    std::cerr << "error: " << e.what() << "; partial trace kept in " << (dir / "trace.jsonl").string()
              << '\n';
    emit(out, json{{"status", "numerical_abort"},
                   {"step", e.step()},
                   {"records", e.partial_trace().records.size()}});
    return kExitNumerical;
  }

  write_text(dir / "generator.json", to_checkpoint_json(run.generator));
  write_text(dir / "embedding.json", to_checkpoint_json(run.embedding));
  SampleMatrix dump = predict(run.generator, gaussian_sampler(dc.noise_dim, root.derive(3))(cfg.samples));
  for (double& v : dump.data()) v *= bound;
  write_text(dir / "samples.csv", samples_to_csv(dump));

  const auto& recs = run.trace.records;
  std::cerr << "trained " << recs.size() << " steps, F " << recs.front().F << " -> " << recs.back().F
            << '\n';
  emit(out, json{{"status", "ok"},
                 {"steps", recs.size()},
                 {"first_F", recs.front().F},
                 {"final_F", recs.back().F},
                 {"files", {"generator.json", "embedding.json", "trace.jsonl", "samples.csv"}}});
  return kExitOk;
}

int cmd_mix_edgan(const RunConfig& cfg, std::ostream& out) {
  require_inputs(cfg, 2, std::numeric_limits<std::size_t>::max());
  EnsembleInputs in;
  in.real = load_samples(cfg.inputs[0]);
  for (std::size_t k = 1; k < cfg.inputs.size(); ++k) {
    in.generators.push_back(load_samples(cfg.inputs[k], in.real.cols()));
  }
  const EnsembleProblem problem(in);
  EdganOptions opts;
  if (cfg.steps) opts.iters = *cfg.steps;
  if (cfg.eta) opts.eta0 = *cfg.eta;
  if (cfg.seed) opts.seed = *cfg.seed;
  const MixtureWeights w = edgan_optimize(problem, opts);
  const double objective = problem.objective(w.alpha).F;

  json j = json::parse(mixture_weights_json(w, objective, opts.iters));
  if (cfg.compare) {
    const std::size_t p = problem.size();
    json rows = json::array();
    for (std::size_t k = 0; k < p; ++k) {
      std::vector<double> corner(p, 0.0);
      corner[k] = 1.0;
      rows.push_back({{"mixture", "G" + std::to_string(k + 1)}, {"disc", 2.0 * problem.objective(corner).F}});
    }
    const std::vector<double> uniform(p, 1.0 / static_cast<double>(p));
    rows.push_back({{"mixture", "uniform"}, {"disc", 2.0 * problem.objective(uniform).F}});
    rows.push_back({{"mixture", "edgan"}, {"disc", 2.0 * objective}});
    for (const auto& r : rows) {
      std::cerr << r["mixture"].get<std::string>() << "\t" << r["disc"].get<double>() << '\n';
    }
    j["compare"] = rows;
  }
  emit(out, j);
  return kExitOk;
}

namespace {

json probe_decay(const RunConfig& cfg, std::vector<std::pair<double, double>>& pts) {
  const RingSpec spec = cfg.ring();
  const double bound = spec.unit_bound();
  const DrawFn draw = [spec, bound](std::size_t n, RngStream& rng) {
    return rescale_to_unit_ball(sample_ring(spec, n, rng), bound);
  };
  std::vector<std::size_t> ns = cfg.ns;
  if (ns.empty()) ns = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
  const DecayResult r = decay_probe(draw, ns, cfg.repeats, cfg.seed_or(0));
  for (const auto& [n, d] : r.points) pts.emplace_back(static_cast<double>(n), d);
  const bool pass = r.slope >= -0.7 && r.slope <= -0.3;
  return {{"verdict", pass ? "pass" : "fail"}, {"slope", r.slope}};
}

json probe_continuity(const RunConfig& cfg, std::vector<std::pair<double, double>>& pts) {
  DganConfig dc = dgan_config(cfg, 2);
  const DganModels m = init_toy_models(dc);
  const RngStream root(cfg.seed_or(0));
  const RingSpec spec = cfg.ring();
  RngStream data = root.derive(1);
  const SampleMatrix xr = rescale_to_unit_ball(sample_ring(spec, 256, data), spec.unit_bound());
  const SampleMatrix z = gaussian_sampler(dc.noise_dim, root.derive(2))(256);
  std::vector<double> eps = cfg.eps;
  if (eps.empty()) eps = {1e-1, 1e-2, 1e-3, 1e-4};
  pts = continuity_probe(m.generator, m.embedding, xr, z, eps, root.derive(3).next_u64());
  bool strict = true;
  for (std::size_t i = 1; i < pts.size(); ++i) strict = strict && pts[i].second < pts[i - 1].second;
  return {{"verdict", strict ? "pass" : "fail"}};
}

json probe_theorem1(const RunConfig& cfg, std::vector<std::pair<double, double>>& pts) {
  const RingSpec spec = cfg.ring();
  const double bound = spec.unit_bound();
  const RngStream root(cfg.seed_or(0));
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.instances; ++i) {
    RngStream rng = root.derive(static_cast<std::uint64_t>(i));
    const std::vector<std::size_t> modes = kProbeModes[static_cast<std::size_t>(i) % kProbeModes.size()];
    const SampleMatrix xr = rescale_to_unit_ball(sample_ring(spec, 200, rng), bound);
    const SampleMatrix xg = rescale_to_unit_ball(sample_ring_modes(spec, modes, 150, rng), bound);
    const double slack = theorem1_gap(xr, xg, cfg.trials, rng.next_u64());
    worst = std::min(worst, slack);
    pts.emplace_back(static_cast<double>(i), slack);
  }
  return {{"verdict", worst >= -1e-9 ? "pass" : "fail"}, {"min_slack", worst}};
}

json probe_theorem4(const RunConfig& cfg, std::vector<std::pair<double, double>>& pts) {
  const RingSpec spec = cfg.ring();
  const double bound = spec.unit_bound();
  const RngStream root(cfg.seed_or(0));
  std::vector<Sampler> gens;
  for (std::size_t k = 0; k < kProbeModes.size(); ++k) {
    gens.push_back(rescaled(mode_limited_sampler(spec, kProbeModes[k], root.derive(k)), bound));
  }
  Theorem4Options opts;
  opts.grid_resolution = cfg.grid_res;
  opts.seeds = cfg.seeds;
  if (cfg.steps) opts.edgan.iters = *cfg.steps;
  std::vector<std::size_t> ns = cfg.ns;
  if (ns.empty()) ns = {64, 256, 1024};
  const auto res = theorem4_probe(gens, rescaled(ring_sampler(spec, root.derive(100)), bound), ns, opts);
  for (const auto& p : res) pts.emplace_back(static_cast<double>(p.n), p.median_gap);
  const bool pass = res.size() >= 2 && res.back().median_gap < res.front().median_gap;
  return {{"verdict", pass ? "pass" : "fail"}};
}

}  // namespace

int cmd_probe(const RunConfig& cfg, std::ostream& out) {
  require_inputs(cfg, 0, 0);
  std::vector<std::pair<double, double>> pts;
  json j;
  if (cfg.probe_kind == "decay") j = probe_decay(cfg, pts);
  else if (cfg.probe_kind == "continuity") j = probe_continuity(cfg, pts);
  else if (cfg.probe_kind == "theorem1") j = probe_theorem1(cfg, pts);
  else j = probe_theorem4(cfg, pts);
  write_plot_csv(cfg, pts);
  json doc{{"probe", cfg.probe_kind}};
  doc.update(j);
  doc["points"] = points_json(pts);
  emit(out, doc);
  return kExitOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  require_inputs(cfg, 2, 2);
  const SampleMatrix real = load_samples(cfg.inputs[0]);
  const SampleMatrix gen = load_samples(cfg.inputs[1], real.cols());
  std::optional<RingSpec> truth;
  if (cfg.ring_given()) truth = cfg.ring();
  LikelihoodOptions opts;
  opts.folds = cfg.folds;
  opts.seed = cfg.seed_or(0);
  emit(out, json::parse(likelihood_report_json(likelihood_report(real, gen, truth, opts))));
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  if (cfg.command == "disc") return cmd_disc(cfg, out);
  if (cfg.command == "train-dgan") return cmd_train_dgan(cfg, out);
  if (cfg.command == "mix-edgan") return cmd_mix_edgan(cfg, out);
  if (cfg.command == "probe") return cmd_probe(cfg, out);
  if (cfg.command == "eval") return cmd_eval(cfg, out);
  throw DataError("unknown command: " + cfg.command);
}

}  // namespace discgan::cli
