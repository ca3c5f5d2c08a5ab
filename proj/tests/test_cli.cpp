// Copyright 2026 The discgan Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <vector>

#include <json.hpp>

#include "cli_runner.hpp"
#include "discgan/dgan.hpp"
#include "discgan/discrepancy.hpp"
#include "discgan/datagen.hpp"
#include "discgan/neuralnet.hpp"

using namespace discgan;
using clitest::read_file;
using clitest::run;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<json> read_jsonl(const fs::path& p) {
  std::vector<json> out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) out.push_back(json::parse(line));
  return out;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("disc") {
  const fs::path dir = clitest::scratch("cli_disc");
  save_samples(Matrix{{1}, {-1}}, (dir / "a.csv").string());
  save_samples(Matrix{{2}, {-2}}, (dir / "b.csv").string());

  auto r = run("disc a.csv b.csv", dir);
  CHECK(r.code == 0);
  CHECK(r.out == "{\"disc\":6.0,\"spectral\":3.0,\"converged\":true}\n");

  r = run("disc a.csv a.csv", dir);
  CHECK(json::parse(r.out)["disc"].get<double>() == 0.0);

  RngStream rng(70);
  const Matrix xr = sample_ring(RingSpec{}, 120, rng), xg = sample_ring(RingSpec{4, 0.5, 0.1}, 90, rng);
  save_samples(xr, (dir / "r.csv").string());
  save_samples(xg, (dir / "g.csv").string());
  r = run("disc r.csv g.csv", dir);
  const DiscResult lib = empirical_discrepancy(xr, xg);
  const json j = json::parse(r.out);
  CHECK(j["disc"].get<double>() == lib.value);
  CHECK(j["spectral"].get<double>() == lib.spectral);

  save_samples(Matrix{{1, 2}}, (dir / "c.csv").string());
  r = run("disc a.csv c.csv", dir);
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("dimension") != std::string::npos);
  CHECK(run("disc a.csv missing.csv", dir).code == 2);
  std::ofstream(dir / "bad.csv") << "1\nx\n";
  CHECK(run("disc a.csv bad.csv", dir).code == 2);
}

TEST_CASE("train-dgan") {
  const fs::path dir = clitest::scratch("cli_train");

  SUBCASE("one step with zero learning rate keeps the initialization") {
    auto r = run("train-dgan --out-dir . --steps 1 --eta 0 --seed 3", dir);
    REQUIRE(r.code == 0);
    DganConfig cfg;
    cfg.seed = 3;
    const DganModels init = init_toy_models(cfg);
    CHECK(read_file(dir / "generator.json") == to_checkpoint_json(init.generator));
    CHECK(read_file(dir / "embedding.json") == to_checkpoint_json(init.embedding));
    CHECK(read_jsonl(dir / "trace.jsonl").size() == 1);
    CHECK(load_samples((dir / "samples.csv").string()).rows() == 1000);
  }

  SUBCASE("toy ring run lowers F with a fixed embedding") {
    auto r = run("train-dgan --out-dir . --steps 2000 --critic-steps 0 --seed 1", dir);
    REQUIRE(r.code == 0);
    const auto trace = read_jsonl(dir / "trace.jsonl");
    REQUIRE(trace.size() == 2000);
    CHECK(trace.back()["F"].get<double>() < trace.front()["F"].get<double>());
    const json j = json::parse(r.out);
    CHECK(j["final_F"].get<double>() == trace.back()["F"].get<double>());
  }

  SUBCASE("same seed reproduces every file") {
    const fs::path a = dir / "a", b = dir / "b";
    fs::create_directories(a);
    fs::create_directories(b);
    const auto ra = run("train-dgan --out-dir a --steps 50 --seed 9", dir);
    const auto rb = run("train-dgan --out-dir b --steps 50 --seed 9", dir);
    CHECK(ra.out == rb.out);
    for (const char* f : {"generator.json", "embedding.json", "trace.jsonl", "samples.csv"}) {
      CHECK(read_file(a / f) == read_file(b / f));
      CHECK(!read_file(a / f).empty());
    }
  }

  SUBCASE("missing output directory") {
    const auto r = run("train-dgan --out-dir nowhere --steps 2", dir);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
  }

  SUBCASE("numerical abort keeps the partial trace") {
    const auto r = run("train-dgan --out-dir . --steps 200 --eta 1e152 --critic-steps 0", dir);
    CHECK(r.code == 3);
    const json j = json::parse(r.out);
    CHECK(j["status"] == "numerical_abort");
    const auto trace = read_jsonl(dir / "trace.jsonl");
    CHECK(trace.size() == j["records"].get<std::size_t>());
    CHECK(trace.size() >= 1);
    CHECK(!fs::exists(dir / "generator.json"));
  }

  SUBCASE("invalid knobs are rejected before training") {
    CHECK(run("train-dgan --out-dir . --batch-real 1", dir).code == 2);
    CHECK(run("train-dgan --out-dir . --clip 0", dir).code == 2);
    CHECK(run("train-dgan --out-dir . --optimizer rmsprop", dir).code == 2);
    CHECK(run("train-dgan --out-dir . --ring-sigma -1", dir).code == 2);
    CHECK(!fs::exists(dir / "trace.jsonl"));
  }
}

TEST_CASE("mix-edgan") {
  const fs::path dir = clitest::scratch("cli_mix");
  RngStream rng(71);
  const RingSpec spec;
  const Matrix real = sample_ring(spec, 400, rng);
  Matrix bad = sample_ring(spec, 400, rng);
  for (std::size_t i = 0; i < bad.rows(); ++i) bad(i, 1) *= 0.1;
  save_samples(real, (dir / "real.csv").string());
  save_samples(sample_ring(spec, 400, rng), (dir / "good.csv").string());
  save_samples(bad, (dir / "bad.csv").string());
  save_samples(sample_ring_modes(spec, std::vector<std::size_t>{0, 1, 2}, 400, rng),
               (dir / "arc.csv").string());

  auto r = run("mix-edgan real.csv good.csv", dir);
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["alpha"] == json::array({1.0}));

  r = run("mix-edgan real.csv good.csv bad.csv", dir);
  const json j = json::parse(r.out);
  CHECK(j["alpha"][0].get<double>() >= 0.95);
  CHECK(j["disc"].get<double>() == 2.0 * j["objective"].get<double>());
  CHECK(j["iters"] == 2000);
  CHECK(!j.contains("compare"));

  r = run("mix-edgan real.csv bad.csv arc.csv good.csv --compare", dir);
  const json c = json::parse(r.out);
  REQUIRE(c["compare"].size() == 5);
  double best = 1e300, edgan = 0.0;
  for (const auto& row : c["compare"]) {
    if (row["mixture"] == "edgan") edgan = row["disc"].get<double>();
    else best = std::min(best, row["disc"].get<double>());
  }
  CHECK(edgan <= best + 1e-3);

  save_samples(Matrix{{1, 2, 3}}, (dir / "wide.csv").string());
  CHECK(run("mix-edgan real.csv wide.csv", dir).code == 2);
  CHECK(run("mix-edgan real.csv", dir).code == 2);
}

TEST_CASE("probe") {
  const fs::path dir = clitest::scratch("cli_probe");

  auto r = run("probe decay --out-dir .", dir);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["verdict"] == "pass");
  CHECK(j["slope"].get<double>() >= -0.7);
  CHECK(j["slope"].get<double>() <= -0.3);
  const std::string csv = read_file(dir / "decay.csv");
  CHECK(csv.rfind("x,y\n64,", 0) == 0);

  r = run("probe theorem1 --instances 5", dir);
  j = json::parse(r.out);
  CHECK(j["verdict"] == "pass");
  CHECK(j["min_slack"].get<double>() >= -1e-9);

  r = run("probe continuity", dir);
  j = json::parse(r.out);
  CHECK(j["verdict"] == "pass");
  const auto& pts = j["points"];
  REQUIRE(pts.size() == 4);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i][1].get<double>() < pts[i - 1][1].get<double>());

  r = run("probe theorem4 --ns 64,1024 --seeds 3 --steps 300", dir);
  j = json::parse(r.out);
  CHECK(j["points"].size() == 2);

  CHECK(run("probe bogus", dir).code == 2);
  CHECK(run("probe decay --grid-res 0", dir).code == 2);
  CHECK(run("probe decay --repeats 2", dir).code == 2);
  CHECK(run("probe decay --eps -1", dir).code == 2);
  CHECK(run("probe decay --seed abc", dir).code == 2);
}

TEST_CASE("eval") {
  const fs::path dir = clitest::scratch("cli_eval");
  const RingSpec spec;
  RngStream rng(72);
  save_samples(sample_ring(spec, 300, rng), (dir / "real.csv").string());
  save_samples(sample_ring(spec, 300, rng), (dir / "full.csv").string());
  save_samples(sample_ring_modes(spec, std::vector<std::size_t>{0}, 300, rng),
               (dir / "one.csv").string());

  auto r = run("eval real.csv real.csv", dir);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["L_Sr"].get<double>() == j["L_Stheta"].get<double>());
  CHECK(j["analytic_truth"] == false);

  r = run("eval real.csv full.csv --ring-p 9", dir);
  j = json::parse(r.out);
  CHECK(j["analytic_truth"] == true);
  CHECK(j["bandwidth_real"].is_null());

  const json full = json::parse(run("eval real.csv full.csv", dir).out);
  const json one = json::parse(run("eval real.csv one.csv", dir).out);
  CHECK(full["L_Sr"].get<double>() > one["L_Sr"].get<double>());

  std::ofstream(dir / "broken.csv") << "1,2\n3\n";
  CHECK(run("eval real.csv broken.csv", dir).code == 2);
  CHECK(run("eval real.csv full.csv", dir).out == run("eval real.csv full.csv", dir).out);
}

TEST_CASE("config file") {
  const fs::path dir = clitest::scratch("cli_config");
  RngStream rng(73);
  save_samples(sample_ring(RingSpec{}, 200, rng), (dir / "real.csv").string());
  save_samples(sample_ring(RingSpec{}, 200, rng), (dir / "g1.csv").string());
  save_samples(sample_ring(RingSpec{3, 1.0, 0.05}, 200, rng), (dir / "g2.csv").string());
  std::ofstream(dir / "run.cfg") << "# mixture settings\nsteps = 40\ncompare=true\n";

  auto r = run("mix-edgan real.csv g1.csv g2.csv --config run.cfg", dir);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["iters"] == 40);
  CHECK(j.contains("compare"));

  r = run("mix-edgan real.csv g1.csv g2.csv --config run.cfg --steps 7", dir);
  CHECK(json::parse(r.out)["iters"] == 7);

  std::ofstream(dir / "bad.cfg") << "nonsense=1\n";
  CHECK(run("mix-edgan real.csv g1.csv --config bad.cfg", dir).code == 2);
  std::ofstream(dir / "noeq.cfg") << "steps 40\n";
  CHECK(run("mix-edgan real.csv g1.csv --config noeq.cfg", dir).code == 2);
  CHECK(run("mix-edgan real.csv g1.csv --config absent.cfg", dir).code == 2);
}
