#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>

#include "fixtures.hpp"
#include "mixtrans/discretize.hpp"
#include "mixtrans/io.hpp"

using namespace mixtrans;
using namespace mixtrans::io;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mixtrans_test_io" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string error_of(auto&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("format_double round trips") {
  RngStream rng(1);
  std::vector<double> xs{0.0, 1.0, -2.5, 0.1, 1e-300, 1.7976931348623157e308, 5e-324, 1.0 / 3.0};
  for (int i = 0; i < 1000; ++i) xs.push_back(std::exp(rng.normal() * 20.0) * (rng.uniform() < 0.5 ? -1 : 1));
  for (double x : xs) CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("git blob hashes") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  const auto dir = scratch("hash");
  write_file_atomic(dir / "h.txt", "hello\n");
  CHECK(file_blob_sha1(dir / "h.txt") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(read_file(dir / "h.txt") == "hello\n");
}

TEST_CASE("csv readers") {
  const auto dir = scratch("csv");
  put(dir / "v.csv", "value\n1.5\n-2\n3e2\n");
  CHECK(read_values_csv(dir / "v.csv") == std::vector<double>{1.5, -2, 300});
  put(dir / "bad.csv", "value\n1\nabc\n2\n\nx\n");
  const auto msg = error_of([&] { read_values_csv(dir / "bad.csv"); });
  CHECK(msg.find("3") != std::string::npos);
  CHECK(msg.find("6") != std::string::npos);
  put(dir / "empty.csv", "value\n");
  CHECK_THROWS_AS(read_values_csv(dir / "empty.csv"), ParseError);
  CHECK_THROWS_AS(read_values_csv(dir / "missing.csv"), ParseError);

  put(dir / "s.csv", "state\n1\n3\n2\n");
  const auto s = read_states_csv(dir / "s.csv");
  CHECK(s.K() == 3);
  CHECK(s[1] == 2);
  CHECK(read_states_csv(dir / "s.csv", 5).K() == 5);
  CHECK_THROWS_AS(read_states_csv(dir / "s.csv", 2), ParseError);
  put(dir / "s0.csv", "1\n0\n2\n");
  CHECK_THROWS_AS(read_states_csv(dir / "s0.csv"), ParseError);

  write_states_csv(dir / "out.csv", s);
  const auto back = read_states_csv(dir / "out.csv", 3);
  CHECK(std::equal(back.states().begin(), back.states().end(), s.states().begin(), s.states().end()));
}

TEST_CASE("quantile discretization") {
  const std::vector<double> x{1, 2, 3, 4};
  const auto d = discretize_quantiles(x, 4);
  CHECK(std::vector<int>(d.states.states().begin(), d.states.states().end()) == std::vector<int>{0, 1, 2, 3});
  CHECK_FALSE(d.degenerate);

  RngStream rng(2);
  std::vector<double> y(500);
  for (auto& v : y) v = std::exp(rng.normal());
  std::vector<double> logy;
  for (double v : y) logy.push_back(std::log(v));
  for (int K : {2, 3, 5}) {
    const auto a = discretize_quantiles(y, K);
    const auto b = discretize_quantiles(logy, K);
    CHECK(std::equal(a.states.states().begin(), a.states.states().end(), b.states.states().begin()));
    CHECK(a.edges.size() == static_cast<std::size_t>(K - 1));
    // roughly equal bins
    for (int k = 0; k < K; ++k) {
      const auto n = std::count(a.states.states().begin(), a.states.states().end(), k);
      CHECK(std::abs(static_cast<double>(n) - 500.0 / K) <= 1.0);
    }
  }
  CHECK(discretize_quantiles(std::vector<double>(20, 7.0), 3).degenerate);
}

TEST_CASE("config keys") {
  CHECK_THROWS_AS(mcmc_config_from_json(json{{"burn", 10}}), ParseError);
  CHECK_THROWS_AS(mcmc_config_from_json(json{{"thin", -1}}), ParseError);
  const auto c = mcmc_config_from_json(json{{"thin", 7}, {"chains", 3}});
  CHECK(c.thin == 7);
  CHECK(c.chains == 3);
  CHECK(mcmc_config_from_json(to_json(c)).seed == c.seed);
  CHECK_THROWS_AS(model_config_from_json(json{{"profile", "mtd-sbm"}, {"lags", 3}}), ParseError);
  const auto m = model_config_from_json(json{{"profile", "mtd-sbm"}, {"L", 4}});
  CHECK(m.L == 4);
  CHECK(model_config_from_json(to_json(m)).profile == "mtd-sbm");
}

TEST_CASE("json round trips") {
  for (const char* p : {"mtd-dir", "mtd-sbm", "mtdg-sbm", "mmtd-dir", "mmtd-sdm"}) {
    const auto spec = make_profile(p, 3, 4, 2, 100);
    const auto j = to_json(spec);
    CHECK(to_json(model_spec_from_json(j)) == j);
    CHECK(to_json(weight_prior_from_json(to_json(spec.top))) == to_json(spec.top));
  }
  CHECK_THROWS_AS(weight_prior_from_json(json{{"type", "beta"}}), ParseError);
  CHECK_THROWS(weight_prior_from_json(json{{"type", "dirichlet"}, {"alpha", {1.0, -1.0}}}));

  RngStream rng(3);
  ScenarioSpec sc;
  sc.active_lags = {2, 4};
  CHECK(to_json(scenario_from_json(to_json(sc))) == to_json(sc));
  const auto truth = random_truth(sc, rng);
  const auto t2 = truth_from_json(to_json(truth));
  CHECK(t2.active_lags == truth.active_lags);
  CHECK(std::equal(t2.q.data().begin(), t2.q.data().end(), truth.q.data().begin()));
  auto jt = to_json(truth);
  jt["active_lags"] = json::array({1});
  CHECK_THROWS_AS(truth_from_json(jt), ParseError);

  const auto mtd = MtdParams{fixtures::random_simplex(3, rng), fixtures::random_tensor(3, 1, rng)};
  CHECK(to_json(mtd_params_from_json(to_json(mtd))) == to_json(mtd));
  const auto g = fixtures::random_mtdg(3, 3, rng);
  CHECK(to_json(mtdg_params_from_json(to_json(g))) == to_json(g));
  const auto m = fixtures::random_mmtd(2, 4, 3, rng);
  const auto jm = to_json(m);
  CHECK(to_json(mmtd_params_from_json(jm)) == jm);
  auto shuffled = jm;
  std::swap(shuffled["configs"][1][0], shuffled["configs"][1][1]);
  CHECK_THROWS_AS(mmtd_params_from_json(shuffled), ParseError);
}

TEST_CASE("sample files") {
  const auto spec = make_profile("mmtd-sdm", 2, 3, 2, 40);
  RngStream hist(4);
  const StateSequence data(fixtures::random_history(2, 40, hist), 2);
  McmcConfig cfg;
  cfg.burn_in = 20;
  cfg.keep = 30;
  cfg.thin = 3;
  cfg.chains = 2;
  cfg.swap_period = 5;
  const auto s = run_mcmc(spec, data, cfg);
  const auto dir = scratch("samples");
  const auto files = write_samples(dir, s);
  CHECK(files.size() == 4);
  const auto r = read_samples(dir, spec, cfg);
  REQUIRE(r.draws.size() == s.draws.size());
  for (std::size_t i = 0; i < s.draws.size(); ++i) {
    const auto& a = s.draws[i];
    const auto& b = r.draws[i];
    CHECK(a.chain == b.chain);
    CHECK(a.iteration == b.iteration);
    CHECK(PosteriorSamples::flat_weights(a) == PosteriorSamples::flat_weights(b));
    CHECK(a.group_counts == b.group_counts);
    CHECK(a.log_marginal == b.log_marginal);
    CHECK(a.swaps_accepted == b.swaps_accepted);
    REQUIRE(a.q.size() == b.q.size());
    for (std::size_t k = 0; k < a.q.size(); ++k)
      CHECK(std::equal(a.q[k].data().begin(), a.q[k].data().end(), b.q[k].data().begin()));
  }
  // writing again gives identical bytes
  const auto first = read_file(files[0]);
  write_samples(dir, r);
  CHECK(read_file(files[0]) == first);

  // a body line with a bad weight is reported with its chain and line
  auto text = read_file(dir / "chain_1.csv");
  const auto pos = text.find('\n', text.find('\n') + 1) + 1;
  const auto comma = text.find(',', pos);
  text.replace(comma + 1, 1, "x");
  put(dir / "chain_1.csv", text);
  const auto msg = error_of([&] { read_samples(dir, spec, cfg); });
  CHECK(msg.find("chain 1") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);

  const auto header_only = read_file(files[0]).substr(0, first.find('\n') + 1);
  const auto empty = scratch("empty");
  put(empty / "chain_0.csv", header_only);
  CHECK_THROWS_AS(read_samples(empty, spec, cfg), ParseError);
  CHECK_THROWS_AS(read_samples(scratch("none"), spec, cfg), ParseError);
  CHECK_THROWS_AS(read_samples(dir, make_profile("mmtd-sdm", 2, 4, 2, 40), cfg), ParseError);
}

TEST_CASE("manifest") {
  const auto dir = scratch("manifest");
  RunManifest m;
  m.command = "fit";
  m.config = json{{"a", 1}};
  m.data_hash = git_blob_sha1("x");
  m.seed = 42;
  m.outputs = {"chain_0.csv"};
  write_manifest(dir / "manifest.json", m);
  const auto j = read_json(dir / "manifest.json");
  CHECK(j.at("command") == "fit");
  CHECK(j.at("seed") == 42);
  CHECK(j.at("data_hash") == m.data_hash);
  put(dir / "broken.json", "{");
  CHECK_THROWS_AS(read_json(dir / "broken.json"), ParseError);
}
