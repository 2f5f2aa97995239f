// mixtrans: discretize, fit, evaluate, summarize and simulate from the shell.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "mixtrans/discretize.hpp"
#include "mixtrans/io.hpp"
#include "mixtrans/postprocess.hpp"
#include "mixtrans/simulate.hpp"

namespace fs = std::filesystem;
using namespace mixtrans;
using io::json;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> chains;
  bool paper_scale = false;
  std::string profile;
  std::string out = ".";
};

json load_config(const std::string& path, std::initializer_list<const char*> sections) {
  if (path.empty()) return json::object();
  json j = io::read_json(path);
  std::vector<const char*> allowed{"schema_version"};
  allowed.insert(allowed.end(), sections.begin(), sections.end());
  if (!j.is_object()) throw io::ParseError(path + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw io::ParseError(path + ": unknown key '" + it.key() + "'");
  }
  if (!j.contains("schema_version") || j.at("schema_version") != io::kSchemaVersion) {
    throw io::ParseError(path + ": schema_version must be " + std::to_string(io::kSchemaVersion));
  }
  return j;
}

McmcConfig mcmc_from(const json& cfg, const Common& c) {
  McmcConfig base = c.paper_scale ? McmcConfig::paper_scale() : McmcConfig{};
  McmcConfig m = io::mcmc_config_from_json(cfg.value("mcmc", json::object()), base);
  if (c.seed) m.seed = *c.seed;
  if (c.chains) m.chains = *c.chains;
  m.validate();
  return m;
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

int cmd_discretize(const Common& c, const std::string& input, int K) {
  const auto values = io::read_values_csv(input);
  const auto d = discretize_quantiles(values, K);
  if (d.degenerate) {
    std::cerr << "warning: degenerate data, every value fell into one bin\n";
  }
  const fs::path out(c.out);
  io::write_states_csv(out / "states.csv", d.states);
  io::RunManifest m;
  m.command = "discretize";
  m.config = {{"input", input}, {"K", K}};
  m.data_hash = io::file_blob_sha1(input);
  m.extra = {{"edges", d.edges}, {"degenerate", d.degenerate}};
  m.outputs = {"states.csv"};
  io::write_manifest(out / "manifest.json", m);
  std::printf("wrote %zu states to %s\n", d.states.size(), (out / "states.csv").c_str());
  return 0;
}

int cmd_fit(const Common& c, std::string data_path, const std::string& replay, const std::optional<int>& L_flag,
            const std::optional<int>& R_flag) {
  json cfg;
  if (!replay.empty()) {
    const json man = io::read_json(replay);
    cfg = man.at("config");
    if (data_path.empty()) data_path = man.at("inputs").at("data").get<std::string>();
  } else {
    cfg = load_config(c.config, {"model", "mcmc"});
    cfg["schema_version"] = io::kSchemaVersion;
  }
  if (data_path.empty()) throw io::ParseError("fit: --data is required");
  auto model = io::model_config_from_json(cfg.value("model", json::object()));
  if (!c.profile.empty()) model.profile = c.profile;
  if (L_flag) model.L = *L_flag;
  if (R_flag) model.R = *R_flag;
  const McmcConfig mcmc = mcmc_from(cfg, c);

  const auto data = io::read_states_csv(data_path, model.K);
  model.K = data.K();
  if (data.size() <= static_cast<std::size_t>(model.L)) {
    throw std::domain_error("fit: need T > L (T = " + std::to_string(data.size()) + ")");
  }
  const auto spec = make_profile(model.profile, model.K, model.L, model.R, data.size(), model.delta_scale);

  const auto samples = run_mcmc(spec, data, mcmc);
  print_warnings(samples.warnings);
  const fs::path out(c.out);
  io::RunManifest m;
  m.command = "fit";
  m.config = {{"schema_version", io::kSchemaVersion}, {"model", io::to_json(model)}, {"mcmc", io::to_json(mcmc)}};
  m.data_hash = io::file_blob_sha1(data_path);
  m.seed = mcmc.seed;
  m.extra = {{"inputs", {{"data", data_path}}}, {"model_spec", io::to_json(spec)}, {"T", data.size()}};
  for (const auto& p : io::write_samples(out, samples)) m.outputs.push_back(p.filename().string());
  io::write_manifest(out / "manifest.json", m);

  for (const auto& s : summarize(samples)) {
    std::printf("%-16s mean %.4f  95%% [%.4f, %.4f]\n", s.name.c_str(), s.mean, s.lo95, s.hi95);
  }
  const auto& last = samples.draws.back();
  std::printf("prior-proposal acceptance (chain %zu): %llu/%llu\n", last.chain,
              static_cast<unsigned long long>(last.swaps_accepted),
              static_cast<unsigned long long>(last.swaps_proposed));
  return 0;
}

PosteriorSamples load_fit(const fs::path& dir) {
  const json man = io::read_json(dir / "manifest.json");
  if (man.value("command", "") != "fit") throw io::ParseError(dir.string() + ": manifest is not from a fit");
  const auto spec = io::model_spec_from_json(man.at("model_spec"));
  const auto mcmc = io::mcmc_config_from_json(man.at("config").at("mcmc"));
  return io::read_samples(dir, spec, mcmc);
}

int cmd_evaluate(const Common& c, const std::string& samples_dir, const std::string& validation,
                 const std::string& truth_path, std::optional<int> context) {
  const auto samples = load_fit(samples_dir);
  const auto seq = io::read_states_csv(validation, samples.spec.K);
  int first = samples.spec.L;
  if (context) {
    first = *context;
  } else {
    fs::path sidecar = fs::path(validation).replace_extension(".json");
    if (fs::exists(sidecar)) first = io::read_json(sidecar).value("context", first);
  }
  if (first < samples.spec.L) {
    std::cerr << "warning: context " << first << " is shorter than the model's L; scoring starts at state "
              << samples.spec.L + 1 << "\n";
    first = samples.spec.L;
  }
  std::optional<Truth> truth;
  if (!truth_path.empty()) {
    truth = io::truth_from_json(io::read_json(truth_path));
    if (truth->K() != samples.spec.K) throw std::domain_error("evaluate: truth K differs from the model");
    first = std::max(first, truth->max_lag());
  }
  const auto est = predict_sequence(samples, seq, static_cast<std::size_t>(first));
  std::string text = "metric,value\n";
  if (truth) {
    std::vector<ProbVec> tv;
    std::vector<int> lagged(static_cast<std::size_t>(truth->max_lag()));
    for (std::size_t t = static_cast<std::size_t>(first); t < seq.size(); ++t) {
      for (std::size_t l = 0; l < lagged.size(); ++l) lagged[l] = seq[t - 1 - l];
      tv.push_back(truth->transition(lagged));
    }
    const double loss = l1_loss(est, tv);
    text += "l1_loss_x100," + io::format_double(loss) + "\n";
    std::printf("L1 loss (x100): %.4f over %zu points\n", loss, tv.size());
  } else {
    const double score = mean_log_score(est, seq, static_cast<std::size_t>(first));
    text += "mean_log_predictive_score," + io::format_double(score) + "\n";
    std::printf("mean log predictive score (no truth supplied): %.6f over %zu points\n", score, est.size());
  }
  const fs::path out(c.out);
  io::write_file_atomic(out / "evaluate.csv", text);
  io::RunManifest m;
  m.command = "evaluate";
  m.config = {{"samples", samples_dir}, {"validation", validation}, {"truth", truth_path}, {"context", first}};
  m.data_hash = io::file_blob_sha1(validation);
  m.seed = samples.config.seed;
  m.outputs = {"evaluate.csv"};
  io::write_manifest(out / "manifest.json", m);
  return 0;
}

int cmd_summarize(const Common& c, const std::string& samples_dir) {
  const auto samples = load_fit(samples_dir);
  const MixtureLayout layout(samples.spec);
  // Everything is computed before anything is written.
  const auto inc = lag_inclusion(samples);
  const auto weights = summarize(samples);
  std::string inc_csv = "lag,mean,lo95,hi95\n";
  for (std::size_t l = 0; l < inc.summary.size(); ++l) {
    const auto& s = inc.summary[l];
    inc_csv += std::to_string(l) + "," + io::format_double(s.mean) + "," + io::format_double(s.lo95) + "," +
               io::format_double(s.hi95) + "\n";
  }
  std::string w_csv = "name,mean,median,lo95,hi95\n";
  for (const auto& s : weights) {
    w_csv += s.name + "," + io::format_double(s.mean) + "," + io::format_double(s.median) + "," +
             io::format_double(s.lo95) + "," + io::format_double(s.hi95) + "\n";
  }
  std::string r_csv = "block,order,axis,score\n";
  const bool have_q = !samples.draws.front().q.empty();
  for (std::size_t b = 0; have_q && b < layout.blocks(); ++b) {
    if (layout.block_order(b) < 1) continue;
    const auto r = q_redundancy(samples, b);
    for (std::size_t a = 0; a < r.size(); ++a) {
      r_csv += std::to_string(b) + "," + std::to_string(layout.block_order(b)) + "," + std::to_string(a + 1) +
               "," + io::format_double(r[a]) + "\n";
    }
  }
  std::string d_csv = "name,rhat,ess\n";
  for (const auto& d : samples.diagnostics) {
    d_csv += d.name + "," + io::format_double(d.rhat) + "," + io::format_double(d.ess) + "\n";
  }
  const fs::path out(c.out);
  io::write_file_atomic(out / "inclusion.csv", inc_csv);
  io::write_file_atomic(out / "weights.csv", w_csv);
  io::write_file_atomic(out / "redundancy.csv", r_csv);
  io::write_file_atomic(out / "diagnostics.csv", d_csv);
  io::write_file_atomic(out / "notes.txt", std::string(kLagZeroCaveat) + "\n");
  io::RunManifest m;
  m.command = "summarize";
  m.config = {{"samples", samples_dir}};
  m.data_hash = io::file_blob_sha1(fs::path(samples_dir) / "chain_0.csv");
  m.seed = samples.config.seed;
  m.outputs = {"inclusion.csv", "weights.csv", "redundancy.csv", "diagnostics.csv", "notes.txt"};
  io::write_manifest(out / "manifest.json", m);

  std::printf("lag inclusion index (posterior mean, 95%% interval)\n");
  for (std::size_t l = 0; l < inc.summary.size(); ++l) {
    std::printf("  lag %zu  %.4f  [%.4f, %.4f]\n", l, inc.summary[l].mean, inc.summary[l].lo95, inc.summary[l].hi95);
  }
  std::printf("note: %s\n", kLagZeroCaveat);
  print_warnings(samples.warnings);
  return 0;
}

int cmd_simulate(const Common& c) {
  const json cfg = load_config(c.config, {"scenario", "roster", "mcmc"});
  ScenarioSpec sc = io::scenario_from_json(cfg.value("scenario", json::object()));
  if (c.seed) sc.seed = *c.seed;
  std::vector<RosterEntry> roster;
  for (const auto& r : cfg.value("roster", json::array())) {
    io::require_keys(r, {"label", "profile", "L", "R"}, "roster entry");
    roster.push_back({r.value("label", r.at("profile").get<std::string>()), r.at("profile").get<std::string>(),
                      r.value("L", 1), r.value("R", 1)});
  }
  sc.context = study_context(sc, roster);
  const fs::path out(c.out);
  io::RunManifest m;
  m.command = "simulate";
  m.config = cfg;
  m.seed = sc.seed;

  StudyResult res;
  if (roster.empty()) {
    sc.validate();
    RngStream rng(sc.seed, 0);
    res.truth = random_truth(sc, rng);
    res.data = simulate_chain(res.truth, sc, rng);
  } else {
    res = run_study(sc, roster, mcmc_from(cfg, c));
  }
  io::write_states_csv(out / "train.csv", res.data.train);
  io::write_states_csv(out / "validation.csv", res.data.validation);
  io::write_file_atomic(out / "truth.json", io::to_json(res.truth).dump(2) + "\n");
  const json side = {{"K", sc.K}, {"L", res.truth.max_lag()}, {"seed", sc.seed}, {"truth", "truth.json"}};
  io::write_file_atomic(out / "train.json", side.dump(2) + "\n");
  json vside = side;
  vside["context"] = res.data.context;
  io::write_file_atomic(out / "validation.json", vside.dump(2) + "\n");
  m.outputs = {"train.csv", "validation.csv", "truth.json", "train.json", "validation.json"};
  if (!roster.empty()) {
    std::string text = "model,loss,seconds\n";
    for (const auto& r : res.rows) {
      text += "\"" + r.label + "\"," + io::format_double(r.loss) + "," + io::format_double(r.seconds) + "\n";
      std::printf("%-24s %8.3f\n", r.label.c_str(), r.loss);
      print_warnings(r.warnings);
    }
    io::write_file_atomic(out / "losses.csv", text);
    m.outputs.push_back("losses.csv");
  }
  m.data_hash = io::file_blob_sha1(out / "train.csv");
  m.extra = {{"scenario", io::to_json(sc)}};
  io::write_manifest(out / "manifest.json", m);
  std::printf("wrote scenario to %s\n", out.c_str());
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool mcmc) {
  sub->add_option("--config", c.config, "JSON config file");
  sub->add_option("--out", c.out, "output directory");
  if (mcmc) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--chains", c.chains, "number of chains");
    sub->add_flag("--paper-scale", c.paper_scale, "use 200k burn-in, 400k kept, thin 200");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian mixture transition distribution models for high-order Markov chains"};
  app.require_subcommand(1);
  Common c;

  std::string input;
  int K = 4;
  auto* disc = app.add_subcommand("discretize", "bin a numeric series into K quantile states");
  disc->add_option("--input", input, "single-column numeric CSV")->required();
  disc->add_option("-K,--K", K, "number of bins")->check(CLI::Range(2, 1000));
  add_common(disc, c, false);

  std::string data;
  std::string replay;
  std::optional<int> L_flag;
  std::optional<int> R_flag;
  auto* fit = app.add_subcommand("fit", "run MCMC for a model on a state sequence");
  fit->add_option("--data", data, "state CSV (header 'state')");
  fit->add_option("--profile", c.profile, "prior profile: mtd-dir, mtd-sbm, mtdg-sbm, mmtd-dir, mmtd-sdm");
  fit->add_option("--L", L_flag, "lag horizon");
  fit->add_option("--R", R_flag, "highest order (MMTD)");
  fit->add_option("--replay", replay, "manifest of an earlier fit to rerun");
  add_common(fit, c, true);

  std::string samples;
  std::string validation;
  std::string truth;
  std::optional<int> context;
  auto* eval = app.add_subcommand("evaluate", "score predictions on held-out states");
  eval->add_option("--samples", samples, "fit output directory")->required();
  eval->add_option("--validation", validation, "state CSV")->required();
  eval->add_option("--truth", truth, "truth JSON written by simulate");
  eval->add_option("--context", context, "leading states used only as history");
  add_common(eval, c, false);

  auto* summ = app.add_subcommand("summarize", "inclusion, weight, redundancy and convergence tables");
  summ->add_option("--samples", samples, "fit output directory")->required();
  add_common(summ, c, false);

  auto* sim = app.add_subcommand("simulate", "generate a synthetic scenario and optionally run a study");
  add_common(sim, c, true);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*disc) return cmd_discretize(c, input, K);
    if (*fit) return cmd_fit(c, data, replay, L_flag, R_flag);
    if (*eval) return cmd_evaluate(c, samples, validation, truth, context);
    if (*summ) return cmd_summarize(c, samples);
    if (*sim) return cmd_simulate(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
