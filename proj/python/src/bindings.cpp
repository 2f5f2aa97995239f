#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mixtrans/discretize.hpp"
#include "mixtrans/mmtd_model.hpp"
#include "mixtrans/postprocess.hpp"
#include "mixtrans/simulate.hpp"

namespace py = pybind11;
using namespace mixtrans;

namespace {

std::vector<int> zero_based(const std::vector<int>& labels) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] - 1;
  return out;
}

std::vector<std::vector<double>> tensor_rows(const TransitionTensor& q) { return matricize(q); }

py::dict summary_row(const IntervalSummary& s) {
  py::dict d;
  d["name"] = s.name;
  d["mean"] = s.mean;
  d["median"] = s.median;
  d["lo95"] = s.lo95;
  d["hi95"] = s.hi95;
  return d;
}

// Posterior draws plus the handful of queries a Python caller needs.
class Fit {
 public:
  explicit Fit(PosteriorSamples s) : s_(std::move(s)), layout_(s_.spec) {}

  std::size_t draws() const { return s_.draws.size(); }
  std::size_t chains() const { return s_.chains(); }
  std::vector<std::string> weight_names() const { return layout_.weight_names(); }
  std::vector<std::vector<double>> weights() const {
    std::vector<std::vector<double>> out;
    for (const auto& d : s_.draws) out.push_back(PosteriorSamples::flat_weights(d));
    return out;
  }
  std::vector<double> log_marginal() const {
    std::vector<double> out;
    for (const auto& d : s_.draws) out.push_back(d.log_marginal);
    return out;
  }
  py::list summarize() const {
    py::list out;
    for (const auto& s : mixtrans::summarize(s_)) out.append(summary_row(s));
    return out;
  }
  py::list inclusion() const {
    py::list out;
    for (const auto& s : lag_inclusion(s_).summary) out.append(summary_row(s));
    return out;
  }
  std::vector<double> predict(const std::vector<int>& history) const {
    const auto lagged = zero_based(history);
    return predict_transition(s_, lagged).mean.vec();
  }
  std::vector<std::vector<double>> predict_sequence(const std::vector<int>& states, std::size_t first) const {
    const auto seq = StateSequence::from_one_based(states, s_.spec.K);
    std::vector<std::vector<double>> out;
    for (const auto& p : mixtrans::predict_sequence(s_, seq, first)) out.push_back(p.vec());
    return out;
  }
  py::list diagnostics() const {
    py::list out;
    for (const auto& d : s_.diagnostics) {
      py::dict row;
      row["name"] = d.name;
      row["rhat"] = d.rhat;
      row["ess"] = d.ess;
      out.append(row);
    }
    return out;
  }
  std::vector<std::string> warnings() const { return s_.warnings; }

 private:
  PosteriorSamples s_;
  MixtureLayout layout_;
};

Fit fit(const std::vector<int>& states, int K, const std::string& profile, int L, int R, std::size_t burn_in,
        std::size_t keep, std::size_t thin, std::size_t chains, std::uint64_t seed, bool collapsed) {
  const auto seq = StateSequence::from_one_based(states, K);
  const auto spec = make_profile(profile, K, L, R, seq.size());
  McmcConfig cfg;
  cfg.burn_in = burn_in;
  cfg.keep = keep;
  cfg.thin = thin;
  cfg.chains = chains;
  cfg.seed = seed;
  cfg.collapsed = collapsed;
  py::gil_scoped_release release;
  return Fit(run_mcmc(spec, seq, cfg));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian MTD, MTDg and MMTD models for high-order Markov chains";

  py::register_exception<CapacityError>(m, "CapacityError");

  m.def(
      "param_count",
      [](int K, int L, int R) {
        const auto c = param_count(K, L, R);
        py::dict d;
        d["Lambda"] = c.n_Lambda;
        d["lambda"] = c.n_lambda;
        d["Q"] = c.n_Q;
        d["total"] = c.total;
        d["unrestricted"] = c.unrestricted;
        return d;
      },
      py::arg("K"), py::arg("L"), py::arg("R"), "Free parameter counts of an MMTD(L, R) model with K states.");

  m.def(
      "discretize",
      [](const std::vector<double>& values, int K) {
        const auto d = discretize_quantiles(values, K);
        return py::make_tuple(d.states.one_based(), d.edges, d.degenerate);
      },
      py::arg("values"), py::arg("K"), "Quantile-bin a series; returns (1-based states, edges, degenerate).");

  m.def(
      "simulate",
      [](int K, std::vector<int> active_lags, std::size_t train, std::size_t validation, std::uint64_t seed,
         int context) {
        ScenarioSpec sc;
        sc.K = K;
        sc.active_lags = std::move(active_lags);
        sc.train = train;
        sc.validation = validation;
        sc.seed = seed;
        sc.context = context;
        RngStream rng(seed, 0);
        const auto truth = random_truth(sc, rng);
        const auto data = simulate_chain(truth, sc, rng);
        std::vector<std::vector<double>> truth_points;
        for (const auto& p : true_transitions(truth, data)) truth_points.push_back(p.vec());
        py::dict d;
        d["train"] = data.train.one_based();
        d["validation"] = data.validation.one_based();
        d["context"] = data.context;
        d["truth"] = tensor_rows(truth.q);
        d["truth_points"] = truth_points;
        return d;
      },
      py::arg("K"), py::arg("active_lags"), py::arg("train") = 500, py::arg("validation") = 1000,
      py::arg("seed") = 1, py::arg("context") = 0, "Simulate a chain from a random truth over the active lags.");

  m.def(
      "l1_loss",
      [](const std::vector<std::vector<double>>& est, const std::vector<std::vector<double>>& truth) {
        std::vector<ProbVec> a;
        std::vector<ProbVec> b;
        for (const auto& v : est) a.emplace_back(v);
        for (const auto& v : truth) b.emplace_back(v);
        return l1_loss(a, b);
      },
      py::arg("estimates"), py::arg("truth"), "100 times the mean per-state L1 distance.");

  m.def(
      "mtdg_reduce",
      [](const std::vector<double>& lambda, const std::vector<double>& q0,
         const std::vector<std::vector<std::vector<double>>>& q) {
        std::vector<TransitionTensor> mats;
        for (const auto& rows : q) mats.push_back(tensorize(rows, 1));
        const auto r = mtdg_reduce(MtdgParams{ProbVec(lambda), ProbVec(q0), std::move(mats)});
        py::dict d;
        d["lambda"] = r.params.lambda.vec();
        d["q0"] = r.params.q0.vec();
        std::vector<std::vector<std::vector<double>>> out;
        for (const auto& t : r.params.q) out.push_back(tensor_rows(t));
        d["q"] = out;
        d["active"] = r.active;
        return d;
      },
      py::arg("lambda"), py::arg("q0"), py::arg("q"),
      "Move the largest possible mass from the lag matrices to the intercept. Matrices are K x K, row = outcome.");

  m.def(
      "dirichlet_marginal_loglik",
      [](std::vector<double> alpha, const CountVector& n) {
        return dirichlet_marginal_loglik(DirichletSpec{std::move(alpha)}, n);
      },
      py::arg("alpha"), py::arg("counts"));
  m.def(
      "sdm_marginal_loglik",
      [](std::vector<double> alpha, double beta, const CountVector& n) {
        return sdm_marginal_loglik(SdmSpec{std::move(alpha), beta}, n);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("counts"));

  py::class_<Fit>(m, "Fit")
      .def_property_readonly("draws", &Fit::draws)
      .def_property_readonly("chains", &Fit::chains)
      .def_property_readonly("weight_names", &Fit::weight_names)
      .def("weights", &Fit::weights, "Flattened weights, one row per draw.")
      .def("log_marginal", &Fit::log_marginal)
      .def("summarize", &Fit::summarize)
      .def("inclusion", &Fit::inclusion, "Lag inclusion index summaries for lags 0..L.")
      .def("predict", &Fit::predict, py::arg("history"),
           "Posterior mean transition given 1-based states, most recent first.")
      .def("predict_sequence", &Fit::predict_sequence, py::arg("states"), py::arg("first"))
      .def("diagnostics", &Fit::diagnostics)
      .def_property_readonly("warnings", &Fit::warnings);

  m.def("fit", &fit, py::arg("states"), py::arg("K"), py::arg("profile") = "mmtd-sdm", py::arg("L") = 1,
        py::arg("R") = 1, py::arg("burn_in") = 20000, py::arg("keep") = 20000, py::arg("thin") = 20,
        py::arg("chains") = 4, py::arg("seed") = 1, py::arg("collapsed") = true,
        "Run MCMC for a profile on a 1-based state sequence.");
  m.def("profiles", &profile_names);
}
