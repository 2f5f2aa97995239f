#include "mixtrans/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mixtrans::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_int(std::string_view s, long long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string list_rows(const std::vector<std::size_t>& rows) {
  std::string out;
  for (std::size_t i = 0; i < rows.size() && i < 20; ++i) {
    if (i) out += ", ";
    out += std::to_string(rows[i]);
  }
  if (rows.size() > 20) out += ", ... (" + std::to_string(rows.size()) + " rows)";
  return out;
}

std::vector<double> to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  return j.get<std::vector<double>>();
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<std::string> chain_header(const MixtureLayout& layout) {
  std::vector<std::string> h{"iteration"};
  for (auto& n : layout.weight_names()) h.push_back(n);
  for (std::size_t g = 0; g < layout.groups(); ++g) h.push_back("n_" + std::to_string(g));
  h.insert(h.end(), {"log_marginal", "swaps_accepted", "swaps_proposed"});
  return h;
}

std::vector<std::string> q_header(const MixtureLayout& layout) {
  std::vector<std::string> h{"iteration"};
  for (std::size_t b = 0; b < layout.blocks(); ++b) {
    for (std::size_t col = 0; col < layout.block_columns(b); ++col) {
      for (int k = 0; k < layout.K(); ++k) {
        h.push_back("q" + std::to_string(b) + "_" + std::to_string(k + 1) + "_" + std::to_string(col));
      }
    }
  }
  return h;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::vector<double> read_values_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  std::vector<double> out;
  std::vector<std::size_t> bad;
  bool header_skipped = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string t = trim(lines[i]);
    if (t.empty() && i + 1 == lines.size()) break;
    double v = 0.0;
    if (parse_double(t, v) && std::isfinite(v)) {
      out.push_back(v);
    } else if (i == 0 && !t.empty() && !header_skipped) {
      header_skipped = true;  // a non-numeric first line is a header
    } else {
      bad.push_back(i + 1);
    }
  }
  if (!bad.empty()) {
    throw ParseError(path.string() + ": missing or non-numeric values at line(s) " + list_rows(bad));
  }
  if (out.empty()) throw ParseError(path.string() + ": no values");
  return out;
}

StateSequence read_states_csv(const fs::path& path, int K) {
  const auto lines = read_lines(path);
  std::vector<int> labels;
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string t = trim(lines[i]);
    if (i == 0 && t == "state") continue;
    if (t.empty() && i + 1 == lines.size()) break;
    long long v = 0;
    if (parse_int(t, v) && v >= 1 && (K == 0 || v <= K)) {
      labels.push_back(static_cast<int>(v));
    } else {
      bad.push_back(i + 1);
    }
  }
  if (!bad.empty()) {
    throw ParseError(path.string() + ": invalid state label(s) at line(s) " + list_rows(bad) +
                     (K > 0 ? " (expected integers 1.." + std::to_string(K) + ")" : " (expected positive integers)"));
  }
  if (labels.empty()) throw ParseError(path.string() + ": no states");
  if (K == 0) K = std::max(2, *std::max_element(labels.begin(), labels.end()));
  return StateSequence::from_one_based(labels, K);
}

void write_states_csv(const fs::path& path, const StateSequence& s) {
  std::string text = "state\n";
  for (int v : s.one_based()) text += std::to_string(v) + "\n";
  write_file_atomic(path, text);
}

std::string git_blob_sha1(const std::string& bytes) {
  const std::string head = "blob " + std::to_string(bytes.size()) + std::string(1, '\0');
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("sha1: context allocation failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, head.data(), head.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("sha1: digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string file_blob_sha1(const fs::path& path) { return git_blob_sha1(read_file(path)); }

void write_file_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ParseError(where + ": unknown key '" + it.key() + "'");
  }
}

json to_json(const WeightPrior& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DirichletSpec>) {
          return {{"type", "dirichlet"}, {"alpha", v.alpha}};
        } else if constexpr (std::is_same_v<T, SdmSpec>) {
          return {{"type", "sdm"}, {"alpha", v.alpha}, {"beta", v.beta}};
        } else if constexpr (std::is_same_v<T, SbmSpec>) {
          return {{"type", "sbm"}, {"pi1", v.pi1}, {"pi3", v.pi3}, {"eta", v.eta},
                  {"gamma", v.gamma}, {"delta", v.delta}};
        } else {
          return {{"type", "fixed"}, {"value", v.value.vec()}};
        }
      },
      p);
}

WeightPrior weight_prior_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "dirichlet") {
    require_keys(j, {"type", "alpha"}, "dirichlet prior");
    DirichletSpec s{to_vector(j.at("alpha"), "alpha")};
    s.validate();
    return s;
  }
  if (type == "sdm") {
    require_keys(j, {"type", "alpha", "beta"}, "sdm prior");
    SdmSpec s{to_vector(j.at("alpha"), "alpha"), j.at("beta").get<double>()};
    s.validate();
    return s;
  }
  if (type == "sbm") {
    require_keys(j, {"type", "pi1", "pi3", "eta", "gamma", "delta"}, "sbm prior");
    SbmSpec s;
    s.pi1 = to_vector(j.at("pi1"), "pi1");
    s.pi3 = to_vector(j.at("pi3"), "pi3");
    s.eta = j.at("eta").get<double>();
    s.gamma = to_vector(j.at("gamma"), "gamma");
    s.delta = to_vector(j.at("delta"), "delta");
    s.validate();
    return s;
  }
  if (type == "fixed") {
    require_keys(j, {"type", "value"}, "fixed weights");
    return FixedWeights{ProbVec(to_vector(j.at("value"), "value"))};
  }
  throw ParseError("unknown weight prior type '" + type + "'");
}

json to_json(const ModelSpec& spec) {
  json within = json::array();
  for (const auto& w : spec.within) within.push_back(to_json(w));
  json q = json::array();
  for (const auto& d : spec.q_prior) q.push_back(d.alpha);
  return {{"kind", to_string(spec.kind)}, {"K", spec.K}, {"L", spec.L}, {"R", spec.R},
          {"profile", spec.profile}, {"delta_scale", spec.delta_scale}, {"top", to_json(spec.top)},
          {"within", within}, {"q_prior", q}};
}

ModelSpec model_spec_from_json(const json& j) {
  require_keys(j, {"kind", "K", "L", "R", "profile", "delta_scale", "top", "within", "q_prior"}, "model spec");
  ModelSpec s;
  s.kind = model_kind_from_string(j.at("kind").get<std::string>());
  s.K = j.at("K").get<int>();
  s.L = j.at("L").get<int>();
  s.R = j.value("R", 1);
  s.profile = j.value("profile", std::string{});
  s.delta_scale = j.value("delta_scale", 1.0);
  s.top = weight_prior_from_json(j.at("top"));
  for (const auto& w : j.value("within", json::array())) s.within.push_back(weight_prior_from_json(w));
  for (const auto& a : j.at("q_prior")) s.q_prior.push_back(DirichletSpec{to_vector(a, "q_prior")});
  s.validate();
  return s;
}

json to_json(const McmcConfig& c) {
  return {{"burn_in", c.burn_in}, {"keep", c.keep}, {"thin", c.thin}, {"swap_period", c.swap_period},
          {"chains", c.chains}, {"seed", c.seed}, {"collapsed", c.collapsed}, {"random_scan", c.random_scan}};
}

McmcConfig mcmc_config_from_json(const json& j, McmcConfig c) {
  require_keys(j, {"burn_in", "keep", "thin", "swap_period", "chains", "seed", "collapsed", "random_scan"},
               "mcmc config");
  auto count = [&](const char* key, std::size_t& out) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<long long>();
    if (v < 0) throw ParseError(std::string("mcmc config: ") + key + " must be nonnegative");
    out = static_cast<std::size_t>(v);
  };
  count("burn_in", c.burn_in);
  count("keep", c.keep);
  count("thin", c.thin);
  count("swap_period", c.swap_period);
  count("chains", c.chains);
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("collapsed")) c.collapsed = j.at("collapsed").get<bool>();
  if (j.contains("random_scan")) c.random_scan = j.at("random_scan").get<bool>();
  c.validate();
  return c;
}

json to_json(const ScenarioSpec& s) {
  return {{"K", s.K}, {"active_lags", s.active_lags}, {"train", s.train}, {"validation", s.validation},
          {"burn_in", s.burn_in}, {"seed", s.seed}, {"context", s.context}};
}

ScenarioSpec scenario_from_json(const json& j) {
  require_keys(j, {"K", "active_lags", "train", "validation", "burn_in", "seed", "context"}, "scenario");
  ScenarioSpec s;
  s.K = j.value("K", s.K);
  if (j.contains("active_lags")) s.active_lags = j.at("active_lags").get<std::vector<int>>();
  s.train = j.value("train", s.train);
  s.validation = j.value("validation", s.validation);
  s.burn_in = j.value("burn_in", s.burn_in);
  s.seed = j.value("seed", s.seed);
  s.context = j.value("context", s.context);
  s.validate();
  return s;
}

json to_json(const TransitionTensor& q) {
  return {{"K", q.K()}, {"order", q.order()},
          {"data", std::vector<double>(q.data().begin(), q.data().end())}};
}

TransitionTensor tensor_from_json(const json& j) {
  require_keys(j, {"K", "order", "data"}, "tensor");
  return TransitionTensor(j.at("K").get<int>(), j.at("order").get<int>(), to_vector(j.at("data"), "data"));
}

json to_json(const MtdParams& p) { return {{"lambda", p.lambda.vec()}, {"Q", to_json(p.q)}}; }

MtdParams mtd_params_from_json(const json& j) {
  require_keys(j, {"lambda", "Q"}, "MTD parameters");
  MtdParams p{ProbVec(to_vector(j.at("lambda"), "lambda")), tensor_from_json(j.at("Q"))};
  p.validate();
  return p;
}

json to_json(const MtdgParams& p) {
  json q = json::array();
  for (const auto& t : p.q) q.push_back(to_json(t));
  return {{"lambda", p.lambda.vec()}, {"Q0", p.q0.vec()}, {"Q", q}};
}

MtdgParams mtdg_params_from_json(const json& j) {
  require_keys(j, {"lambda", "Q0", "Q"}, "MTDg parameters");
  MtdgParams p{ProbVec(to_vector(j.at("lambda"), "lambda")), ProbVec(to_vector(j.at("Q0"), "Q0")), {}};
  for (const auto& t : j.at("Q")) p.q.push_back(tensor_from_json(t));
  p.validate();
  return p;
}

json to_json(const MmtdParams& p) {
  json lambda = json::array();
  json configs = json::array();
  for (int r = 1; r <= p.R(); ++r) {
    lambda.push_back(p.lambda[static_cast<std::size_t>(r) - 1].vec());
    configs.push_back(enumerate_configs(p.L, r));
  }
  json q = json::array();
  for (const auto& t : p.Q) q.push_back(to_json(t));
  // configs lists the lag sets behind each lambda entry, for audit only
  return {{"L", p.L}, {"Lambda", p.Lambda.vec()}, {"lambda", lambda}, {"configs", configs}, {"Q", q}};
}

MmtdParams mmtd_params_from_json(const json& j) {
  require_keys(j, {"L", "Lambda", "lambda", "configs", "Q"}, "MMTD parameters");
  MmtdParams p;
  p.L = j.at("L").get<int>();
  p.Lambda = ProbVec(to_vector(j.at("Lambda"), "Lambda"));
  for (const auto& v : j.at("lambda")) p.lambda.emplace_back(to_vector(v, "lambda"));
  for (const auto& t : j.at("Q")) p.Q.push_back(tensor_from_json(t));
  if (j.contains("configs")) {
    for (int r = 1; r <= p.R(); ++r) {
      const auto& c = j.at("configs");
      if (c.size() != static_cast<std::size_t>(p.R()) ||
          c.at(static_cast<std::size_t>(r) - 1).get<std::vector<LagConfig>>() != enumerate_configs(p.L, r)) {
        throw ParseError("MMTD parameters: configs do not follow lexicographic order");
      }
    }
  }
  p.validate();
  return p;
}

json to_json(const Truth& t) { return {{"active_lags", t.active_lags}, {"q", to_json(t.q)}}; }

Truth truth_from_json(const json& j) {
  require_keys(j, {"active_lags", "q"}, "truth");
  Truth t{j.at("active_lags").get<std::vector<int>>(), tensor_from_json(j.at("q"))};
  if (static_cast<int>(t.active_lags.size()) != t.q.order()) {
    throw ParseError("truth: tensor order differs from the number of active lags");
  }
  return t;
}

json to_json(const ModelConfig& m) {
  return {{"profile", m.profile}, {"K", m.K}, {"L", m.L}, {"R", m.R}, {"delta_scale", m.delta_scale}};
}

ModelConfig model_config_from_json(const json& j) {
  require_keys(j, {"profile", "K", "L", "R", "delta_scale"}, "model config");
  ModelConfig m;
  m.profile = j.value("profile", m.profile);
  m.K = j.value("K", m.K);
  m.L = j.value("L", m.L);
  m.R = j.value("R", m.R);
  m.delta_scale = j.value("delta_scale", m.delta_scale);
  return m;
}

std::vector<fs::path> write_samples(const fs::path& dir, const PosteriorSamples& samples) {
  fs::create_directories(dir);
  const MixtureLayout layout(samples.spec);
  const auto ch = chain_header(layout);
  const auto qh = q_header(layout);
  std::vector<fs::path> written;
  for (std::size_t c = 0; c < samples.chains(); ++c) {
    std::string text = join(ch) + "\n";
    std::string qtext = join(qh) + "\n";
    for (const Draw* d : samples.chain(c)) {
      std::string row = std::to_string(d->iteration);
      for (double w : PosteriorSamples::flat_weights(*d)) row += "," + format_double(w);
      for (auto n : d->group_counts) row += "," + std::to_string(n);
      row += "," + format_double(d->log_marginal) + "," + std::to_string(d->swaps_accepted) + "," +
             std::to_string(d->swaps_proposed);
      text += row + "\n";
      if (!d->q.empty()) {
        std::string qrow = std::to_string(d->iteration);
        for (const auto& q : d->q) {
          for (double v : q.data()) qrow += "," + format_double(v);
        }
        qtext += qrow + "\n";
      }
    }
    const auto p = dir / ("chain_" + std::to_string(c) + ".csv");
    const auto qp = dir / ("q_chain_" + std::to_string(c) + ".csv");
    write_file_atomic(p, text);
    write_file_atomic(qp, qtext);
    written.push_back(p);
    written.push_back(qp);
  }
  return written;
}

PosteriorSamples read_samples(const fs::path& dir, const ModelSpec& spec, const McmcConfig& config) {
  const MixtureLayout layout(spec);
  const auto ch = chain_header(layout);
  const auto qh = q_header(layout);
  const std::size_t n_weights = layout.weight_names().size();
  PosteriorSamples out;
  out.spec = spec;
  out.config = config;
  for (std::size_t c = 0;; ++c) {
    const auto p = dir / ("chain_" + std::to_string(c) + ".csv");
    if (!fs::exists(p)) {
      if (c == 0) throw ParseError(dir.string() + ": no chain_0.csv");
      break;
    }
    const auto where = [&](std::size_t line) {
      return p.filename().string() + " (chain " + std::to_string(c) + ", line " + std::to_string(line) + ")";
    };
    const auto lines = read_lines(p);
    if (lines.empty() || split(lines[0]) != ch) throw ParseError(where(1) + ": header does not match the model");
    const auto qp = dir / ("q_chain_" + std::to_string(c) + ".csv");
    std::vector<std::string> qlines = fs::exists(qp) ? read_lines(qp) : std::vector<std::string>{};
    if (!qlines.empty() && split(qlines[0]) != qh) throw ParseError(qp.filename().string() + ": header does not match the model");
    std::size_t draws = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (trim(lines[i]).empty()) continue;
      const auto f = split(lines[i]);
      if (f.size() != ch.size()) throw ParseError(where(i + 1) + ": expected " + std::to_string(ch.size()) + " fields");
      Draw d;
      d.chain = c;
      long long it = 0;
      if (!parse_int(f[0], it) || it < 0) throw ParseError(where(i + 1) + ": bad iteration");
      d.iteration = static_cast<std::size_t>(it);
      std::vector<double> w(n_weights);
      for (std::size_t k = 0; k < n_weights; ++k) {
        if (!parse_double(f[1 + k], w[k])) throw ParseError(where(i + 1) + ", iteration " + f[0] + ": bad weight");
      }
      try {
        std::size_t pos = layout.groups();
        d.top = ProbVec(std::vector<double>(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(pos)));
        for (std::size_t g = 1; g < layout.groups(); ++g) {
          if (layout.within_index(g) < 0) continue;
          const std::size_t n = layout.group_size(g);
          d.within.emplace_back(std::vector<double>(w.begin() + static_cast<std::ptrdiff_t>(pos),
                                                    w.begin() + static_cast<std::ptrdiff_t>(pos + n)));
          pos += n;
        }
      } catch (const std::exception& e) {
        throw ParseError(where(i + 1) + ", iteration " + f[0] + ": " + e.what());
      }
      std::size_t at = 1 + n_weights;
      for (std::size_t g = 0; g < layout.groups(); ++g) {
        long long n = 0;
        if (!parse_int(f[at++], n)) throw ParseError(where(i + 1) + ": bad allocation count");
        d.group_counts.push_back(n);
      }
      long long acc = 0;
      long long prop = 0;
      if (!parse_double(f[at], d.log_marginal) || !parse_int(f[at + 1], acc) || !parse_int(f[at + 2], prop)) {
        throw ParseError(where(i + 1) + ": bad telemetry fields");
      }
      d.swaps_accepted = static_cast<std::uint64_t>(acc);
      d.swaps_proposed = static_cast<std::uint64_t>(prop);
      const std::size_t qi = draws + 1;
      if (qi < qlines.size() && !trim(qlines[qi]).empty()) {
        const auto qf = split(qlines[qi]);
        if (qf.size() != qh.size() || qf[0] != f[0]) {
          throw ParseError(qp.filename().string() + " (chain " + std::to_string(c) + ", line " +
                           std::to_string(qi + 1) + "): row does not match iteration " + f[0]);
        }
        std::size_t q_at = 1;
        try {
          for (std::size_t b = 0; b < layout.blocks(); ++b) {
            std::vector<double> data(static_cast<std::size_t>(layout.K()) * layout.block_columns(b));
            for (double& v : data) {
              if (!parse_double(qf[q_at++], v)) throw ParseError("bad value");
            }
            d.q.emplace_back(layout.K(), layout.block_order(b), std::move(data));
          }
        } catch (const std::exception& e) {
          throw ParseError(qp.filename().string() + " (chain " + std::to_string(c) + ", line " +
                           std::to_string(qi + 1) + "): " + e.what());
        }
      }
      out.draws.push_back(std::move(d));
      ++draws;
    }
    if (draws == 0) throw ParseError(p.string() + ": sample file has no draws");
  }
  out.diagnose();
  return out;
}

void write_manifest(const fs::path& path, const RunManifest& m) {
  json j = {{"schema_version", kSchemaVersion},
            {"command", m.command},
            {"config", m.config},
            {"data_hash", m.data_hash},
            {"seed", m.seed},
            {"versions", {{"mixtrans", kVersion}}},
            {"created_utc", utc_now()},
            {"outputs", m.outputs}};
  for (auto it = m.extra.begin(); it != m.extra.end(); ++it) j[it.key()] = it.value();
  write_file_atomic(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace mixtrans::io
