#include "mixtrans/model_spec.hpp"

#include <cmath>
#include <stdexcept>

namespace mixtrans {

namespace {

constexpr double kSparsityEta = 1000.0;

SbmSpec unpenalized_first_break(std::size_t breaks, double pi1, double pi3,
                                const BetaShapes& shapes) {
  SbmSpec s;
  s.eta = kSparsityEta;
  s.pi1.assign(breaks, pi1);
  s.pi3.assign(breaks, pi3);
  s.gamma = shapes.gamma;
  s.delta = shapes.delta;
  if (breaks > 0) {
    s.pi1[0] = 0.0;
    s.pi3[0] = 0.0;
  }
  return s;
}

std::string config_label(const LagConfig& lags) {
  std::string out;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(lags[i]);
  }
  return out;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Mtd:
      return "mtd";
    case ModelKind::Mtdg:
      return "mtdg";
    case ModelKind::Mmtd:
      return "mmtd";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  if (name == "mtd") return ModelKind::Mtd;
  if (name == "mtdg") return ModelKind::Mtdg;
  if (name == "mmtd") return ModelKind::Mmtd;
  throw std::invalid_argument("unknown model kind '" + name + "'");
}

void ModelSpec::validate() const {
  if (K < 2) throw std::domain_error("ModelSpec: K must be at least 2");
  if (L < 1) throw std::domain_error("ModelSpec: L must be at least 1");
  std::size_t groups = 0;
  std::size_t blocks = 0;
  switch (kind) {
    case ModelKind::Mtd:
      groups = static_cast<std::size_t>(L);
      blocks = 1;
      break;
    case ModelKind::Mtdg:
      groups = static_cast<std::size_t>(L) + 1;
      blocks = static_cast<std::size_t>(L) + 1;
      break;
    case ModelKind::Mmtd:
      if (R < 1 || R > L) throw std::domain_error("ModelSpec: need 1 <= R <= L");
      groups = static_cast<std::size_t>(R) + 1;
      blocks = static_cast<std::size_t>(R) + 1;
      if (within.size() != static_cast<std::size_t>(R)) {
        throw std::domain_error("ModelSpec: MMTD needs one lambda prior per order");
      }
      for (int r = 1; r <= R; ++r) {
        if (prior_size(within[r - 1]) != binomial(L, r)) {
          throw std::domain_error("ModelSpec: lambda prior for order " + std::to_string(r) +
                                  " must have C(L, r) entries");
        }
      }
      break;
  }
  if (prior_size(top) != groups) {
    throw std::domain_error("ModelSpec: top-level weight prior has " +
                            std::to_string(prior_size(top)) + " entries, expected " +
                            std::to_string(groups));
  }
  if (q_prior.size() != blocks) {
    throw std::domain_error("ModelSpec: expected " + std::to_string(blocks) +
                            " transition priors");
  }
  for (const auto& q : q_prior) {
    q.validate();
    if (q.size() != static_cast<std::size_t>(K)) {
      throw std::domain_error("ModelSpec: transition prior must have K entries");
    }
  }
  auto check = [](const WeightPrior& p) {
    std::visit(
        [](const auto& v) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(v)>, FixedWeights>) {
            v.validate();
          }
        },
        p);
  };
  check(top);
  for (const auto& w : within) check(w);
}

std::vector<std::string> profile_names() {
  return {"mtd-dir", "mtd-sbm", "mtdg-sbm", "mmtd-dir", "mmtd-sdm"};
}

ModelSpec make_profile(const std::string& profile, int K, int L, int R, std::size_t T,
                       double delta_scale) {
  if (K < 2 || L < 1) throw std::domain_error("make_profile: need K >= 2 and L >= 1");
  ModelSpec spec;
  spec.K = K;
  spec.L = L;
  spec.profile = profile;
  spec.delta_scale = delta_scale;
  const auto unit_q = DirichletSpec::symmetric(static_cast<std::size_t>(K), 1.0 / K);
  const std::vector<double> lag_alpha(static_cast<std::size_t>(L), 1.0 / L);

  if (profile == "mtd-dir" || profile == "mtd-sbm") {
    spec.kind = ModelKind::Mtd;
    spec.R = 1;
    spec.q_prior = {unit_q};
    if (profile == "mtd-dir") {
      spec.top = DirichletSpec{lag_alpha};
    } else {
      SbmSpec s;
      s.eta = kSparsityEta;
      s.pi1.assign(static_cast<std::size_t>(L) - 1, 0.5);
      s.pi3.assign(static_cast<std::size_t>(L) - 1, 0.1);
      auto shapes = sbm_mimic_dirichlet(lag_alpha, delta_scale);
      s.gamma = shapes.gamma;
      s.delta = shapes.delta;
      spec.top = s;
    }
  } else if (profile == "mtdg-sbm") {
    spec.kind = ModelKind::Mtdg;
    spec.R = 1;
    spec.q_prior.assign(static_cast<std::size_t>(L) + 1, unit_q);
    // Break 0 is the intercept (uniform); breaks 1..L-1 mimic Dir(1/L) over lags.
    auto lag_shapes = sbm_mimic_dirichlet(lag_alpha, delta_scale);
    BetaShapes shapes;
    shapes.gamma.push_back(1.0);
    shapes.delta.push_back(1.0);
    shapes.gamma.insert(shapes.gamma.end(), lag_shapes.gamma.begin(), lag_shapes.gamma.end());
    shapes.delta.insert(shapes.delta.end(), lag_shapes.delta.begin(), lag_shapes.delta.end());
    spec.top = unpenalized_first_break(static_cast<std::size_t>(L), 0.5, 0.2, shapes);
  } else if (profile == "mmtd-dir" || profile == "mmtd-sdm") {
    if (R < 1 || R > L) throw std::domain_error("make_profile: need 1 <= R <= L");
    spec.kind = ModelKind::Mmtd;
    spec.R = R;
    spec.q_prior.assign(static_cast<std::size_t>(R) + 1, unit_q);
    const auto breaks = static_cast<std::size_t>(R);
    BetaShapes shapes{std::vector<double>(breaks, 1.0), std::vector<double>(breaks, 1.0)};
    spec.top = unpenalized_first_break(breaks, 0.25, 0.25, shapes);
    const double beta = profile == "mmtd-sdm" ? std::sqrt(static_cast<double>(T)) : 1.0;
    for (int r = 1; r <= R; ++r) {
      const auto n = binomial(L, r);
      std::vector<double> alpha(n, 1.0 / static_cast<double>(n));
      if (profile == "mmtd-dir") {
        spec.within.emplace_back(DirichletSpec{std::move(alpha)});
      } else {
        spec.within.emplace_back(SdmSpec{std::move(alpha), std::max(beta, 1.0)});
      }
    }
  } else {
    throw std::invalid_argument("unknown profile '" + profile + "'");
  }
  spec.validate();
  return spec;
}

MixtureLayout::MixtureLayout(const ModelSpec& spec)
    : K_(spec.K), L_(spec.L), kind_(spec.kind) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::Mtd:
      block_order_ = {1};
      for (int l = 1; l <= L_; ++l) {
        components_.push_back({0, {l}, l - 1, 0});
        group_size_.push_back(1);
        within_index_.push_back(-1);
      }
      break;
    case ModelKind::Mtdg:
      block_order_.push_back(0);
      components_.push_back({0, {}, 0, 0});
      group_size_.push_back(1);
      within_index_.push_back(-1);
      for (int l = 1; l <= L_; ++l) {
        block_order_.push_back(1);
        components_.push_back({l, {l}, l, 0});
        group_size_.push_back(1);
        within_index_.push_back(-1);
      }
      break;
    case ModelKind::Mmtd: {
      const ZetaMap zmap(L_, spec.R);
      for (int r = 0; r <= spec.R; ++r) {
        block_order_.push_back(r);
        group_size_.push_back(zmap.count(r));
        within_index_.push_back(r == 0 ? -1 : r - 1);
      }
      for (std::size_t z = 0; z < zmap.size(); ++z) {
        const auto& e = zmap.decode(z);
        components_.push_back({e.order, e.lags, e.order,
                               static_cast<int>(z - zmap.offset(e.order))});
      }
      break;
    }
  }
  for (int order : block_order_) block_columns_.push_back(checked_power(K_, order));
  std::size_t offset = 0;
  for (auto s : group_size_) {
    group_offset_.push_back(offset);
    offset += s;
  }
}

std::size_t MixtureLayout::column(std::size_t c, std::span<const int> lagged) const {
  std::size_t col = 0;
  std::size_t stride = 1;
  for (int l : components_[c].lags) {
    col += static_cast<std::size_t>(lagged[l - 1]) * stride;
    stride *= static_cast<std::size_t>(K_);
  }
  return col;
}

std::vector<double> MixtureLayout::component_weights(
    const ProbVec& top, const std::vector<ProbVec>& within) const {
  std::vector<double> w(components_.size());
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const auto& comp = components_[c];
    const auto g = static_cast<std::size_t>(comp.group);
    double v = top[g];
    if (within_index_[g] >= 0) {
      v *= within[static_cast<std::size_t>(within_index_[g])][static_cast<std::size_t>(comp.member)];
    }
    w[c] = v;
  }
  return w;
}

ProbVec MixtureLayout::transition(const std::vector<double>& weights,
                                  const std::vector<TransitionTensor>& q,
                                  std::span<const int> lagged) const {
  if (static_cast<int>(lagged.size()) < L_) {
    throw std::domain_error("transition: history shorter than L");
  }
  for (int i = 0; i < L_; ++i) {
    if (lagged[i] < 0 || lagged[i] >= K_) {
      throw std::domain_error("transition: state out of range");
    }
  }
  std::vector<double> p(static_cast<std::size_t>(K_), 0.0);
  for (std::size_t c = 0; c < components_.size(); ++c) {
    if (weights[c] == 0.0) continue;
    const auto col = q[static_cast<std::size_t>(components_[c].block)].column(column(c, lagged));
    for (int k = 0; k < K_; ++k) p[k] += weights[c] * col[k];
  }
  return ProbVec::normalized(std::move(p));
}

std::vector<std::string> MixtureLayout::weight_names() const {
  std::vector<std::string> names;
  switch (kind_) {
    case ModelKind::Mtd:
      for (int l = 1; l <= L_; ++l) names.push_back("lambda_" + std::to_string(l));
      break;
    case ModelKind::Mtdg:
      for (int l = 0; l <= L_; ++l) names.push_back("lambda_" + std::to_string(l));
      break;
    case ModelKind::Mmtd:
      for (std::size_t g = 0; g < group_size_.size(); ++g) {
        names.push_back("Lambda_" + std::to_string(g));
      }
      for (std::size_t g = 1; g < group_size_.size(); ++g) {
        for (std::size_t m = 0; m < group_size_[g]; ++m) {
          names.push_back("lambda" + std::to_string(g) + "_" +
                          config_label(components_[component_of(g, m)].lags));
        }
      }
      break;
  }
  return names;
}

}  // namespace mixtrans
