#include <doctest.h>

#include <cmath>
#include <limits>

#include "mixtrans/prob_core.hpp"
#include "oracles.hpp"

using namespace mixtrans;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> as_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

void check_vec(const std::vector<double>& got, const std::vector<double>& want, double tol = 1e-12) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

}  // namespace

TEST_CASE("ProbVec validates the simplex") {
  CHECK_NOTHROW(ProbVec({0.25, 0.75}));
  CHECK_THROWS_AS(ProbVec({0.5, 0.6}), std::domain_error);
  CHECK_THROWS_AS(ProbVec({-0.1, 1.1}), std::domain_error);
  CHECK_THROWS_AS(ProbVec::normalized({0.0, 0.0}), std::domain_error);
  check_vec(ProbVec::normalized({1, 3}).vec(), {0.25, 0.75});
  check_vec(ProbVec::point_mass(3, 2).vec(), {0, 0, 1});
  check_vec(ProbVec::uniform(4).vec(), {0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("stick_break worked examples") {
  check_vec(stick_break(StickFractions({1.0, 0.3})).vec(), {1, 0, 0});
  check_vec(stick_break(StickFractions({0.5, 0.5})).vec(), {0.5, 0.25, 0.25});
  check_vec(stick_break(StickFractions({0.2, 0.5})).vec(), {0.2, 0.4, 0.4});
  CHECK_THROWS_AS(StickFractions({0.2, 1.5}), std::domain_error);
  CHECK_THROWS_AS(StickFractions({-0.01}), std::domain_error);
}

TEST_CASE("stick_unbreak worked examples") {
  check_vec(as_vec(stick_unbreak(ProbVec({0.5, 0.25, 0.25})).values()), {0.5, 0.5});
  check_vec(as_vec(stick_unbreak(ProbVec({1, 0, 0})).values()), {1.0, 0.0});
  check_vec(as_vec(stick_unbreak(ProbVec({0.2, 0.4, 0.4})).values()), {0.2, 0.5});
}

TEST_CASE("stick round trips") {
  RngStream rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t J = 2 + rng.index(7);
    std::vector<double> x(J - 1);
    for (auto& v : x) v = rng.uniform();
    const auto theta = stick_break(StickFractions(x));
    CHECK(is_simplex(theta.values()));
    check_vec(as_vec(stick_unbreak(theta).values()), x, 1e-12);

    std::vector<double> w(J);
    for (auto& v : w) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
    w[rng.index(J)] = 1.0;
    const auto p = ProbVec::normalized(w);
    check_vec(stick_break(stick_unbreak(p)).vec(), p.vec(), 1e-12);
  }
}

TEST_CASE("log_sum_exp") {
  const double l2 = std::log(2.0);
  CHECK(log_sum_exp(std::vector<double>{0, 0}) == doctest::Approx(l2).epsilon(1e-14));
  CHECK(log_sum_exp(std::vector<double>{-1000, -1000}) == doctest::Approx(-1000 + l2).epsilon(1e-14));
  CHECK(log_sum_exp(std::vector<double>{5}) == 5.0);
  CHECK(log_sum_exp(std::vector<double>{800, 0}) == doctest::Approx(800.0));
  CHECK(log_sum_exp(std::vector<double>{-kInf, 3}) == 3.0);
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), std::domain_error);
}

TEST_CASE("sample_categorical") {
  RngStream rng(3);
  const std::vector<double> one{0, -kInf};
  for (int i = 0; i < 1000; ++i) CHECK(sample_categorical(one, rng) == 0);

  const std::size_t n = 100000;
  const std::vector<double> half{std::log(0.5), std::log(0.5)};
  const std::vector<double> shifted{std::log(0.5) + 7, std::log(0.5) + 7};
  RngStream a(99);
  RngStream b(99);
  std::size_t hits = 0;
  bool same = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = sample_categorical(half, a);
    same = same && x == sample_categorical(shifted, b);
    hits += x == 0 ? 1 : 0;
  }
  CHECK(same);
  const double se = std::sqrt(0.25 / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(hits) / static_cast<double>(n) - 0.5) < 3 * se);

  CHECK_THROWS_AS(sample_categorical(std::vector<double>{-kInf, -kInf}, rng), std::domain_error);
  CHECK_THROWS_AS(sample_categorical(std::vector<double>{}, rng), std::domain_error);
}

TEST_CASE("RngStream reproducibility and independence of streams") {
  RngStream a(42, 0);
  RngStream b(42, 0);
  RngStream c(42, 1);
  bool same = true;
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    same = same && x == b.uniform();
    differ = differ || x != c.uniform();
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("variate moments") {
  RngStream rng(5);
  const std::size_t n = 100000;
  for (double shape : {0.05, 0.5, 1.0, 3.7}) {
    std::vector<double> g(n);
    for (auto& v : g) v = rng.gamma(shape);
    const auto e = oracle::iid_mean(g);
    CHECK(std::abs(e.mean - shape) < 4 * e.se);
  }
  std::vector<double> b(n);
  for (auto& v : b) v = rng.beta(2.0, 5.0);
  const auto eb = oracle::iid_mean(b);
  CHECK(std::abs(eb.mean - 2.0 / 7.0) < 4 * eb.se);

  // log-gamma stays finite where the gamma variate underflows
  for (int i = 0; i < 100; ++i) CHECK(std::isfinite(rng.log_gamma(1e-4)));

  const std::vector<double> alpha{0.5, 1.0, 2.5};
  std::vector<std::vector<double>> comp(3, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = sample_dirichlet(alpha, rng);
    for (std::size_t j = 0; j < 3; ++j) comp[j][i] = d[j];
  }
  for (std::size_t j = 0; j < 3; ++j) {
    const auto e = oracle::iid_mean(comp[j]);
    CHECK(std::abs(e.mean - alpha[j] / 4.0) < 4 * e.se);
  }
}

TEST_CASE("type-7 quantile") {
  const std::vector<double> x{4, 1, 3, 2};
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 4.0);
  CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(x, 0.25) == doctest::Approx(1.75));
  CHECK_THROWS_AS(quantile({}, 0.5), std::domain_error);
  CHECK_THROWS_AS(quantile(x, 1.5), std::domain_error);
}
