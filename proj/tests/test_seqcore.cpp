#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "ultrajet/error.hpp"
#include "ultrajet/numeric.hpp"
#include "ultrajet/seqcore.hpp"

using namespace ultrajet;

namespace {

std::vector<double> mu_table(std::size_t K, double (*f)(double)) {
  std::vector<double> mu(K + 1, 1.0);
  for (std::size_t k = 1; k <= K; ++k) mu[k] = f(static_cast<double>(k));
  return mu;
}

WeightSequence squares(std::size_t K = 128) {
  return WeightSequence::from_mu(mu_table(K, [](double k) { return k * k; }), "k^2");
}

// Direct, non-log evaluation of inf_k m_k t^k for m_k = k! on a short range.
std::pair<double, std::size_t> brute_h_factorial(double t, std::size_t kmax) {
  double best = INFINITY, term = 1.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    if (k > 0) term *= static_cast<double>(k) * t;
    if (term < best * (1 - 1e-12)) best = term, arg = k;
  }
  return {best, arg};
}

// Trigamma-style tail sum_{j>=k} 1/j^2, summed far out plus Euler-Maclaurin remainder.
double inverse_square_tail(std::size_t k) {
  double s = 0;
  const std::size_t N = 2000000;
  for (std::size_t j = N; j >= k; --j) s += 1.0 / (static_cast<double>(j) * j);
  const double n = N + 1.0;
  return s + 1.0 / n + 0.5 / (n * n) + 1.0 / (6 * n * n * n);
}

}  // namespace

TEST_CASE("from_mu builds prefix products and flags") {
  const auto sq = squares();
  CHECK(std::exp(sq.log_M(4)) == doctest::Approx(576.0).epsilon(1e-13));
  CHECK(sq.flags().log_convex);
  CHECK(sq.flags().weight_sequence);
  CHECK(sq.flags().non_quasianalytic);

  const auto ones = WeightSequence::from_mu(std::vector<double>(129, 1.0), "ones");
  CHECK_FALSE(ones.flags().weight_sequence);
  SequenceOptions strict;
  strict.require_weight_sequence = true;
  CHECK_THROWS_AS(WeightSequence::from_mu(std::vector<double>(129, 1.0), "ones", strict), Error);

  const auto fact = WeightSequence::from_mu(mu_table(128, [](double k) { return k; }), "k");
  CHECK(std::exp(fact.log_M(5)) == doctest::Approx(120.0));
  CHECK_FALSE(fact.flags().non_quasianalytic);
}

TEST_CASE("gevrey sequences") {
  const auto g = WeightSequence::gevrey(1.0);
  CHECK(std::exp(g.log_M(3)) == doctest::Approx(36.0).epsilon(1e-13));
  for (std::size_t k = 1; k <= 20; ++k) {
    CHECK(std::exp(g.log_m(k)) == doctest::Approx(std::tgamma(k + 1.0)).epsilon(1e-11));
    CHECK(std::exp(g.log_mu(k)) == doctest::Approx(double(k * k)).epsilon(1e-11));
  }
  const auto& f = g.flags();
  CHECK(f.log_convex);
  CHECK(f.weight_sequence);
  CHECK(f.strongly_log_convex);
  CHECK(f.non_quasianalytic);
  CHECK(f.moderate_growth);
  // Stirling: k! >= (k/e)^k gives mu_k = k^2 <= e^2 (k!)^{2/k}.
  CHECK(g.moderate_growth_constant() <= std::exp(2.0) + 1e-9);
}

TEST_CASE("h_assoc and gamma_bar on m_k = k!") {
  const auto g = WeightSequence::gevrey(1.0);
  const auto m = g.view(ViewKind::m);
  for (double t : {1.0, 1.5, 10.0}) {
    const auto h = h_assoc(m, t);
    CHECK(h.value == 1.0);
    CHECK(h.argmin == 0);
  }
  const auto half = h_assoc(m, 0.5);
  CHECK(half.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.argmin == 1);
  CHECK(h_assoc(m, 0.0).value == 0.0);
  for (double t : {0.1, 0.037, 0.25, 0.8}) {
    const auto [v, k] = brute_h_factorial(t, 64);
    CHECK(h_assoc(m, t).value == doctest::Approx(v).epsilon(1e-12));
    CHECK(gamma_bar(m, t) == k);
    CHECK(gamma_under(m, t) <= gamma_bar(m, t));
  }
  CHECK_THROWS_AS(h_assoc(m, 1e-4), Error);
}

TEST_CASE("gamma_under") {
  const auto g = WeightSequence::gevrey(1.0);
  const auto m = g.view(ViewKind::m);
  CHECK(gamma_under(m, 1.0) == 0);
  CHECK(gamma_under(m, 3.0) == 0);
  CHECK(gamma_under(m, 0.3) == 3);
  // log-convex m: both indices agree
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lt(std::log(0.01), std::log(5.0));
  for (int i = 0; i < 50; ++i) {
    const double t = std::exp(lt(rng));
    CHECK(gamma_under(m, t) == gamma_bar(m, t));
  }
  // decreasing in t
  std::size_t prev = 1000;
  for (double t : log_space(0.01, 10, 100)) {
    const auto k = gamma_under(m, t);
    CHECK(k <= prev);
    prev = k;
  }
}

TEST_CASE("omega_assoc") {
  const auto fact = WeightSequence::from_mu(mu_table(128, [](double k) { return k; }), "k!");
  CHECK(omega_assoc(fact, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(omega_assoc(fact, 0.5) == 0.0);
  CHECK(omega_assoc(fact, 1.0) == 0.0);
  CHECK_THROWS_AS(omega_assoc(fact, 500.0), Error);
  // increasing and convex in log t
  std::vector<double> w;
  const auto ts = log_space(0.5, 100, 60);
  for (double t : ts) w.push_back(omega_assoc(fact, t));
  for (std::size_t i = 2; i < w.size(); ++i) {
    CHECK(w[i] >= w[i - 1]);
    CHECK(w[i] - w[i - 1] >= w[i - 1] - w[i - 2] - 1e-12);
  }
}

TEST_CASE("counting function and the log-integral identity") {
  const auto sq = squares();
  CHECK(counting(sq, 10.0) == 3);
  CHECK(counting(sq, 16.0) == 4);
  const auto even = WeightSequence::from_mu(mu_table(128, [](double k) { return 2 * k; }), "2k");
  CHECK(counting(even, 1.0) == 0);
  CHECK_THROWS_AS(counting(sq, 1e5), Error);
  for (double t : {5.0, 50.0, 500.0}) {
    // Closed form of the step integral: sum over mu_k <= t of log(t / mu_k), k >= 1.
    double exact = 0;
    for (std::size_t k = 1; double(k * k) <= t; ++k) exact += std::log(t / double(k * k));
    CHECK(counting_integral(sq, t) == doctest::Approx(exact).epsilon(1e-9));
    CHECK(omega_assoc(sq, t) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("descendant of mu_k = k^2") {
  const auto sq = squares();
  const auto d = descendant(sq);
  const double tau1 = 1.0 + inverse_square_tail(1);
  const double tau3 = 1.0 / 3.0 + inverse_square_tail(3);
  CHECK(tau1 == doctest::Approx(1.0 + std::numbers::pi * std::numbers::pi / 6).epsilon(1e-10));
  CHECK(std::exp(d.log_mu(3)) == doctest::Approx(tau1 * 3 / tau3).epsilon(1e-6));
  CHECK(std::exp(d.log_mu(3)) == doctest::Approx(10.9).epsilon(0.01));
  CHECK(d.log_mu(1) == 0.0);
  for (std::size_t k = 2; k <= d.k_max(); ++k)
    CHECK(d.log_mu(k) - std::log(double(k)) > d.log_mu(k - 1) - std::log(double(k - 1)));
  CHECK(d.flags().strongly_log_convex);

  const auto harmonic = WeightSequence::from_mu(mu_table(128, [](double k) { return k; }), "k");
  CHECK_THROWS_AS(descendant(harmonic), Error);
}

TEST_CASE("M_k^{1/k} <= mu_k and log-superadditivity on random log-convex sequences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> inc(0.0, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> log_mu(129, 0.0);
    log_mu[1] = inc(rng);
    for (std::size_t k = 2; k <= 128; ++k) log_mu[k] = log_mu[k - 1] + inc(rng);
    const auto s = WeightSequence::from_log_mu(log_mu, "random");
    REQUIRE(s.flags().log_convex);
    for (std::size_t k = 1; k <= 128; ++k) CHECK(s.log_M(k) / double(k) <= s.log_mu(k) + 1e-12);
    for (std::size_t j = 0; j <= 64; j += 3)
      for (std::size_t k = 0; j + k <= 128; k += 5)
        CHECK(s.log_M(j) + s.log_M(k) <= s.log_M(j + k) + 1e-9);
  }
}

TEST_CASE("k -> m_k t^k non-increasing up to gamma_under") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> lt(std::log(0.1), std::log(2.0));
  for (const auto& seq : {WeightSequence::gevrey(1.0), WeightSequence::gevrey(0.5), squares()}) {
    const auto m = seq.view(ViewKind::m);
    for (int i = 0; i < 20; ++i) {
      const double t = std::exp(lt(rng));
      const std::size_t g = gamma_under(m, t);
      for (std::size_t k = 1; k <= g; ++k)
        CHECK(m.log_at(k) + k * std::log(t) <= m.log_at(k - 1) + (k - 1) * std::log(t) + 1e-12);
    }
  }
}

TEST_CASE("counting comparison: gamma_bar_n(C t) <= gamma_under_m(t)") {
  const auto M = squares();
  const auto N = WeightSequence::from_mu(mu_table(128, [](double k) { return 0.5 * k * k + 0.5; }), "n");
  // realized C = max_{j <= k} (mu_j/j) / (nu_k/k)
  double C = 0, run = 0;
  for (std::size_t k = 1; k <= 128; ++k) {
    run = std::max(run, std::exp(M.log_mu(k)) / k);
    C = std::max(C, run / (std::exp(N.log_mu(k)) / k));
  }
  C = std::max(C, 1.0);
  for (double t : log_space(0.03, 3.0, 80))
    CHECK(gamma_bar(N.view(ViewKind::m), C * t) <= gamma_under(M.view(ViewKind::m), t));
}

TEST_CASE("halving: some D gives 2 gamma_under_l(D t) <= gamma_under_m(t)") {
  const auto M = squares();
  const auto L = WeightSequence::from_mu(mu_table(128, [](double k) { return 4 * k * k; }), "4k^2");
  const auto ts = log_space(0.05, 5.0, 80);
  double found = 0;
  for (int i = 0; i <= 40 && found == 0; ++i) {
    const double D = std::ldexp(1.0, i);
    bool ok = true;
    for (double t : ts)
      if (2 * gamma_under(L.view(ViewKind::m), D * t) > gamma_under(M.view(ViewKind::m), t)) ok = false;
    if (ok) found = D;
  }
  CHECK(found >= 1.0);
  CHECK(found <= 64.0);
}

TEST_CASE("associated function under moderate growth: h_m(t) <= h_n(D t)^2 when M_{j+k} <= C^{j+k} N_j N_k") {
  const auto M = WeightSequence::gevrey(4.0);
  double C = 0;
  for (std::size_t j = 0; j <= 64; ++j)
    for (std::size_t k = 0; j + k <= 128; ++k)
      if (j + k > 0) C = std::max(C, std::exp((M.log_M(j + k) - M.log_M(j) - M.log_M(k)) / double(j + k)));
  CHECK(C <= std::pow(2.0, 5) + 1e-9);  // binomial^5 <= 2^{5(j+k)}
  const auto ts = log_space(1e-6, 1e3, 120);
  double found = 0;
  for (int i = 0; i <= 40 && found == 0; ++i) {
    const double D = std::ldexp(1.0, i);
    bool ok = true;
    for (double t : ts) {
      const double lhs = h_assoc(M.view(ViewKind::m), t).value;
      const double rhs = h_assoc(M.view(ViewKind::m), D * t).value;
      if (lhs > rhs * rhs * (1 + 1e-12)) ok = false;
    }
    if (ok) found = D;
  }
  CHECK(found >= 1.0);
}
