#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ultrajet/error.hpp"
#include "ultrajet/fncore.hpp"
#include "ultrajet/numeric.hpp"

using namespace ultrajet;

namespace {

const WeightFunction& sqrt_norm() {
  static const auto w = WeightFunction::power(0.5);
  return w;
}
const WeightFunction& sqrt_raw() {
  static const auto w = WeightFunction::power(0.5, Normalization::raw);
  return w;
}
const WeightFunction& logp() {
  static const auto w = WeightFunction::log_power(1.0, 2.0);
  return w;
}
const WeightMatrix& sqrt_matrix() {
  static const auto W = weight_matrix(sqrt_norm(), default_x_grid());
  return W;
}

// (1/pi) int_R omega(|u|)/(u^2 + 1) du via u = cot(v^2), composite Simpson.
double poisson_unit_reference(const WeightFunction& w, int n) {
  const double V = std::sqrt(std::numbers::pi / 2);
  const double h = V / n;
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = i * h;
    double f = 0;
    if (v > 0) f = w(1.0 / std::tan(v * v)) * 2 * v;
    s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
  }
  return 2.0 / std::numbers::pi * s * h / 3;
}

}  // namespace

TEST_CASE("preset flags") {
  const auto& f = sqrt_norm().flags();
  CHECK(sqrt_norm().normalized());
  CHECK(f.increasing);
  CHECK(f.doubling);
  CHECK(f.big_o_t);
  CHECK(f.log_little_o);
  CHECK(f.convex_phi);
  CHECK(f.non_quasianalytic);
  CHECK(f.o_of_t);
  CHECK_FALSE(f.concave);  // the normalization kink at t = 1
  CHECK(sqrt_raw().flags().concave);
  CHECK(logp().flags().non_quasianalytic);
  CHECK(logp().flags().convex_phi);
  CHECK(logp().flags().increasing);
  const auto lin = WeightFunction::power(1.0);
  CHECK_FALSE(lin.flags().o_of_t);
  CHECK_FALSE(lin.flags().non_quasianalytic);
  for (double t : {0.0, 0.3, 1.0}) CHECK(sqrt_norm()(t) == 0.0);
  CHECK(WeightFunction::gevrey_dual(1.0)(16.0) == doctest::Approx(3.0));
}

TEST_CASE("Young conjugate against the closed form") {
  CHECK(young_conjugate(sqrt_norm(), 0.0) == 0.0);
  CHECK(young_conjugate(logp(), 0.0) == 0.0);
  for (double t : {0.5, 1.0, 3.0, 10.0, 100.0, 1000.0, 8000.0}) {
    const double raw = 2 * t * std::log(2 * t) - 2 * t;
    CHECK(young_conjugate(sqrt_raw(), t) == doctest::Approx(raw).epsilon(1e-6).scale(1));
    CHECK(young_conjugate(sqrt_norm(), t) == doctest::Approx(raw + 1).epsilon(1e-9));
  }
  double prev = 0;
  for (double t : log_space(1, 1e4, 40)) {
    const double q = young_conjugate(sqrt_norm(), t) / t;
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("Legendre round trip phi** = phi") {
  for (double s : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    // phi**(s) = sup_t (s t - phi*(t)); the maximiser is phi'(s).
    const auto r = golden_max([&](double t) { return s * t - young_conjugate(sqrt_norm(), t); }, 0.0,
                              10 * std::exp(s / 2) + 1);
    CHECK(r.value == doctest::Approx(sqrt_norm().phi(s)).epsilon(1e-6));
  }
}

TEST_CASE("weight matrix of power(1/2)") {
  const auto& W = sqrt_matrix();
  for (const auto& row : W.rows) {
    CHECK(row.log_M(0) == 0.0);
    CHECK(row.flags().log_convex);
  }
  // Gevrey-2 equivalence of the x = 1 row.
  const auto& r1 = W.row(1.0);
  double lo = INFINITY, hi = 0;
  for (std::size_t k = 4; k <= 64; ++k) {
    const double q = std::exp(r1.log_M(k) / k) / (double(k) * k);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi / 1 <= 10);
  CHECK(1 / lo <= 10);
  // monotone in x, products across rows, index doubling
  for (std::size_t i = 0; i + 1 < W.x_grid.size(); ++i)
    for (std::size_t k = 1; k <= W.k_max(); ++k)
      CHECK(W.rows[i].log_mu(k) <= W.rows[i + 1].log_mu(k) + 1e-9);
  for (std::size_t i = 0; i + 1 < W.x_grid.size(); ++i) {
    const auto& a = W.rows[i];
    const auto& b = W.rows[i + 1];  // 2x
    for (std::size_t j = 0; j <= W.k_max(); j += 3)
      for (std::size_t k = 0; j + k <= W.k_max(); k += 7)
        CHECK(a.log_M(j + k) <= b.log_M(j) + b.log_M(k) + 1e-9 * (1 + a.log_M(j + k)));
  }
  for (std::size_t i = 0; i + 2 < W.x_grid.size(); ++i)
    for (std::size_t k = 2; 2 * k <= W.k_max(); ++k)
      CHECK(W.rows[i].log_mu(2 * k) <= W.rows[i + 2].log_mu(k) + 1e-8);
  // rho^k W^x_k <= H W^y_k with rho = 2, some y and H in the grid.
  for (std::size_t i = 0; i + 2 < W.x_grid.size(); ++i) {
    bool found = false;
    for (std::size_t j = i; j < W.x_grid.size() && !found; ++j) {
      double c = 0;
      for (std::size_t k = 0; k <= W.k_max(); ++k)
        c = std::max(c, k * std::log(2.0) + W.rows[i].log_M(k) - W.rows[j].log_M(k));
      found = c < 40 * std::log(2.0);
    }
    CHECK(found);
  }
}

TEST_CASE("omega conjugate and the inversion formula") {
  for (double s : {0.01, 0.1, 0.5, 2.0})
    CHECK(omega_conjugate(sqrt_raw(), s) == doctest::Approx(1 / (4 * s)).epsilon(1e-9));
  CHECK(omega_conjugate(sqrt_norm(), 1.0) == 0.0);
  CHECK(omega_conjugate(sqrt_norm(), 3.0) == 0.0);
  CHECK_THROWS_AS(omega_conjugate(WeightFunction::power(1.0), 1.0), Error);
  for (double t : {0.5, 2.0, 30.0, 1000.0}) {
    const auto r = golden_max([&](double ls) { return -(omega_conjugate(sqrt_raw(), std::exp(ls)) + std::exp(ls) * t); },
                              std::log(1e-5), std::log(10.0));
    CHECK(-r.value == doctest::Approx(sqrt_raw()(t)).epsilon(1e-6));
  }
}

TEST_CASE("conjugate domination: sigma* <= C omega*(t/C) + C") {
  const auto sigma = WeightFunction::power(1.0 / 3.0);  // sigma = O(omega)
  const auto ss = log_space(1e-3, 10, 60);
  bool found = false;
  for (int i = 0; i <= 40 && !found; ++i) {
    const double C = std::ldexp(1.0, i);
    bool ok = true;
    for (double s : ss)
      if (omega_conjugate(sigma, s) > C * omega_conjugate(sqrt_norm(), s / C) + C) ok = false;
    found = ok;
  }
  CHECK(found);
}

TEST_CASE("kappa") {
  for (double t : {1.0, 100.0, 1e4, 1e6})
    CHECK(kappa(sqrt_raw(), t) == doctest::Approx(2 * std::sqrt(t)).epsilon(1e-8));
  for (double t : {100.0, 1e5, 1e9})
    CHECK(kappa(logp(), t) / logp()(t) == doctest::Approx(std::log(t)).epsilon(1e-6));
  std::vector<double> k;
  const auto ts = log_space(0.1, 1e6, 50);
  for (double t : ts) {
    k.push_back(kappa(sqrt_norm(), t));
    CHECK(k.back() >= sqrt_norm()(t));
  }
  for (std::size_t i = 2; i < ts.size(); ++i) {
    const double s1 = (k[i - 1] - k[i - 2]) / (ts[i - 1] - ts[i - 2]);
    const double s2 = (k[i] - k[i - 1]) / (ts[i] - ts[i - 1]);
    CHECK(s2 <= s1 * (1 + 1e-7));
  }
  CHECK_THROWS_AS(kappa(WeightFunction::power(1.0), 10.0), Error);
}

TEST_CASE("harmonic extension") {
  CHECK(poisson(sqrt_norm(), 9.0, 0.0) == 2.0);
  CHECK(poisson(sqrt_raw(), 0.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  const double ref = poisson_unit_reference(sqrt_norm(), 400000);
  CHECK(poisson(sqrt_norm(), 0.0, 1.0) == doctest::Approx(ref).epsilon(1e-4));
  for (double x : {-3.0, 0.0, 2.0, 50.0})
    for (double y : {0.1, 1.0, 10.0})
      CHECK(poisson(sqrt_norm(), x, y) >= sqrt_norm()(std::hypot(x, y)) - 1e-12);
  // Along the imaginary axis P(0, t) = O(omega(t)).
  double worst = 0;
  for (double t : log_space(10, 1e6, 30)) worst = std::max(worst, poisson(sqrt_norm(), 0, t) / sqrt_norm()(t));
  CHECK(worst < 4);
}

TEST_CASE("conjugate against the associated function: exp(omega*(t)) <= (e / h_m(t/C))^C on the x = 1 row") {
  const auto& row = sqrt_matrix().row(1.0);
  const auto m = row.view(ViewKind::m);
  const auto ts = log_space(0.05, 10, 60);
  bool found = false;
  for (int i = 0; i <= 10 && !found; ++i) {
    const double C = std::ldexp(1.0, i);
    bool ok = true;
    for (double t : ts) {
      try {
        const double rhs = C * (1 - std::log(h_assoc(m, t / C).value));
        if (omega_conjugate(sqrt_norm(), t) > rhs + 1e-12) ok = false;
      } catch (const Error&) {
        ok = false;
      }
    }
    found = ok;
  }
  CHECK(found);
}

TEST_CASE("heir rows: S^x <= e^{1/x} W^{Cx} for a heir") {
  const auto omega = WeightFunction::power(1.0 / 3.0);
  const auto grid = default_x_grid();
  const auto W = weight_matrix(omega, grid, 64);
  const auto S = weight_matrix(sqrt_norm(), grid, 64);
  bool found = false;
  for (int c = 0; c <= 4 && !found; ++c) {
    const double C = std::ldexp(1.0, c);
    bool ok = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (C * grid[i] > grid.back()) continue;
      const auto& wr = W.row(C * grid[i]);
      for (std::size_t k = 0; k <= 64; ++k)
        if (S.rows[i].log_M(k) > 1 / grid[i] + wr.log_M(k) + 1e-9) ok = false;
    }
    found = ok;
  }
  CHECK(found);
}

TEST_CASE("omega_{W^x} is equivalent to omega") {
  auto row = std::make_shared<WeightSequence>(sqrt_matrix().row(1.0));
  double lo = INFINITY, hi = 0;
  for (double t : log_space(10, 1e4, 40)) {
    const double q = omega_assoc(*row, t) / sqrt_norm()(t);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi < 10);
  CHECK(lo > 0.1);
}
