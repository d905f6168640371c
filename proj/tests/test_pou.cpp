#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ultrajet/error.hpp"
#include "ultrajet/pou.hpp"

using namespace ultrajet;

namespace {

double binom(unsigned n, unsigned k) {
  double b = 1;
  for (unsigned i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// CDF of the sum of n uniforms on [0, 1]
double irwin_hall(unsigned n, double x) {
  double s = 0, f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  for (unsigned k = 0; k <= n && k < x; ++k) s += (k % 2 ? -1 : 1) * binom(n, k) * std::pow(x - k, n);
  return s / f;
}

const WeightSequence& gev1() {
  static const WeightSequence s = WeightSequence::gevrey(1.0);
  return s;
}

const BumpBuild& unit_bump() {
  static const BumpBuild b = build_bump(gev1(), {});
  return b;
}

}  // namespace

TEST_CASE("uniform sums against closed forms") {
  const double r = 0.3;
  const auto f = uniform_sum_cdf(std::vector<double>(6, r));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int s = 0; s < 2000; ++s) {
    const double y = u(rng);
    const double oracle = y <= -1.8 ? 0.0 : y >= 1.8 ? 1.0 : irwin_hall(6, (y + 1.8) / (2 * r));
    REQUIRE(f.eval(y) == doctest::Approx(oracle).epsilon(1e-11));
  }
  // two different radii: trapezoidal density with plateau 1/(2 r1)
  const auto g = uniform_sum_cdf({0.5, 0.2});
  CHECK(g.eval(0.0, 1) == doctest::Approx(1.0));
  CHECK(g.eval(0.29, 1) == doctest::Approx(1.0));
  CHECK(g.eval(0.5, 1) == doctest::Approx(0.2 / 0.4));
  CHECK(g.eval(0.7, 0) == 1.0);
}

TEST_CASE("many stages stay a CDF") {
  const auto& b = unit_bump().bump;
  CHECK(b.stages() == 16);
  CHECK(b.radius_sum() < 1.0 / 16);
  CHECK(b.radius_sum() > (1.0 / 16) * (1 - 1e-9));
  CHECK(b.a() - b.radius_sum() > 1.0);
  CHECK(b.a() + b.radius_sum() <= 1.125);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  for (int s = 0; s < 1000; ++s) {
    const double x = u(rng);
    REQUIRE(b.eval(x) + b.eval(-x) == doctest::Approx(2 * b.eval(x)).epsilon(1e-12));
    REQUIRE(b.eval(x) >= -1e-13);
    REQUIRE(b.eval(x) <= 1 + 1e-13);
  }
  CHECK(b.eval(0.0) == 1.0);
  CHECK(b.eval(1.0) == 1.0);
  CHECK(b.eval(-1.0) == 1.0);
  CHECK(b.eval(1.125) == 0.0);
  CHECK(b.eval(-1.2) == 0.0);
  for (unsigned j = 1; j <= 12; j += 2) CHECK(b.eval(0.0, j) == 0.0);
}

TEST_CASE("single stage trapezoid") {
  const Bump1D t(1.0, {0.25});
  double sup = 0;
  for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(t.eval(-1.5 + 3.0 * i / 4000, 1)));
  CHECK(sup == doctest::Approx(1.0 / (2 * 0.25)));
  CHECK(sup <= t.bound(1));
  CHECK(t.eval(1.0) == doctest::Approx(0.5));
  CHECK(t.eval(0.75) == 1.0);
  CHECK(t.eval(1.25) == 0.0);
}

TEST_CASE("derivatives against finite differences and the bound") {
  const auto& b = unit_bump().bump;
  const double h = 1e-3 * b.radii().back();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  std::vector<double> worst(13, 0.0);
  for (int s = 0; s < 10000; ++s) {
    const double x = u(rng);
    const auto tp = b.taylor(x + h, 12), tm = b.taylor(x - h, 12), t0 = b.taylor(x, 12);
    double f = 1;
    for (unsigned j = 1; j <= 12; ++j) {
      const double fd = (tp[j - 1] - tm[j - 1]) * (f / (2 * h));  // (j-1)! c_{j-1} differenced
      f *= j;
      const double exact = t0[j] * f;
      worst[j] = std::max(worst[j], std::abs(exact - fd) / b.bound(j));
      REQUIRE(std::abs(exact) <= b.bound(j));
    }
  }
  for (unsigned j = 1; j <= 12; ++j) CHECK(worst[j] < 1e-6);
}

TEST_CASE("closed form agrees with the alternating sum") {
  const auto& b = unit_bump().bump;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.9, 1.2);
  for (int s = 0; s < 60; ++s) {
    const double x = s % 2 ? u(rng) : -u(rng);
    for (unsigned j = 0; j <= 10; ++j) {
      const double d = b.eval(x, j), a = b.eval_alternating(x, j);
      // both paths lose digits to cancellation near 1e-9 B_j at j ~ 8
      REQUIRE(std::abs(d - a) <= 1e-7 * b.bound(j));
    }
  }
}

TEST_CASE("bump build errors") {
  CHECK_THROWS_AS(build_bump(WeightSequence::gevrey(0.0), {}), Error);
  try {
    build_bump(gev1(), {.delta = 1.0, .auto_halve = false});
    FAIL("expected StageOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StageOverflow);
  }
  const auto hb = build_bump(gev1(), {.delta = 1.0, .order_cap = 4});
  CHECK(hb.halvings > 0);
  CHECK(hb.delta <= unit_bump().delta * 2);
  CHECK_THROWS_AS(unit_bump().bump.eval(0.0, 17), Error);
}

TEST_CASE("partition sums to one on the covered region") {
  for (unsigned n : {1u, 2u}) {
    const auto set = n == 1 ? CompactSet::make(1, {{-1, 0}, {1, 0}}, {{-2, 0}, {2, 0}})
                            : CompactSet::make(2, {{0, 0}}, {{-1, -1}, {1, 1}});
    const auto dec = decompose(set, {.depth_cap = n == 1 ? 12u : 7u});
    const auto pou = build_pou(dec, gev1(), {.order_cap = 4});
    double worst = 0;
    std::size_t counted = 0;
    const int side = n == 1 ? 100000 : 317;
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < (n == 1 ? 1 : side); ++j) {
        Point x{dec.box.lo[0] + (dec.box.hi[0] - dec.box.lo[0]) * (i + 0.5) / side, 0};
        if (n == 2) x[1] = dec.box.lo[1] + (dec.box.hi[1] - dec.box.lo[1]) * (j + 0.5) / side;
        if (dec.locate(x).kind != Location::Cube) continue;
        double s = 0;
        for (const auto& [k, v] : pou.values(x)) {
          REQUIRE(v >= 0.0);
          REQUIRE(v <= 1.0);
          s += v;
        }
        worst = std::max(worst, std::abs(s - 1));
        ++counted;
      }
    CHECK(counted > 90000);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("supports, plateaus and centers") {
  const auto dec = decompose(CompactSet::make(2, {{0, 0}}, {{-1, -1}, {1, 1}}), {.depth_cap = 6});
  const auto pou = build_pou(dec, gev1(), {.order_cap = 4});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (std::size_t i = 0; i < dec.cubes.size(); ++i) {
    const Cube& q = dec.cubes[i];
    CHECK(pou.phi(i, q.center) == 1.0);
    for (int s = 0; s < 40; ++s) {
      const Point in{q.center[0] + u(rng) * q.side, q.center[1] + u(rng) * q.side};
      if (q.contains(in, 2)) REQUIRE(pou.psi(i, in) == 1.0);
      if (!q.contains(in, 2, CubeDecomposition::kExpansion)) {
        REQUIRE(pou.psi(i, in) == 0.0);
        REQUIRE(pou.phi(i, in) == 0.0);
      }
    }
  }
}

TEST_CASE("derivative certificates and Leibniz consistency") {
  const auto dec = decompose(CompactSet::make(2, {{0, 0}}, {{-1, -1}, {1, 1}}), {.depth_cap = 6});
  const auto pou = build_pou(dec, gev1(), {.order_cap = 4});
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto betas = multi_indices(2, 4);
  std::size_t replayed = 0;
  while (replayed < 1000) {
    const Point x{u(rng), u(rng)};
    const auto js = pou.jets(x, 4);
    for (const auto& [i, jet] : js) {
      const auto& beta = betas[replayed % betas.size()];
      REQUIRE(std::abs(jet.derivative(beta)) <= pou.phi_bound(i, beta));
      ++replayed;
    }
    // derivatives of the sum vanish inside accepted cubes
    const auto loc = dec.locate(x);
    if (loc.kind == Location::Cube && dec.cubes[loc.index].contains(x, 2, 0.999)) {
      for (const auto& b : betas) {
        if (b.order() == 0) continue;
        double s = 0, scale = 0;
        for (const auto& [i, jet] : js) {
          s += jet.derivative(b);
          scale = std::max(scale, std::abs(jet.derivative(b)));
        }
        REQUIRE(std::abs(s) <= 1e-9 * std::max(1.0, scale));
      }
    }
  }
  // first derivatives against central differences of the value
  for (int s = 0; s < 100; ++s) {
    const Point x{u(rng), u(rng)};
    for (const auto& [i, jet] : pou.jets(x, 1)) {
      const double h = 1e-6 * dec.cubes[i].side;
      const double fd = (pou.phi(i, {x[0] + h, x[1]}) - pou.phi(i, {x[0] - h, x[1]})) / (2 * h);
      REQUIRE(jet.derivative({{1, 0}}) == doctest::Approx(fd).epsilon(1e-5).scale(1.0 / dec.cubes[i].side));
    }
  }
}
