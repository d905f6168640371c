#include "ultrajet/fncore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ultrajet/error.hpp"
#include "ultrajet/kernels.hpp"
#include "ultrajet/numeric.hpp"

namespace ultrajet {

namespace {

constexpr double kLogCap = 700.0;  // keeps e^l finite in double precision
constexpr int kPerDecade = 64;
constexpr double kGridLo = 1e-6, kGridHi = 1e9;

double integrand_g(const std::function<double(double)>& omega, double l) {
  return omega(std::exp(l)) * std::exp(-l);
}

DecayModel fit_decay(const std::function<double(double)>& omega, double l_end) {
  DecayModel m;
  const double h = std::clamp(l_end / 4.0, 0.25, 20.0);
  const double l[3] = {l_end - 2 * h, l_end - h, l_end};
  double y[3];
  for (int i = 0; i < 3; ++i) {
    const double g = integrand_g(omega, l[i]);
    if (!(g > 0)) return m;  // integrand vanishes: no tail
    y[i] = std::log(g);
  }
  // Solve y_i = A - b log l_i - c l_i.
  const double a[3][3] = {{1, -std::log(l[0]), -l[0]}, {1, -std::log(l[1]), -l[1]}, {1, -std::log(l[2]), -l[2]}};
  const auto det3 = [](const double M[3][3]) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
           M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  };
  const double d = det3(a);
  double sol[3];
  for (int col = 0; col < 3; ++col) {
    double b[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) b[r][c] = (c == col) ? y[r] : a[r][c];
    sol[col] = det3(b) / d;
  }
  m.A = sol[0];
  m.b = sol[1];
  m.c = sol[2];
  return m;
}

std::vector<double> flag_grid(double domain_max) {
  return log_grid(kGridLo, std::min(kGridHi, domain_max), kPerDecade);
}

}  // namespace

bool DecayModel::convergent() const {
  if (A == -INFINITY) return true;
  return c > 1e-9 || (c > -1e-9 && b > 1.0 + 1e-6);
}

double DecayModel::integral_from(double l) const {
  if (A == -INFINITY) return 0.0;
  if (!convergent())
    throw Error(ErrorKind::QuasianalyticInput, "integrand of the tail integral does not decay");
  const auto f = [&](double y) {
    const double x = y / (1.0 - y);
    const double ll = l + x;
    return std::exp(A - b * std::log(ll) - c * ll) / ((1.0 - y) * (1.0 - y));
  };
  return integrate(f, 0.0, 1.0, {1e-10, 1e-300, 40}).value;
}

WeightFunction::WeightFunction(std::string label, bool normalized, double domain_max,
                               std::function<double(double)> omega)
    : label_(std::move(label)),
      normalized_(normalized),
      domain_max_(domain_max),
      log_end_(std::min(kLogCap, std::log(domain_max))),
      omega_(std::move(omega)) {
  // Conjugate tables: phi on s in [0, log_end], omega on {0} and a log grid up to e^log_end.
  auto phi_tab = std::make_shared<ConjugateTable>();
  const double h = std::log(10.0) / kPerDecade;
  for (double s = 0.0; s < log_end_; s += h) phi_tab->arg.push_back(s);
  phi_tab->arg.push_back(log_end_);
  for (double s : phi_tab->arg) phi_tab->value.push_back(phi(s));
  phi_table_ = phi_tab;

  auto om_tab = std::make_shared<ConjugateTable>();
  om_tab->arg.push_back(0.0);
  for (double t : log_grid(kGridLo, std::exp(log_end_), kPerDecade)) om_tab->arg.push_back(t);
  for (double t : om_tab->arg) om_tab->value.push_back(omega_(t));
  omega_table_ = om_tab;

  // Flags on the test grid.
  const auto grid = flag_grid(domain_max_);
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = omega_(grid[i]);

  flags_.increasing = true;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (w[i] < w[i - 1]) flags_.increasing = false;

  std::vector<double> pos, ratio;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (2 * grid[i] > domain_max_) break;
    pos.push_back(std::log(grid[i]));
    ratio.push_back(omega_(2 * grid[i]) / (w[i] + 1.0));
  }
  auto tr = bounded_trend(pos, ratio, 1.5);
  flags_.doubling = tr.bounded;
  flags_.doubling_c = tr.c_all;

  pos.clear();
  ratio.clear();
  std::vector<double> little_o, log_ratio;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1.0) continue;
    pos.push_back(std::log(grid[i]));
    ratio.push_back(w[i] / grid[i]);
    if (grid[i] >= std::exp(1.0) && w[i] > 0) log_ratio.push_back(std::log(grid[i]) / w[i]);
  }
  tr = bounded_trend(pos, ratio, 1.5);
  flags_.big_o_t = tr.bounded;
  flags_.big_o_c = tr.c_all;
  flags_.o_of_t = vanishing_trend(ratio);
  flags_.log_little_o = vanishing_trend(log_ratio);

  flags_.convex_phi = true;
  const auto& ps = phi_table_->arg;
  const auto& pv = phi_table_->value;
  for (std::size_t i = 2; i < ps.size(); ++i) {
    const double d1 = (pv[i - 1] - pv[i - 2]) / (ps[i - 1] - ps[i - 2]);
    const double d2 = (pv[i] - pv[i - 1]) / (ps[i] - ps[i - 1]);
    if (d2 < d1 - 1e-9 * std::max(1.0, std::fabs(d1))) {
      flags_.convex_phi = false;
      break;
    }
  }

  flags_.concave = true;
  double prev = INFINITY;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double slope = (w[i] - w[i - 1]) / (grid[i] - grid[i - 1]);
    if (slope > prev + 1e-9 * std::max(1.0, std::fabs(prev))) {
      flags_.concave = false;
      break;
    }
    prev = slope;
  }

  decay_ = fit_decay(omega_, log_end_);
  flags_.non_quasianalytic = decay_.convergent();
}

WeightFunction WeightFunction::power(double alpha, Normalization n) {
  if (!(alpha > 0)) throw Error(ErrorKind::InvariantViolation, "power exponent must be positive");
  const bool norm = n == Normalization::normalized;
  std::string label = "power(" + std::to_string(alpha) + (norm ? ")" : ", raw)");
  if (norm)
    return WeightFunction(label, true, INFINITY,
                          [alpha](double t) { return t <= 1.0 ? 0.0 : std::pow(t, alpha) - 1.0; });
  return WeightFunction(label, false, INFINITY,
                        [alpha](double t) { return t <= 0.0 ? 0.0 : std::pow(t, alpha); });
}

WeightFunction WeightFunction::log_power(double a, double b) {
  if (!(a > 0) || !(b >= 0))
    throw Error(ErrorKind::InvariantViolation, "log_power needs a > 0, b >= 0");
  // phi(s) = e^{a s} s^{-b} above s0; tangent continuation below, clipped at 0.
  const double s0 = std::max(2.0 * b, b + 1.0) / a;
  const double phi0 = std::exp(a * s0 - b * std::log(s0));
  const double slope0 = phi0 * (a - b / s0);
  auto omega = [=](double t) {
    if (t <= 1.0) return 0.0;
    const double s = std::log(t);
    if (s >= s0) return std::exp(a * s - b * std::log(s));
    return std::max(0.0, phi0 + slope0 * (s - s0));
  };
  return WeightFunction("log_power(" + std::to_string(a) + ", " + std::to_string(b) + ")", true,
                        INFINITY, omega);
}

WeightFunction WeightFunction::gevrey_dual(double s) {
  if (!(s > 0)) throw Error(ErrorKind::InvariantViolation, "gevrey order must be positive");
  return power(1.0 / (1.0 + s));
}

WeightFunction WeightFunction::of_sequence(std::shared_ptr<const WeightSequence> seq) {
  const double top = std::exp(seq->log_mu(seq->k_max())) * (1.0 - 1e-12);
  auto omega = [seq](double t) { return omega_assoc(*seq, t); };
  return WeightFunction("omega_of(" + seq->label() + ")", seq->log_mu(1) >= 0.0, top, omega);
}

WeightFunction WeightFunction::tabulated(std::vector<double> t, std::vector<double> omega,
                                         std::string label) {
  if (t.size() < 2 || t.size() != omega.size())
    throw Error(ErrorKind::InvariantViolation, "tabulated weight needs matching tables");
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0) || (i > 0 && !(t[i] > t[i - 1])))
      throw Error(ErrorKind::InvariantViolation, "tabulated t must be positive and increasing");
    s[i] = std::log(t[i]);
  }
  const bool norm = t.front() >= 1.0 ? omega.front() == 0.0 : false;
  auto fn = [s, omega](double tt) {
    if (tt <= 0) return 0.0;
    const double x = std::log(tt);
    if (x <= s.front()) return omega.front();
    std::size_t i = std::upper_bound(s.begin(), s.end(), x) - s.begin();
    if (i >= s.size()) i = s.size() - 1;
    const double w = (x - s[i - 1]) / (s[i] - s[i - 1]);
    return omega[i - 1] + w * (omega[i] - omega[i - 1]);
  };
  return WeightFunction(std::move(label), norm, INFINITY, fn);
}

double young_conjugate(const WeightFunction& fn, double t) {
  if (t < 0) throw Error(ErrorKind::InvariantViolation, "young_conjugate needs t >= 0");
  const auto& tab = fn.phi_table();
  const auto e = kernels::max_affine(t, tab.arg, tab.value, 0.0);
  const std::size_t last = tab.arg.size() - 1;
  if (e.index == last)
    throw Error(ErrorKind::GridExhausted, "phi* argmax at the grid edge for t = " + std::to_string(t));
  const double lo = tab.arg[e.index == 0 ? 0 : e.index - 1];
  const double hi = tab.arg[e.index + 1];
  const auto r = golden_max([&](double s) { return s * t - fn.phi(s); }, lo, hi);
  return std::max(e.value, r.value);
}

double omega_conjugate(const WeightFunction& fn, double s) {
  if (!fn.flags().o_of_t)
    throw Error(ErrorKind::NotLittleO, "'" + fn.label() + "' lacks an o(t) certificate");
  const auto& tab = fn.omega_table();
  std::vector<double> neg(tab.value.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -tab.value[i];
  const auto e = kernels::max_affine(-s, tab.arg, neg, 0.0);
  const std::size_t last = tab.arg.size() - 1;
  if (e.index == last)
    throw Error(ErrorKind::GridExhausted, "omega* argmax at the grid edge for s = " + std::to_string(s));
  const double lo = tab.arg[e.index == 0 ? 0 : e.index - 1];
  const double hi = tab.arg[e.index + 1];
  const auto r = golden_max([&](double t) { return fn(t) - s * t; }, lo, hi);
  return std::max(e.value, r.value);
}

double kappa(const WeightFunction& fn, double t) {
  if (!(t > 0)) throw Error(ErrorKind::InvariantViolation, "kappa needs t > 0");
  if (!fn.flags().non_quasianalytic)
    throw Error(ErrorKind::QuasianalyticInput, "'" + fn.label() + "' is quasianalytic");
  const double l0 = std::log(t);
  const double l_end = fn.log_end();
  if (l0 >= l_end) throw Error(ErrorKind::RangeExhausted, "kappa beyond the weight's domain");
  const auto g = [&](double l) { return fn(std::exp(l)) * std::exp(-l); };
  const QuadOptions opt{1e-12, 1e-300, 30};
  double acc = 0.0, l = l0;
  bool truncated = false;
  while (l < l_end) {
    const double next = std::min(l_end, std::floor(l) + 1.0);
    const double chunk = integrate(g, l, next, opt).value;
    acc += chunk;
    l = next;
    if (acc > 0 && l >= 4.0 && chunk < 1e-12 * acc) {
      truncated = true;
      break;
    }
  }
  const DecayModel model = truncated ? fit_decay([&](double u) { return fn(u); }, l) : fn.decay_at_end();
  acc += model.integral_from(l);
  return t * acc;
}

double poisson(const WeightFunction& fn, double x, double y) {
  if (y == 0.0) return fn(std::fabs(x));
  if (!fn.flags().non_quasianalytic)
    throw Error(ErrorKind::QuasianalyticInput, "'" + fn.label() + "' is quasianalytic");
  const double Y = std::fabs(y), X = std::fabs(x);
  const auto kern = [&](double u) {
    const double a = u - X, b = u + X;
    return 1.0 / (a * a + Y * Y) + 1.0 / (b * b + Y * Y);
  };
  const QuadOptions opt{1e-12, 1e-300, 40};
  double total = integrate([&](double u) { return fn(u) * kern(u); }, 0.0, 1.0, opt).value;
  const double l_top = std::min(fn.log_end() - 1.0, std::log(1e6 * std::max({1.0, X, Y})));
  std::vector<double> breaks{0.0, l_top};
  if (X > 1.0 && std::log(X) < l_top) breaks.push_back(std::log(X));
  std::sort(breaks.begin(), breaks.end());
  const auto in_log = [&](double l) {
    const double u = std::exp(l);
    return fn(u) * kern(u) * u;
  };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    total += integrate(in_log, breaks[i], breaks[i + 1], opt).value;
  // Beyond T both kernels are 1/u^2 up to O(((X+Y)/T)^2).
  const double T = std::exp(l_top);
  total += 2.0 * kappa(fn, T) / T;
  return Y / std::numbers::pi * total;
}

std::size_t WeightMatrix::index_of(double x) const {
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    if (x_grid[i] == x) return i;
  throw Error(ErrorKind::InvariantViolation, "parameter " + std::to_string(x) + " not in x_grid");
}

std::vector<double> default_x_grid() {
  std::vector<double> g;
  for (int j = -4; j <= 6; ++j) g.push_back(std::ldexp(1.0, j));
  return g;
}

WeightMatrix weight_matrix(const WeightFunction& fn, const std::vector<double>& x_grid,
                           std::size_t k_max) {
  if (x_grid.empty()) throw Error(ErrorKind::InvariantViolation, "empty x_grid");
  for (std::size_t i = 0; i < x_grid.size(); ++i)
    if (!(x_grid[i] > 0) || (i > 0 && !(x_grid[i] > x_grid[i - 1])))
      throw Error(ErrorKind::InvariantViolation, "x_grid must be positive and increasing");
  WeightMatrix W;
  W.x_grid = x_grid;
  W.source = fn.label();
  std::vector<std::vector<double>> logs(x_grid.size());
  parallel_for(x_grid.size(), [&](std::size_t i) {
    const double x = x_grid[i];
    std::vector<double> lw(k_max + 1, 0.0);
    for (std::size_t k = 1; k <= k_max; ++k) lw[k] = young_conjugate(fn, x * static_cast<double>(k)) / x;
    logs[i] = std::move(lw);
  });
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    std::string label = "W^" + std::to_string(x_grid[i]) + "[" + fn.label() + "]";
    W.rows.push_back(WeightSequence::from_log_M(std::move(logs[i]), std::move(label)));
  }
  return W;
}

}  // namespace ultrajet
