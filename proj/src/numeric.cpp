#include "ultrajet/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "ultrajet/kernels.hpp"

namespace ultrajet {

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const double decades = std::log10(hi) - std::log10(lo);
  const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9));
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    out.push_back(std::pow(10.0, std::log10(lo) + static_cast<double>(i) / per_decade));
  out.back() = hi;
  return out;
}

std::vector<double> log_space(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

ArgMax golden_max(const std::function<double(double)>& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (std::fabs(a) + std::fabs(b) + 1e-300); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? ArgMax{c, fc} : ArgMax{d, fd};
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double k, g;
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15], wk[15], wg[15];
  for (int j = 0; j < 7; ++j) {
    fv[2 * j] = f(c - h * kXgk[j]);
    fv[2 * j + 1] = f(c + h * kXgk[j]);
    wk[2 * j] = wk[2 * j + 1] = kWgk[j];
    // Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5).
    const double w = (j % 2 == 1) ? kWg[j / 2] : 0.0;
    wg[2 * j] = wg[2 * j + 1] = w;
  }
  fv[14] = f(c);
  wk[14] = kWgk[7];
  wg[14] = kWg[3];
  const double k = kernels::striped_dot({wk, 15}, {fv, 15});
  const double g = kernels::striped_dot({wg, 15}, {fv, 15});
  return {k * h, g * h};
}

void adapt(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt,
           int depth, QuadResult& out) {
  const Piece p = gk15(f, a, b);
  out.evaluations += 15;
  const double err = std::fabs(p.k - p.g);
  if (depth >= opt.max_depth || err <= std::max(opt.abs_tol, opt.rel_tol * std::fabs(p.k)) ||
      !(b - a > 1e-15 * (std::fabs(a) + std::fabs(b)))) {
    out.value += p.k;
    out.error += err;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, opt, depth + 1, out);
  adapt(f, m, b, opt, depth + 1, out);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
  QuadResult out;
  if (b == a) return out;
  adapt(f, a, b, opt, 0, out);
  return out;
}

TrendResult bounded_trend(std::span<const double> position, std::span<const double> ratio,
                          double slack, double decel) {
  TrendResult r;
  if (ratio.empty()) return r;
  const double span = position.back() - position.front();
  const double mid = position.front() + 0.5 * span;
  const double q3 = position.front() + 0.75 * span;
  r.c_all = -INFINITY;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (position[i] <= mid) r.c_head = std::max(r.c_head, ratio[i]);
    if (position[i] <= q3) r.c_three_quarters = std::max(r.c_three_quarters, ratio[i]);
    if (ratio[i] > r.c_all || std::isnan(ratio[i])) {
      r.c_all = std::isnan(ratio[i]) ? INFINITY : ratio[i];
      r.worst = i;
      if (std::isnan(ratio[i])) break;
    }
  }
  if (!std::isfinite(r.c_all)) {
    r.bounded = false;
    return r;
  }
  const double late = r.c_all - r.c_three_quarters;
  const double early = r.c_three_quarters - r.c_head;
  const bool decelerating = late <= 1e-9 * std::fabs(r.c_all) || late <= decel * early;
  r.bounded = r.c_all <= 0.0 || r.c_all <= slack * r.c_head || decelerating;
  return r;
}

bool vanishing_trend(std::span<const double> ratio, double factor) {
  const std::size_t n = ratio.size();
  if (n < 8) return false;
  const std::size_t q = n - n / 4;
  double low = ratio[q];
  for (std::size_t i = q + 1; i < n; ++i) {
    if (ratio[i] > low * 1.01) return false;
    low = std::min(low, ratio[i]);
  }
  return ratio[n - 1] <= factor * ratio[n / 2];
}

double grid_ceiling(double c, int max_exp) {
  for (int i = 0; i <= max_exp; ++i)
    if (std::ldexp(1.0, i) >= c) return std::ldexp(1.0, i);
  return 0.0;
}

namespace {
std::atomic<unsigned>& worker_count() {
  static std::atomic<unsigned> n{1};
  return n;
}
}  // namespace

void set_workers(unsigned n) { worker_count().store(std::max(1u, n)); }
unsigned workers() { return worker_count().load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned w = std::min<std::size_t>(workers(), std::max<std::size_t>(n, 1));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  pool.reserve(w);
  for (unsigned t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  // Lowest worker first keeps the reported error independent of timing.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ultrajet
