#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ultrajet {

/// Points lo * 10^(i / per_decade) up to and including hi (hi snapped to the last point).
std::vector<double> log_grid(double lo, double hi, int per_decade);

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t count);

struct ArgMax {
  double arg;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [a, b].
ArgMax golden_max(const std::function<double(double)>& f, double a, double b);

struct QuadOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-300;
  int max_depth = 40;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

/// Verdict helper for asymptotic "bounded" claims checked on a finite range.
/// `position` is a log-scale coordinate (log t, log k); `ratio` the constant each
/// sample requires. The range is split at the midpoint of the position span; the
/// claim is accepted when the overall maximum stays within `slack` times the
/// maximum over the first half, or when the running maximum decelerates: its
/// growth over the last quarter is at most `decel` times that over the third.
struct TrendResult {
  bool bounded = true;
  double c_all = 0.0;
  double c_head = 0.0;
  double c_three_quarters = 0.0;
  std::size_t worst = 0;  ///< sample with the largest ratio
};

TrendResult bounded_trend(std::span<const double> position, std::span<const double> ratio,
                          double slack, double decel = 0.5);

/// "f/g -> 0" certificate: the ratio at the end of the range must have dropped
/// below `factor` times its value at the midpoint, and no sample on the last
/// quarter may exceed the running minimum by more than 1%.
bool vanishing_trend(std::span<const double> ratio, double factor = 0.5);

/// Smallest 2^i (0 <= i <= max_exp) that is >= c, or 0 if none.
double grid_ceiling(double c, int max_exp = 40);

/// Worker count used by parallel loops (default 1).
void set_workers(unsigned n);
unsigned workers();

/// Runs fn(i) for i in [0, n). Each index writes only its own output, so the
/// outcome does not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace ultrajet
