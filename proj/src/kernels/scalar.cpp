#include "ultrajet/kernels.hpp"

#include <limits>

namespace ultrajet::kernels::scalar {

Extremum max_affine(double slope, const double* u, const double* v, std::size_t n,
                    double tie_tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = slope * u[i];
    const double term = prod - v[i];
    if (term > best) best = term;
  }
  const double threshold = best - tie_tol;
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = slope * u[i];
    const double term = prod - v[i];
    if (term >= threshold) return {best, i};
  }
  return {best, 0};
}

double striped_dot(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double prod = a[i] * b[i];
    lane[i & 3] = lane[i & 3] + prod;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace ultrajet::kernels::scalar
