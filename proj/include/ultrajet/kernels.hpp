#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
// Both paths produce bit-identical results: products and differences are
// never contracted, and sums use a fixed four-lane order.

#include <cstddef>
#include <span>

namespace ultrajet::kernels {

enum class Isa { scalar, avx2 };

struct Extremum {
  double value;
  std::size_t index;
};

/// max_i (slope * u[i] - v[i]); index is the first i whose term is within
/// tie_tol of the maximum. Requires u.size() == v.size() > 0.
Extremum max_affine(double slope, std::span<const double> u, std::span<const double> v,
                    double tie_tol);

/// sum_i a[i] * b[i] accumulated in four interleaved lanes, combined as
/// (l0 + l1) + (l2 + l3).
double striped_dot(std::span<const double> a, std::span<const double> b);

bool isa_available(Isa isa);
Isa active_isa();
/// Overrides runtime detection; falls back to scalar if unavailable.
void force_isa(Isa isa);
const char* isa_name(Isa isa);

namespace scalar {
Extremum max_affine(double slope, const double* u, const double* v, std::size_t n,
                    double tie_tol);
double striped_dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool compiled();
Extremum max_affine(double slope, const double* u, const double* v, std::size_t n,
                    double tie_tol);
double striped_dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace ultrajet::kernels
