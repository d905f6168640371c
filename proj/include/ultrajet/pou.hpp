#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "ultrajet/geometry.hpp"
#include "ultrajet/jets.hpp"
#include "ultrajet/seqcore.hpp"

namespace ultrajet {

/// Piecewise polynomial on sorted breakpoints, coefficients in t = x - brk[k].
/// Below the first breakpoint the value is `left`, above the last it is `right` (constants).
struct PiecewisePoly {
  std::vector<double> brk;
  std::vector<double> coef;  ///< (brk.size() - 1) blocks of deg + 1
  unsigned deg = 0;
  double left = 0.0, right = 0.0;

  std::size_t pieces() const { return brk.empty() ? 0 : brk.size() - 1; }
  /// f^(j)(x) / j! for j = 0..order.
  std::vector<double> taylor(double x, unsigned order) const;
  double eval(double x, unsigned j = 0) const;
};

/// CDF of a sum of independent uniforms on [-r_i, r_i], built by successive convolution.
PiecewisePoly uniform_sum_cdf(const std::vector<double>& radii);

/// Unit-scale bump: 1 on [-(a - sum r), a - sum r], 0 outside [-(a + sum r), a + sum r].
/// The indicator of [-a, a] convolved with the uniform densities of half-widths r_1 >= r_2 >= ...
class Bump1D {
 public:
  Bump1D() = default;
  /// Throws StageOverflow unless sum r < a.
  Bump1D(double a, std::vector<double> radii);

  double a() const { return a_; }
  const std::vector<double>& radii() const { return radii_; }
  double radius_sum() const { return sum_; }
  unsigned stages() const { return static_cast<unsigned>(radii_.size()); }

  /// j-th derivative from the closed-form piecewise polynomial; j <= stages().
  double eval(double x, unsigned j = 0) const;
  /// f^(j)(x)/j! for j = 0..order.
  std::vector<double> taylor(double x, unsigned order) const;
  /// Same derivative as a signed sum of 2^j values of the (J - j)-stage profile.
  double eval_alternating(double x, unsigned j) const;
  /// prod_{i <= j} 1/r_i, a bound for sup |f^(j)|.
  double bound(unsigned j) const;

 private:
  double a_ = 1.0, sum_ = 0.0;
  std::vector<double> radii_;
  std::shared_ptr<const PiecewisePoly> cdf_;
  std::shared_ptr<const std::vector<PiecewisePoly>> tails_;  ///< tails_[j]: radii j+1..J
};

struct BumpOptions {
  double delta = 0.0;  ///< 0 picks the largest value that fits
  unsigned order_cap = 12;
  unsigned extra_stages = 4;
  bool auto_halve = true;
};

struct BumpBuild {
  Bump1D bump;
  double delta = 0.0;
  unsigned halvings = 0;
};

/// Unit bump (plateau half-width 1, support in [-9/8, 9/8]) with radii delta / mu_j.
BumpBuild build_bump(const WeightSequence& seq, const BumpOptions& opt = {});

class PartitionOfUnity {
 public:
  PartitionOfUnity(std::shared_ptr<const CubeDecomposition> dec, BumpBuild bump, unsigned order_cap);

  const CubeDecomposition& decomposition() const { return *dec_; }
  std::shared_ptr<const CubeDecomposition> decomposition_ptr() const { return dec_; }
  const Bump1D& bump() const { return bump_.bump; }
  double delta() const { return bump_.delta; }
  unsigned halvings() const { return bump_.halvings; }
  unsigned order_cap() const { return order_cap_; }

  double psi(std::size_t i, const Point& x) const;
  TruncatedJet psi_jet(std::size_t i, const Point& x, unsigned order) const;

  /// Nonzero phi_i(x), ascending in i.
  std::vector<std::pair<std::size_t, double>> values(const Point& x) const;
  /// Jets of phi_i at x for every cube whose expansion contains x.
  std::vector<std::pair<std::size_t, TruncatedJet>> jets(const Point& x, unsigned order) const;
  struct JetsWithSum {
    std::vector<std::pair<std::size_t, TruncatedJet>> phi;
    TruncatedJet sum;  ///< 1 - prod (1 - psi_k); exactly the unit jet on a plateau
  };
  JetsWithSum jets_with_sum(const Point& x, unsigned order) const;
  double phi(std::size_t i, const Point& x) const;
  double phi_derivative(std::size_t i, const Point& x, const MultiIndex& beta) const;

  /// Leibniz majorant: sup |d^beta phi_i| over all x.
  double phi_bound(std::size_t i, const MultiIndex& beta) const;
  /// sup |d^beta psi_i|.
  double psi_bound(std::size_t i, const MultiIndex& beta) const;

 private:
  TruncatedJet psi_majorant(std::size_t i, unsigned order) const;

  std::shared_ptr<const CubeDecomposition> dec_;
  BumpBuild bump_;
  unsigned order_cap_;
};

PartitionOfUnity build_pou(const CubeDecomposition& dec, const WeightSequence& seq, const BumpOptions& opt = {});

}  // namespace ultrajet
