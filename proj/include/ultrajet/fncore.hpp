#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ultrajet/seqcore.hpp"

namespace ultrajet {

enum class Normalization { normalized, raw };

struct FunctionFlags {
  bool increasing = false;
  bool doubling = false;      ///< omega(2t) <= C omega(t) + C
  bool big_o_t = false;       ///< omega(t) = O(t)
  bool log_little_o = false;  ///< log t = o(omega(t))
  bool convex_phi = false;
  bool non_quasianalytic = false;
  bool concave = false;
  bool o_of_t = false;  ///< omega(t) = o(t)
  double doubling_c = 0.0;
  double big_o_c = 0.0;
};

/// Parametric model log g(l) = A - b log l - c l for the integrand
/// g(l) = omega(e^l) e^{-l}, fitted at the end of the evaluation range and
/// used to close the tail of int omega(u)/u^2 du.
struct DecayModel {
  double A = -INFINITY, b = 0.0, c = 0.0;
  bool convergent() const;
  /// int_l^inf g; throws QuasianalyticInput when the model does not decay.
  double integral_from(double l) const;
};

struct ConjugateTable {
  std::vector<double> arg;    ///< s (for phi) or t (for omega)
  std::vector<double> value;  ///< phi(s) or omega(t)
};

class WeightFunction {
 public:
  /// max(0, t^alpha - 1) when normalized, t^alpha when raw.
  static WeightFunction power(double alpha, Normalization n = Normalization::normalized);
  /// t^a / (log t)^b for large t; continued below the junction by the tangent line of
  /// phi in log coordinates, clipped at zero.
  static WeightFunction log_power(double a = 1.0, double b = 2.0);
  /// power(1 / (1 + s)).
  static WeightFunction gevrey_dual(double s);
  static WeightFunction of_sequence(std::shared_ptr<const WeightSequence> seq);
  /// Piecewise linear phi between (log t_i, omega_i); constant extension to the left,
  /// last slope extended to the right.
  static WeightFunction tabulated(std::vector<double> t, std::vector<double> omega,
                                  std::string label = "tabulated");

  double operator()(double t) const { return omega_(t); }
  double phi(double s) const { return omega_(std::exp(s)); }

  const std::string& label() const { return label_; }
  bool normalized() const { return normalized_; }
  const FunctionFlags& flags() const { return flags_; }
  /// Largest t at which omega is defined (finite range for sequence-generated weights).
  double domain_max() const { return domain_max_; }
  const ConjugateTable& phi_table() const { return *phi_table_; }
  const ConjugateTable& omega_table() const { return *omega_table_; }
  const DecayModel& decay_at_end() const { return decay_; }
  double log_end() const { return log_end_; }

 private:
  WeightFunction(std::string label, bool normalized, double domain_max,
                 std::function<double(double)> omega);

  std::string label_;
  bool normalized_;
  double domain_max_;
  double log_end_;
  std::function<double(double)> omega_;
  std::shared_ptr<const ConjugateTable> phi_table_, omega_table_;
  FunctionFlags flags_;
  DecayModel decay_;
};

/// phi*(t) = sup_{s >= 0} (s t - phi(s)).
double young_conjugate(const WeightFunction& fn, double t);
/// omega*(s) = sup_{t >= 0} (omega(t) - s t).
double omega_conjugate(const WeightFunction& fn, double s);
/// kappa(t) = t int_t^inf omega(u)/u^2 du.
double kappa(const WeightFunction& fn, double t);
/// Harmonic extension to the upper half plane, (|y|/pi) int omega(|u|)/((u-x)^2+y^2) du.
double poisson(const WeightFunction& fn, double x, double y);

struct WeightMatrix {
  std::vector<double> x_grid;
  std::vector<WeightSequence> rows;
  std::string source;

  std::size_t k_max() const { return rows.front().k_max(); }
  std::size_t index_of(double x) const;  ///< throws if x is not in the grid
  const WeightSequence& row(double x) const { return rows[index_of(x)]; }
};

std::vector<double> default_x_grid();
WeightMatrix weight_matrix(const WeightFunction& fn, const std::vector<double>& x_grid,
                           std::size_t k_max = kDefaultKMax);

}  // namespace ultrajet
