#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ultrajet/seqcore.hpp"

namespace ultrajet {

using Point = std::array<double, 2>;  ///< second coordinate unused when n = 1

double distance(const Point& a, const Point& b, unsigned n);

/// alpha in N^n, n in {1, 2}.
struct MultiIndex {
  std::array<unsigned, 2> a{0, 0};
  unsigned order() const { return a[0] + a[1]; }
  double factorial() const;
  bool operator==(const MultiIndex&) const = default;
  bool leq(const MultiIndex& o) const { return a[0] <= o.a[0] && a[1] <= o.a[1]; }
  MultiIndex operator+(const MultiIndex& o) const { return {{a[0] + o.a[0], a[1] + o.a[1]}}; }
  MultiIndex operator-(const MultiIndex& o) const { return {{a[0] - o.a[0], a[1] - o.a[1]}}; }
};

/// Number of multi-indices with |alpha| <= order.
std::size_t multi_count(unsigned n, unsigned order);
/// Position in graded lexicographic order: by |alpha|, then alpha_1 descending.
std::size_t multi_position(unsigned n, const MultiIndex& alpha);
/// All |alpha| <= order in graded lexicographic order.
std::vector<MultiIndex> multi_indices(unsigned n, unsigned order);

/// Taylor coefficients c_beta = d^beta f(x0) / beta! for |beta| <= order.
class TruncatedJet {
 public:
  TruncatedJet() = default;
  TruncatedJet(unsigned n, unsigned order);
  static TruncatedJet constant(unsigned n, unsigned order, double c);

  unsigned dim() const { return n_; }
  unsigned order() const { return order_; }
  double& coef(const MultiIndex& b) { return c_[multi_position(n_, b)]; }
  double coef(const MultiIndex& b) const { return c_[multi_position(n_, b)]; }
  std::vector<double>& coefs() { return c_; }
  const std::vector<double>& coefs() const { return c_; }
  /// d^alpha f(x0) = alpha! c_alpha
  double derivative(const MultiIndex& alpha) const { return alpha.factorial() * coef(alpha); }

  TruncatedJet& operator+=(const TruncatedJet& o);
  TruncatedJet& operator*=(double s);
  /// Cauchy product truncated at the common order.
  friend TruncatedJet operator*(const TruncatedJet& a, const TruncatedJet& b);
  friend TruncatedJet operator+(TruncatedJet a, const TruncatedJet& b) { return a += b; }

 private:
  unsigned n_ = 1, order_ = 0;
  std::vector<double> c_;
};

/// Functions with exact derivative recurrences, used to generate jets.
class JetPreset {
 public:
  struct Node;

  static JetPreset sin(double a, double b, unsigned axis = 0);  ///< sin(a x_axis + b)
  static JetPreset exp(double a, unsigned axis = 0);            ///< exp(a x_axis)
  static JetPreset runge(double c, unsigned axis = 0);          ///< 1 / (1 + c x_axis^2)
  /// sum of coef * x^alpha
  static JetPreset poly(std::vector<std::pair<double, MultiIndex>> terms);
  /// one-variable polynomial sum_k c_k x_axis^k
  static JetPreset poly1(std::vector<double> coeffs, unsigned axis = 0);
  static JetPreset zero();
  friend JetPreset operator+(const JetPreset& a, const JetPreset& b);
  friend JetPreset operator*(const JetPreset& a, const JetPreset& b);

  double operator()(const Point& x) const;
  TruncatedJet taylor(const Point& x0, unsigned n, unsigned order) const;
  std::string label() const;
  /// Polynomial degree, or -1 for non-polynomial presets.
  int poly_degree() const;

 private:
  std::shared_ptr<const Node> root_;
};

struct Box {
  Point lo{0, 0}, hi{0, 0};
};

struct CompactSet {
  unsigned dim = 1;
  std::vector<Point> points;
  Box box;

  /// Validates: non-empty, distinct, inside the box.
  static CompactSet make(unsigned dim, std::vector<Point> points, Box box);
  double distance_to(const Point& x) const;
  std::size_t nearest(const Point& x) const;  ///< ties broken lexicographically by coordinates
};

struct JetCertificate {
  double rho = 0.0;
  double C = 0.0;
  std::string seq_label;
  unsigned p_max = 0;
};

struct Ultrajet {
  CompactSet set;
  unsigned order_cap = 12;
  std::vector<std::vector<double>> values;  ///< values[i][multi_position(alpha)] = F^alpha(points[i])
  std::optional<JetCertificate> certificate;
  std::string label;

  double value(std::size_t point, const MultiIndex& alpha) const;
};

Ultrajet jet_from_preset(const JetPreset& preset, const CompactSet& set, unsigned order_cap = 12);

/// d^alpha (T_a^p F)(x), with a = set.points[a_index].
double taylor(const Ultrajet& jet, std::size_t a_index, unsigned p, const MultiIndex& alpha,
              const Point& x);
/// Coefficients of T_a^p F re-expanded at x (for Leibniz products).
/// With from > 0 only the terms of degree >= from are kept.
TruncatedJet taylor_jet(const Ultrajet& jet, std::size_t a_index, unsigned p, const Point& x,
                        unsigned order, unsigned from = 0);
/// (R_a^p F)^alpha(b)
double remainder(const Ultrajet& jet, std::size_t a_index, unsigned p, const MultiIndex& alpha,
                 std::size_t b_index);

/// Where the certificate constant is attained.
struct Binding {
  int family = 0;  ///< 1: value bound, 2: remainder bound, 0: none
  std::size_t a = 0, b = 0;
  unsigned p = 0;
  MultiIndex alpha;
};

struct CertifyResult {
  double C = 0.0;  ///< value bound |F^a| <= C rho^|a| M_|a| and remainder bound with M_{p+1}/(p+1-|a|)!
  bool ok = false;
  Binding binding;
  double C_factorial_form = 0.0;  ///< same with the remainder bound |a|! m_{p+1} |b-a|^{p+1-|a|}
  Binding binding_factorial_form;
  unsigned p_max = 0;
};

CertifyResult certify(const Ultrajet& jet, const WeightSequence& seq, double rho, unsigned p_max = 12);

}  // namespace ultrajet
