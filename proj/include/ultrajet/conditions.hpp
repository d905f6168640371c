#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ultrajet/fncore.hpp"
#include "ultrajet/seqcore.hpp"

namespace ultrajet {

struct Witness {
  std::string name;
  double value;
};

/// A violating sample: lhs > rhs for the inequality named in the verdict,
/// with the constant that was being tested.
struct Counterexample {
  std::string at_kind;     ///< "t", "k" or "j,k"
  std::vector<double> at;  ///< t, or indices
  double lhs = 0.0;
  double rhs = 0.0;
  std::string constant_name;
  double constant = 0.0;
  double margin() const { return lhs - rhs; }
};

struct TestedRange {
  std::string kind;  ///< "t" or "k"
  double lo = 0.0;
  double hi = 0.0;
  std::size_t samples = 0;
};

struct Verdict {
  std::string condition;
  bool holds = false;
  std::vector<Witness> witness;
  std::optional<Counterexample> counterexample;
  TestedRange range;
  bool finite_range = true;
  std::vector<std::string> notes;
  std::vector<Verdict> parts;

  /// NaN when absent.
  double witness_value(const std::string& name) const;
  const Verdict* part(const std::string& condition) const;
};

struct ConditionOptions {
  int c_cap_exp = 40;  ///< constants searched over {2^i : 0 <= i <= c_cap_exp}
  double t_lo = 1.0;
  double t_hi = 1e9;
  int per_decade = 16;
  double trend_slack = 1.5;
  std::size_t chain_samples = 200;
  std::size_t chain_refine = 10;
  double c_cap() const;
};

/// kappa_omega(t) <= C sigma(t) + C on the t grid.
Verdict check_heir(const WeightFunction& omega, const WeightFunction& sigma,
                   const ConditionOptions& opt = {});
/// omega is its own heir.
Verdict check_strong(const WeightFunction& omega, const ConditionOptions& opt = {});

/// theta^x_j / j <= C theta^y_k / k for j <= k, some y >= x, every x in the grid.
/// With `source`, the same constants are recomputed from secants of phi* and
/// compared (part "secant_cross_check").
Verdict check_good(const WeightMatrix& matrix, const WeightFunction* source = nullptr,
                   const ConditionOptions& opt = {});

/// sum_{l >= k} 1/nu_l <= C k / mu_k.
Verdict check_mixed_tail(const WeightSequence& mu, const WeightSequence& nu,
                         const ConditionOptions& opt = {});

/// mu_j / j <= C mu_k / k for j <= k; part "almost_increasing_root" tests
/// m_j^{1/j} <= C m_k^{1/k}.
Verdict check_almost_increasing(const WeightSequence& seq, const ConditionOptions& opt = {});

/// 2 omega(t) <= omega(H t) + H.
Verdict check_omega_doubling(const WeightFunction& fn, const ConditionOptions& opt = {});

/// theta^x_k <= C (W^y_k)^{1/k}, some y >= x, every x.
Verdict check_quotient_root(const WeightMatrix& matrix, const ConditionOptions& opt = {});

/// Equivalence to a concave weight in two forms: part "scaling"
/// (omega(lambda t) <= C lambda omega(t) for t >= t0) and part "root_sequences"
/// ((w^x_j)^{1/j} <= D (w^y_k)^{1/k}). Top-level holds iff both hold; the
/// "consistent" witness is 1 when the two parts agree.
Verdict check_concave_equivalence(const WeightFunction& fn, const WeightMatrix& matrix,
                                  const ConditionOptions& opt = {});

/// sum_{l >= k} 1/theta^y_l <= C k / theta^x_k: top level is the exists-x form,
/// part "forall_x" the per-x form. With `source` and when check_quotient_root
/// holds, part "strong_cross_check" compares against check_strong(source).
Verdict check_strong_matrix(const WeightMatrix& matrix, const WeightFunction* source = nullptr,
                            const ConditionOptions& opt = {});

struct ChainCertificate {
  double x = 0.0, y1 = 0.0, y2 = 0.0, y3 = 0.0;
  double D = 1.0;
  double t_lo = 0.0, t_hi = 0.0;
  std::size_t samples = 0;
  bool refined_ok = false;  ///< re-verified on a chain_refine-times denser grid
};

/// The four index inequalities
///   Gbar_{y3}(D^3 t) <= Gund_{y2}(D^2 t) <= Gbar_{y2}(D^2 t) <= Gund_{y1}(D t) <= Gund_x(t)/2
/// on w-sequences, plus w^x_{j+k} <= w^{y1}_j w^{y1}_k and the same for (y1, y2).
/// Search order: y1 >= 2x, then y2 >= 2 y1, then y3 >= y2, then D = 2^i.
ChainCertificate resolve_chain(const WeightMatrix& matrix, double x,
                               const ConditionOptions& opt = {});
/// Replays a certificate on `samples` log-spaced t in [t_lo, t_hi].
bool chain_holds(const WeightMatrix& matrix, const ChainCertificate& c, std::size_t samples);

}  // namespace ultrajet
