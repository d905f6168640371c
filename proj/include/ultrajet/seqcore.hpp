#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ultrajet {

inline constexpr std::size_t kDefaultKMax = 128;

struct SequenceOptions {
  /// M_k^{1/k} counts as divergent once it exceeds this value ...
  double divergence_threshold = 1e6;
  /// ... or once it grows by this factor between K/2 and K.
  double divergence_growth = 1.25;
  /// Slack for bounded-ratio verdicts (see bounded_trend).
  double trend_slack = 1.5;
  bool require_weight_sequence = false;
};

struct SequenceFlags {
  bool log_convex = false;
  bool weight_sequence = false;
  bool strongly_log_convex = false;
  bool non_quasianalytic = false;
  bool moderate_growth = false;
};

/// Least-squares fit mu_j ~ c j^p over the last quarter of the index range.
struct PowerTail {
  double c = 0.0;
  double p = 0.0;
  bool bounded() const { return p > 1.0; }
  /// Upper estimate of sum_{j>K} 1/(c j^p) via the midpoint integral from K + 1/2.
  double sum_beyond(std::size_t K) const;
};

enum class ViewKind { M, m, mu };

class WeightSequence;

class SequenceView {
 public:
  SequenceView(const WeightSequence& seq, ViewKind kind) : seq_(&seq), kind_(kind) {}
  ViewKind kind() const { return kind_; }
  const WeightSequence& source() const { return *seq_; }
  std::span<const double> logs() const;
  double log_at(std::size_t k) const { return logs()[k]; }
  std::size_t k_max() const;

 private:
  const WeightSequence* seq_;
  ViewKind kind_;
};

class WeightSequence {
 public:
  /// mu[0] must equal 1; K_max = mu.size() - 1.
  static WeightSequence from_mu(std::span<const double> mu, std::string label = {},
                                const SequenceOptions& opt = {});
  static WeightSequence from_log_mu(std::vector<double> log_mu, std::string label = {},
                                    const SequenceOptions& opt = {});
  static WeightSequence from_log_M(std::vector<double> log_M, std::string label = {},
                                   const SequenceOptions& opt = {});
  /// M_k = (k!)^{1+s}.
  static WeightSequence gevrey(double s, std::size_t k_max = kDefaultKMax);

  std::size_t k_max() const { return log_M_.size() - 1; }
  const std::string& label() const { return label_; }
  const SequenceFlags& flags() const { return flags_; }
  const PowerTail& tail() const { return tail_; }
  /// Realized constant C in mu_k <= C M_k^{1/k} over the range.
  double moderate_growth_constant() const { return moderate_c_; }

  double log_M(std::size_t k) const { return log_M_[k]; }
  double log_m(std::size_t k) const { return log_m_[k]; }
  double log_mu(std::size_t k) const { return log_mu_[k]; }

  std::span<const double> log_M_table() const { return log_M_; }
  std::span<const double> log_m_table() const { return log_m_; }
  std::span<const double> log_mu_table() const { return log_mu_; }
  /// 0, 1, ..., K_max as doubles (slopes for the envelope kernels).
  std::span<const double> index_table() const { return index_; }

  SequenceView view(ViewKind kind) const { return {*this, kind}; }

 private:
  WeightSequence() = default;
  void finish(const SequenceOptions& opt);

  std::string label_;
  std::vector<double> log_M_, log_m_, log_mu_, index_;
  SequenceFlags flags_;
  PowerTail tail_;
  double moderate_c_ = 0.0;
};

struct Associated {
  double value;
  std::size_t argmin;
};

/// inf_k v_k t^k over the view (h_m for kind m). h(0) = 0 with argmin reported as 0.
Associated h_assoc(SequenceView v, double t);
std::size_t gamma_bar(SequenceView v, double t);
/// Smallest k with v_{k+1}/v_k >= 1/t.
std::size_t gamma_under(SequenceView v, double t);
/// sup_k (k log t - log M_k).
double omega_assoc(const WeightSequence& seq, double t);
/// max{k : mu_k <= t}; 0 below mu_0 = 1.
std::size_t counting(const WeightSequence& seq, double t);
/// int_0^t counting(u)/u du by quadrature between jumps.
double counting_integral(const WeightSequence& seq, double t);
/// Strongly log-convex descendant sigma_k = tau_1 k / tau_k.
WeightSequence descendant(const WeightSequence& seq, std::optional<double> tail_sum = {});

/// sum_{j>=k} 1/mu_j for k = 0..K_max (+ one trailing entry for K_max+1 holding
/// the tail estimate). Throws TailUnbounded without a bounded tail.
std::vector<double> tail_sums(const WeightSequence& seq, std::optional<double> tail_sum = {});

}  // namespace ultrajet
