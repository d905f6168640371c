#include "ultrajet/seqcore.hpp"

#include <algorithm>
#include <cmath>

#include "ultrajet/error.hpp"
#include "ultrajet/kernels.hpp"
#include "ultrajet/numeric.hpp"

namespace ultrajet {

namespace {

double tie_tolerance(double scale) { return 1e-12 * std::max(1.0, std::fabs(scale)); }

PowerTail fit_tail(std::span<const double> log_mu) {
  const std::size_t K = log_mu.size() - 1;
  const std::size_t first = std::max<std::size_t>(1, K - std::max<std::size_t>(K / 4, 2));
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t k = first; k <= K; ++k) {
    const double x = std::log(static_cast<double>(k)), y = log_mu[k];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  PowerTail tail;
  const double den = n * sxx - sx * sx;
  if (den <= 0) return tail;
  tail.p = (n * sxy - sx * sy) / den;
  tail.c = std::exp((sy - tail.p * sx) / n);
  return tail;
}

}  // namespace

double PowerTail::sum_beyond(std::size_t K) const {
  if (!bounded()) return INFINITY;
  const double x = static_cast<double>(K) + 0.5;
  return std::exp((1.0 - p) * std::log(x) - std::log(c) - std::log(p - 1.0));
}

std::span<const double> SequenceView::logs() const {
  switch (kind_) {
    case ViewKind::M: return seq_->log_M_table();
    case ViewKind::m: return seq_->log_m_table();
    case ViewKind::mu: return seq_->log_mu_table();
  }
  return {};
}

std::size_t SequenceView::k_max() const { return seq_->k_max(); }

WeightSequence WeightSequence::from_mu(std::span<const double> mu, std::string label,
                                       const SequenceOptions& opt) {
  std::vector<double> log_mu(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (!(mu[k] > 0)) throw Error(ErrorKind::InvariantViolation, "mu entries must be positive");
    log_mu[k] = std::log(mu[k]);
  }
  return from_log_mu(std::move(log_mu), std::move(label), opt);
}

WeightSequence WeightSequence::from_log_mu(std::vector<double> log_mu, std::string label,
                                           const SequenceOptions& opt) {
  if (log_mu.size() < 2) throw Error(ErrorKind::InvariantViolation, "need K_max >= 1");
  if (log_mu[0] != 0.0) throw Error(ErrorKind::InvariantViolation, "mu_0 must equal 1");
  std::vector<double> log_M(log_mu.size());
  log_M[0] = 0.0;
  for (std::size_t k = 1; k < log_mu.size(); ++k) log_M[k] = log_M[k - 1] + log_mu[k];
  WeightSequence s;
  s.label_ = std::move(label);
  s.log_M_ = std::move(log_M);
  s.log_mu_ = std::move(log_mu);
  s.finish(opt);
  return s;
}

WeightSequence WeightSequence::from_log_M(std::vector<double> log_M, std::string label,
                                          const SequenceOptions& opt) {
  if (log_M.size() < 2) throw Error(ErrorKind::InvariantViolation, "need K_max >= 1");
  if (log_M[0] != 0.0) throw Error(ErrorKind::InvariantViolation, "M_0 must equal 1");
  WeightSequence s;
  s.label_ = std::move(label);
  s.log_mu_.assign(log_M.size(), 0.0);
  for (std::size_t k = 1; k < log_M.size(); ++k) s.log_mu_[k] = log_M[k] - log_M[k - 1];
  s.log_M_ = std::move(log_M);
  s.finish(opt);
  return s;
}

WeightSequence WeightSequence::gevrey(double s, std::size_t k_max) {
  if (!(s > 0)) throw Error(ErrorKind::InvariantViolation, "gevrey order must be positive");
  std::vector<double> log_M(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) log_M[k] = (1.0 + s) * std::lgamma(k + 1.0);
  return from_log_M(std::move(log_M), "gevrey(" + std::to_string(s) + ")");
}

void WeightSequence::finish(const SequenceOptions& opt) {
  const std::size_t K = k_max();
  log_m_.resize(K + 1);
  index_.resize(K + 1);
  for (std::size_t k = 0; k <= K; ++k) {
    log_m_[k] = log_M_[k] - std::lgamma(k + 1.0);
    index_[k] = static_cast<double>(k);
  }

  flags_ = {};
  flags_.log_convex = true;
  for (std::size_t k = 1; k <= K; ++k)
    if (log_mu_[k] < log_mu_[k - 1] - tie_tolerance(log_mu_[k])) flags_.log_convex = false;

  flags_.strongly_log_convex = true;
  for (std::size_t k = 1; k < K; ++k) {
    const double left = log_m_[k] - log_m_[k - 1], right = log_m_[k + 1] - log_m_[k];
    if (right < left - tie_tolerance(log_m_[k])) flags_.strongly_log_convex = false;
  }

  // Divergence of M_k^{1/k}: monotone on the last quarter and either large or still growing.
  std::vector<double> q(K + 1, 0.0);
  for (std::size_t k = 1; k <= K; ++k) q[k] = log_M_[k] / static_cast<double>(k);
  bool monotone_tail = true;
  for (std::size_t k = K - K / 4 + 1; k <= K; ++k)
    if (q[k] < q[k - 1]) monotone_tail = false;
  const bool large = q[K] >= std::log(opt.divergence_threshold);
  const bool growing = K >= 4 && q[K] - q[K / 2] >= std::log(opt.divergence_growth);
  const bool divergent = monotone_tail && (large || growing);
  flags_.weight_sequence = flags_.log_convex && divergent;

  tail_ = fit_tail(log_mu_);
  flags_.non_quasianalytic = tail_.bounded();

  std::vector<double> pos, ratio;
  for (std::size_t k = 1; k <= K; ++k) {
    pos.push_back(std::log(static_cast<double>(k)));
    ratio.push_back(std::exp(log_mu_[k] - q[k]));
  }
  const TrendResult tr = bounded_trend(pos, ratio, opt.trend_slack);
  moderate_c_ = tr.c_all;
  flags_.moderate_growth = tr.bounded && tr.c_all <= std::ldexp(1.0, 40);

  if (opt.require_weight_sequence && !flags_.weight_sequence)
    throw Error(ErrorKind::NotAWeightSequence,
                "'" + label_ + "' is not a certified weight sequence on 0.." + std::to_string(K));
}

Associated h_assoc(SequenceView v, double t) {
  if (t < 0) throw Error(ErrorKind::InvariantViolation, "h_assoc needs t >= 0");
  if (t == 0) return {0.0, 0};
  const auto logs = v.logs();
  const auto idx = v.source().index_table();
  const double lt = std::log(t);
  // min_k (log v_k + k log t) = -max_k (-log t * k - log v_k)
  kernels::Extremum probe = kernels::max_affine(-lt, idx, logs, 0.0);
  probe = kernels::max_affine(-lt, idx, logs, tie_tolerance(probe.value));
  if (probe.index == v.k_max())
    throw Error(ErrorKind::RangeExhausted,
                "infimum attained at K_max for t = " + std::to_string(t));
  return {std::exp(-probe.value), probe.index};
}

std::size_t gamma_bar(SequenceView v, double t) {
  if (!(t > 0)) throw Error(ErrorKind::InvariantViolation, "gamma_bar needs t > 0");
  return h_assoc(v, t).argmin;
}

std::size_t gamma_under(SequenceView v, double t) {
  if (!(t > 0)) throw Error(ErrorKind::InvariantViolation, "gamma_under needs t > 0");
  const auto logs = v.logs();
  const double need = -std::log(t);
  for (std::size_t k = 0; k + 1 < logs.size(); ++k)
    if (logs[k + 1] - logs[k] >= need - tie_tolerance(need)) return k;
  throw Error(ErrorKind::RangeExhausted, "no quotient reaches 1/t for t = " + std::to_string(t));
}

double omega_assoc(const WeightSequence& seq, double t) {
  if (!(t > 0)) return 0.0;
  const auto e = kernels::max_affine(std::log(t), seq.index_table(), seq.log_M_table(), 0.0);
  if (e.index == seq.k_max() && e.value > 0)
    throw Error(ErrorKind::RangeExhausted,
                "omega_M supremum attained at K_max for t = " + std::to_string(t));
  return std::max(0.0, e.value);
}

std::size_t counting(const WeightSequence& seq, double t) {
  const std::size_t K = seq.k_max();
  if (!(t >= 1.0)) return 0;
  const double lt = std::log(t);
  if (seq.log_mu(K) <= lt)
    throw Error(ErrorKind::RangeExhausted, "mu_{K_max} <= t = " + std::to_string(t));
  std::size_t best = 0;
  for (std::size_t k = 0; k <= K; ++k)
    if (seq.log_mu(k) <= lt + tie_tolerance(lt)) best = k;
  return best;
}

double counting_integral(const WeightSequence& seq, double t) {
  if (!(t > 1.0)) return 0.0;
  const double lt = std::log(t);
  std::vector<double> breaks{0.0, lt};
  for (std::size_t k = 1; k <= seq.k_max(); ++k)
    if (seq.log_mu(k) > 0 && seq.log_mu(k) < lt) breaks.push_back(seq.log_mu(k));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  // In v = log u the integrand counting(e^v) is piecewise constant between jumps.
  const auto f = [&](double v) { return static_cast<double>(counting(seq, std::exp(v))); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    total += integrate(f, breaks[i], breaks[i + 1]).value;
  return total;
}

std::vector<double> tail_sums(const WeightSequence& seq, std::optional<double> tail_sum) {
  const std::size_t K = seq.k_max();
  double tail;
  if (tail_sum) {
    tail = *tail_sum;
  } else {
    if (!seq.tail().bounded())
      throw Error(ErrorKind::TailUnbounded,
                  "fitted tail exponent " + std::to_string(seq.tail().p) + " <= 1 for '" +
                      seq.label() + "'");
    tail = seq.tail().sum_beyond(K);
  }
  if (!(tail >= 0) || !std::isfinite(tail))
    throw Error(ErrorKind::TailUnbounded, "tail estimate is not finite");
  std::vector<double> out(K + 2);
  out[K + 1] = tail;
  for (std::size_t k = K + 1; k-- > 0;) out[k] = out[k + 1] + std::exp(-seq.log_mu(k));
  return out;
}

WeightSequence descendant(const WeightSequence& seq, std::optional<double> tail_sum) {
  if (!tail_sum && !seq.flags().non_quasianalytic)
    throw Error(ErrorKind::QuasianalyticInput, "'" + seq.label() + "' is quasianalytic");
  const auto sums = tail_sums(seq, tail_sum);
  const std::size_t K = seq.k_max();
  std::vector<double> log_tau(K + 1, 0.0);
  for (std::size_t k = 1; k <= K; ++k)
    log_tau[k] = std::log(static_cast<double>(k) * std::exp(-seq.log_mu(k)) + sums[k]);
  std::vector<double> log_sigma(K + 1, 0.0);
  for (std::size_t k = 1; k <= K; ++k)
    log_sigma[k] = log_tau[1] + std::log(static_cast<double>(k)) - log_tau[k];
  log_sigma[1] = 0.0;
  return WeightSequence::from_log_mu(std::move(log_sigma), "descendant(" + seq.label() + ")");
}

}  // namespace ultrajet
