#include "ultrajet/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "ultrajet/error.hpp"
#include "ultrajet/numeric.hpp"

namespace ultrajet {

double Verdict::witness_value(const std::string& name) const {
  for (const auto& w : witness)
    if (w.name == name) return w.value;
  return std::numeric_limits<double>::quiet_NaN();
}

const Verdict* Verdict::part(const std::string& name) const {
  for (const auto& p : parts)
    if (p.condition == name) return &p;
  return nullptr;
}

double ConditionOptions::c_cap() const { return std::ldexp(1.0, c_cap_exp); }

namespace {

std::string tag(double x) {
  std::ostringstream o;
  o.precision(6);
  o << "x=" << x << ":";
  return o.str();
}

std::vector<double> t_samples(double lo, double hi, const ConditionOptions& opt) {
  if (!(hi > lo)) throw Error(ErrorKind::RangeExhausted, "empty t range for the condition check");
  return log_grid(lo, hi, opt.per_decade);
}

double t_ceiling(const WeightFunction& fn, const ConditionOptions& opt) {
  return std::min(opt.t_hi, 0.5 * std::exp(fn.log_end()));
}

// "ratio <= C" over ordered samples, with ratios clamped to C >= 1.
struct RatioScan {
  TrendResult trend;
  double c = 1.0;
  double c_grid = 1.0;
  bool capped = false;
  bool holds = false;
  double failing_constant = 0.0;  ///< the constant a counterexample is measured against
};

RatioScan scan(std::span<const double> pos, std::vector<double> ratio, const ConditionOptions& opt) {
  for (double& r : ratio) r = std::isnan(r) ? INFINITY : std::max(1.0, r);
  RatioScan s;
  s.trend = bounded_trend(pos, ratio, opt.trend_slack);
  s.c = s.trend.c_all;
  s.c_grid = std::isfinite(s.c) ? grid_ceiling(s.c, opt.c_cap_exp) : 0.0;
  s.capped = s.c_grid == 0.0;
  s.holds = !s.capped && s.trend.bounded;
  s.failing_constant = s.capped ? opt.c_cap() : opt.trend_slack * s.trend.c_head;
  return s;
}

void record(Verdict& v, const RatioScan& s, const std::string& name, const std::string& prefix = "") {
  v.witness.push_back({prefix + name, s.c});
  v.witness.push_back({prefix + name + "_grid", s.capped ? INFINITY : s.c_grid});
  if (!s.trend.bounded)
    v.notes.push_back(prefix + "ratio keeps growing: tail max " + std::to_string(s.trend.c_all) +
                      " vs head max " + std::to_string(s.trend.c_head));
}

// Index comparison a_j - b_k over 1 <= j <= k (prefix) or j = k.
struct IndexScan {
  RatioScan s;
  std::vector<std::size_t> j_of;  ///< maximizing j for each k
  std::vector<double> log_ratio;
};

IndexScan index_scan(std::span<const double> a, std::span<const double> b, bool prefix,
                     const ConditionOptions& opt) {
  const std::size_t K = std::min(a.size(), b.size()) - 1;
  IndexScan r;
  std::vector<double> pos, ratio;
  r.j_of.assign(K + 1, 0);
  r.log_ratio.assign(K + 1, 0.0);
  std::size_t best = 1;
  for (std::size_t k = 1; k <= K; ++k) {
    if (!prefix || a[k] > a[best]) best = k;
    r.j_of[k] = best;
    r.log_ratio[k] = a[best] - b[k];
    pos.push_back(std::log(double(k)));
    ratio.push_back(std::exp(r.log_ratio[k]));
  }
  r.s = scan(pos, ratio, opt);
  return r;
}

Counterexample index_counterexample(const IndexScan& r, const std::string& cname,
                                    std::span<const double> a, std::span<const double> b) {
  const std::size_t k = r.s.trend.worst + 1;
  const std::size_t j = r.j_of[k];
  Counterexample c;
  c.at_kind = "j,k (log scale)";
  c.at = {double(j), double(k)};
  c.lhs = a[j];
  c.rhs = std::log(r.s.failing_constant) + b[k];
  c.constant_name = cname;
  c.constant = r.s.failing_constant;
  return c;
}

// theta_k / k, in logs, index 0 unused.
std::vector<double> quotient_over_k(const WeightSequence& s) {
  std::vector<double> out(s.k_max() + 1, 0.0);
  for (std::size_t k = 1; k <= s.k_max(); ++k) out[k] = s.log_mu(k) - std::log(double(k));
  return out;
}

// log of m_k^{1/k}
std::vector<double> root_of_m(const WeightSequence& s) {
  std::vector<double> out(s.k_max() + 1, 0.0);
  for (std::size_t k = 1; k <= s.k_max(); ++k) out[k] = s.log_m(k) / double(k);
  return out;
}

std::vector<double> root_of_M(const WeightSequence& s) {
  std::vector<double> out(s.k_max() + 1, 0.0);
  for (std::size_t k = 1; k <= s.k_max(); ++k) out[k] = s.log_M(k) / double(k);
  return out;
}

std::vector<double> log_quotients(const WeightSequence& s) {
  std::vector<double> out(s.k_max() + 1, 0.0);
  for (std::size_t k = 1; k <= s.k_max(); ++k) out[k] = s.log_mu(k);
  return out;
}

struct RowSearch {
  bool found = false;
  std::size_t y = 0;
  IndexScan scan;
};

// First y >= x (grid order) passing the index comparison of a(x) against b(y);
// on failure the attempt with the smallest realized constant.
RowSearch search_rows(std::size_t xi, const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b, bool prefix,
                      const ConditionOptions& opt) {
  RowSearch best;
  double best_c = INFINITY;
  for (std::size_t yi = xi; yi < b.size(); ++yi) {
    auto r = index_scan(a[xi], b[yi], prefix, opt);
    if (r.s.holds) return {true, yi, std::move(r)};
    if (r.s.c < best_c || yi == xi) {
      best_c = r.s.c;
      best = {false, yi, std::move(r)};
    }
  }
  return best;
}

// Per-x search over the matrix, shared by the "for every x some y" index conditions.
Verdict per_row_verdict(const std::string& name, const std::string& cname, const WeightMatrix& M,
                        const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b, bool prefix,
                        const ConditionOptions& opt, std::vector<RowSearch>* out = nullptr) {
  Verdict v;
  v.condition = name;
  v.range = {"k", 1.0, double(M.k_max()), M.k_max()};
  v.holds = true;
  std::vector<RowSearch> found(M.x_grid.size());
  parallel_for(M.x_grid.size(), [&](std::size_t i) { found[i] = search_rows(i, a, b, prefix, opt); });
  for (std::size_t i = 0; i < M.x_grid.size(); ++i) {
    const auto& f = found[i];
    const std::string p = tag(M.x_grid[i]);
    v.witness.push_back({p + "y", M.x_grid[f.y]});
    record(v, f.scan.s, cname, p);
    if (!f.found && v.holds) {
      v.holds = false;
      auto c = index_counterexample(f.scan, cname, a[i], b[f.y]);
      c.at.insert(c.at.begin(), {M.x_grid[i], M.x_grid[f.y]});
      c.at_kind = "x,y," + c.at_kind;
      v.counterexample = c;
    }
  }
  v.notes.push_back("x ranges over the " + std::to_string(M.x_grid.size()) + "-point grid only");
  if (out) *out = std::move(found);
  return v;
}

template <class F>
std::vector<std::vector<double>> per_row(const WeightMatrix& M, F f) {
  std::vector<std::vector<double>> out;
  for (const auto& r : M.rows) out.push_back(f(r));
  return out;
}

}  // namespace

Verdict check_heir(const WeightFunction& omega, const WeightFunction& sigma,
                   const ConditionOptions& opt) {
  if (!omega.flags().non_quasianalytic)
    throw Error(ErrorKind::QuasianalyticInput, "'" + omega.label() + "' is quasianalytic");
  if (!sigma.flags().o_of_t)
    throw Error(ErrorKind::NotLittleO, "'" + sigma.label() + "' lacks an o(t) certificate");
  const auto ts = t_samples(opt.t_lo, std::min(t_ceiling(omega, opt), t_ceiling(sigma, opt)), opt);
  std::vector<double> k(ts.size()), pos(ts.size()), ratio(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { k[i] = kappa(omega, ts[i]); });
  for (std::size_t i = 0; i < ts.size(); ++i) {
    pos[i] = std::log(ts[i]);
    ratio[i] = k[i] / (sigma(ts[i]) + 1.0);
  }
  Verdict v;
  v.condition = "heir";
  v.range = {"t", ts.front(), ts.back(), ts.size()};
  const auto s = scan(pos, ratio, opt);
  v.holds = s.holds;
  record(v, s, "C");
  if (!s.holds) {
    const std::size_t i = s.trend.worst;
    const double C = s.failing_constant;
    v.counterexample = Counterexample{"t", {ts[i]}, k[i], C * sigma(ts[i]) + C, "C", C};
  }
  return v;
}

Verdict check_strong(const WeightFunction& omega, const ConditionOptions& opt) {
  Verdict v = check_heir(omega, omega, opt);
  v.condition = "strong";
  return v;
}

Verdict check_good(const WeightMatrix& M, const WeightFunction* source, const ConditionOptions& opt) {
  const auto a = per_row(M, quotient_over_k);
  std::vector<RowSearch> found;
  Verdict v = per_row_verdict("good", "C", M, a, a, true, opt, &found);
  if (source) {
    // Same quotients from secants of phi* evaluated afresh.
    std::vector<std::vector<double>> sec(M.x_grid.size());
    parallel_for(M.x_grid.size(), [&](std::size_t i) {
      const double x = M.x_grid[i];
      sec[i].assign(M.k_max() + 1, 0.0);
      double prev = young_conjugate(*source, 0.0);
      for (std::size_t k = 1; k <= M.k_max(); ++k) {
        const double cur = young_conjugate(*source, x * double(k));
        sec[i][k] = (cur - prev) / x - std::log(double(k));
        prev = cur;
      }
    });
    std::vector<RowSearch> alt;
    Verdict w = per_row_verdict("good_secant", "C", M, sec, sec, true, opt, &alt);
    Verdict cross;
    cross.condition = "secant_cross_check";
    cross.range = w.range;
    cross.holds = w.holds == v.holds;
    double worst = 0.0;
    for (std::size_t i = 0; i < found.size(); ++i) {
      if (found[i].y != alt[i].y) cross.holds = false;
      const double d = std::fabs(std::log(found[i].scan.s.c) - std::log(alt[i].scan.s.c));
      worst = std::max(worst, d);
    }
    if (worst > 1e-6) cross.holds = false;
    cross.witness.push_back({"max_log_discrepancy", worst});
    v.parts.push_back(std::move(cross));
  }
  return v;
}

Verdict check_mixed_tail(const WeightSequence& mu, const WeightSequence& nu, const ConditionOptions& opt) {
  const auto ts = tail_sums(nu);
  const std::size_t K = std::min(mu.k_max(), nu.k_max());
  std::vector<double> pos, ratio;
  for (std::size_t k = 1; k <= K; ++k) {
    pos.push_back(std::log(double(k)));
    ratio.push_back(std::exp(std::log(ts[k]) + mu.log_mu(k) - std::log(double(k))));
  }
  Verdict v;
  v.condition = "mixed_tail";
  v.range = {"k", 1.0, double(K), K};
  const auto s = scan(pos, ratio, opt);
  v.holds = s.holds;
  record(v, s, "C");
  if (!s.holds) {
    const std::size_t k = s.trend.worst + 1;
    const double C = s.failing_constant;
    v.counterexample = Counterexample{"k", {double(k)}, ts[k], C * double(k) * std::exp(-mu.log_mu(k)), "C", C};
  }
  return v;
}

Verdict check_almost_increasing(const WeightSequence& seq, const ConditionOptions& opt) {
  const auto a = quotient_over_k(seq);
  const auto r = index_scan(a, a, true, opt);
  Verdict v;
  v.condition = "almost_increasing";
  v.range = {"k", 1.0, double(seq.k_max()), seq.k_max()};
  v.holds = r.s.holds;
  record(v, r.s, "C");
  if (!r.s.holds) v.counterexample = index_counterexample(r, "C", a, a);

  const auto b = root_of_m(seq);
  const auto q = index_scan(b, b, true, opt);
  Verdict root;
  root.condition = "almost_increasing_root";
  root.range = v.range;
  root.holds = q.s.holds;
  record(root, q.s, "C");
  if (!q.s.holds) root.counterexample = index_counterexample(q, "C", b, b);
  v.parts.push_back(std::move(root));
  return v;
}

Verdict check_omega_doubling(const WeightFunction& fn, const ConditionOptions& opt) {
  const double dom = std::exp(fn.log_end());
  const auto ts = t_samples(opt.t_lo, t_ceiling(fn, opt), opt);
  const double cap = opt.c_cap();
  std::vector<double> H(ts.size()), pos(ts.size());
  const auto ok = [&](double t, double h) { return 2.0 * fn(t) <= fn(h * t) + h; };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = ts[i];
    pos[i] = std::log(t);
    const double h_max = std::min(cap, dom / t);
    if (!ok(t, h_max)) {
      H[i] = INFINITY;
      continue;
    }
    if (ok(t, 1.0)) {
      H[i] = 1.0;
      continue;
    }
    double lo = 0.0, hi = std::log(h_max);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(t, std::exp(mid)) ? hi : lo) = mid;
    }
    H[i] = std::exp(hi);
  }
  Verdict v;
  v.condition = "omega_doubling";
  v.range = {"t", ts.front(), ts.back(), ts.size()};
  // The needed H approaches its limit like a power of 1/t, too slowly for the
  // trend test to separate from log growth; only the grid cap decides.
  auto s = scan(pos, H, opt);
  if (!s.trend.bounded) v.notes.push_back("required H still rising at the end of the range");
  s.trend.bounded = true;
  s.holds = !s.capped;
  s.failing_constant = opt.c_cap();
  v.holds = s.holds;
  record(v, s, "H");
  if (!s.holds) {
    const std::size_t i = s.trend.worst;
    const double h = std::min(s.failing_constant, dom / ts[i]);
    v.counterexample = Counterexample{"t", {ts[i]}, 2.0 * fn(ts[i]), fn(h * ts[i]) + h, "H", h};
  }
  return v;
}

Verdict check_quotient_root(const WeightMatrix& M, const ConditionOptions& opt) {
  return per_row_verdict("quotient_root", "C", M, per_row(M, log_quotients), per_row(M, root_of_M),
                         false, opt);
}

Verdict check_concave_equivalence(const WeightFunction& fn, const WeightMatrix& M,
                                  const ConditionOptions& opt) {
  // Scaling form: t0 is the first sample where omega reaches 1.
  Verdict sc;
  sc.condition = "scaling";
  {
    const double hi = t_ceiling(fn, opt);
    double t0 = 0.0;
    for (double t : log_grid(1e-6, hi, opt.per_decade))
      if (fn(t) >= 1.0) {
        t0 = t;
        break;
      }
    if (t0 == 0.0) throw Error(ErrorKind::RangeExhausted, "omega stays below 1 on the tested range");
    const auto ts = t_samples(std::max(t0, opt.t_lo), hi, opt);
    const double dom = std::exp(fn.log_end());
    std::vector<double> pos(ts.size()), c(ts.size()), lam(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      pos[i] = std::log(ts[i]);
      const double w = fn(ts[i]);
      c[i] = 0.0;
      for (int e = 0; e <= opt.c_cap_exp && std::ldexp(ts[i], e) <= dom; ++e) {
        const double l = std::ldexp(1.0, e);
        const double r = fn(l * ts[i]) / (l * w);
        if (r > c[i]) {
          c[i] = r;
          lam[i] = l;
        }
      }
    }
    sc.range = {"t", ts.front(), ts.back(), ts.size()};
    sc.witness.push_back({"t0", ts.front()});
    const auto s = scan(pos, c, opt);
    sc.holds = s.holds;
    record(sc, s, "C");
    if (!s.holds) {
      const std::size_t i = s.trend.worst;
      const double C = s.failing_constant;
      sc.counterexample =
          Counterexample{"t,lambda", {ts[i], lam[i]}, fn(lam[i] * ts[i]), C * lam[i] * fn(ts[i]), "C", C};
    }
  }
  const auto b = per_row(M, root_of_m);
  Verdict rs = per_row_verdict("root_sequences", "D", M, b, b, true, opt);

  Verdict v;
  v.condition = "concave_equivalence";
  v.holds = sc.holds && rs.holds;
  v.range = sc.range;
  v.witness.push_back({"consistent", sc.holds == rs.holds ? 1.0 : 0.0});
  if (sc.holds != rs.holds) v.notes.push_back("scaling and root-sequence forms disagree on the tested range");
  v.parts.push_back(std::move(sc));
  v.parts.push_back(std::move(rs));
  return v;
}

Verdict check_strong_matrix(const WeightMatrix& M, const WeightFunction* source, const ConditionOptions& opt) {
  const std::size_t n = M.x_grid.size();
  // attempt[i][j]: rows x_i (quotients) against tails of x_j.
  std::vector<std::vector<std::optional<Verdict>>> attempt(n, std::vector<std::optional<Verdict>>(n));
  std::vector<std::string> unbounded(n);
  parallel_for(n * n, [&](std::size_t q) {
    const std::size_t i = q / n, j = q % n;
    try {
      attempt[i][j] = check_mixed_tail(M.rows[i], M.rows[j], opt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TailUnbounded) throw;
    }
  });
  Verdict forall;
  forall.condition = "forall_x";
  forall.range = {"k", 1.0, double(M.k_max()), M.k_max()};
  forall.holds = true;
  Verdict v;
  v.condition = "strong_matrix";
  v.range = forall.range;
  const Verdict* best = nullptr;
  std::pair<std::size_t, std::size_t> best_at{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const Verdict* row_best = nullptr;
    std::size_t row_j = 0;
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = attempt[i][j];
      if (!a) continue;
      const double c = a->witness_value("C");
      if (a->holds && !any) {
        any = true;
        row_best = &*a;
        row_j = j;
      } else if (!any && (!row_best || c < row_best->witness_value("C"))) {
        row_best = &*a;
        row_j = j;
      }
    }
    const std::string p = tag(M.x_grid[i]);
    if (!row_best) {
      forall.notes.push_back(p + "no row with a bounded tail");
      if (forall.holds) {
        forall.holds = false;
        forall.counterexample = Counterexample{"x", {M.x_grid[i]}, INFINITY, 0.0, "C", INFINITY};
      }
      continue;
    }
    forall.witness.push_back({p + "y", M.x_grid[row_j]});
    forall.witness.push_back({p + "C", row_best->witness_value("C")});
    if (!any && forall.holds) {
      forall.holds = false;
      auto c = *row_best->counterexample;
      c.at.insert(c.at.begin(), {M.x_grid[i], M.x_grid[row_j]});
      c.at_kind = "x,y," + c.at_kind;
      forall.counterexample = c;
    }
    if (any && !(best && best->holds)) {
      best = row_best;
      best_at = {i, row_j};
    } else if (!best || (!best->holds && row_best->witness_value("C") < best->witness_value("C"))) {
      best = row_best;
      best_at = {i, row_j};
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    bool bounded = false;
    for (std::size_t i = 0; i < n; ++i) bounded = bounded || attempt[i][j].has_value();
    if (!bounded) v.notes.push_back(tag(M.x_grid[j]) + "tail sums not certified; pairs using it skipped");
  }
  if (best) {
    v.holds = best->holds;
    v.witness.push_back({"x", M.x_grid[best_at.first]});
    v.witness.push_back({"y", M.x_grid[best_at.second]});
    v.witness.push_back({"C", best->witness_value("C")});
    if (!best->holds) {
      auto c = *best->counterexample;
      c.at.insert(c.at.begin(), {M.x_grid[best_at.first], M.x_grid[best_at.second]});
      c.at_kind = "x,y," + c.at_kind;
      v.counterexample = c;
    }
  } else {
    throw Error(ErrorKind::TailUnbounded, "no matrix row has certified tail sums");
  }
  v.parts.push_back(std::move(forall));
  if (source) {
    const Verdict qr = check_quotient_root(M, opt);
    if (qr.holds) {
      const Verdict st = check_strong(*source, opt);
      Verdict cross;
      cross.condition = "strong_cross_check";
      cross.holds = st.holds == v.holds;
      cross.range = st.range;
      cross.witness.push_back({"strong", st.holds ? 1.0 : 0.0});
      v.parts.push_back(std::move(cross));
    } else {
      v.notes.push_back("quotient_root fails; no comparison with the strong verdict is asserted");
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// chain resolution

namespace {

class ChainEval {
 public:
  ChainEval(const WeightMatrix& M, std::vector<double> ts) : M_(M), ts_(std::move(ts)) {}

  // Gamma over all samples at scale 2^e; -1 marks a range failure.
  const std::vector<long>& gamma(std::size_t row, int e, bool bar) {
    const auto key = std::make_tuple(row, e, bar);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    std::vector<long> g(ts_.size());
    const auto view = M_.rows[row].view(ViewKind::m);
    for (std::size_t i = 0; i < ts_.size(); ++i) {
      const double t = std::ldexp(ts_[i], e);
      try {
        g[i] = long(bar ? gamma_bar(view, t) : gamma_under(view, t));
      } catch (const Error&) {
        g[i] = -1;
      }
    }
    return memo_.emplace(key, std::move(g)).first->second;
  }

  bool holds(std::size_t x, std::size_t y1, std::size_t y2, std::size_t y3, int d) {
    const auto& u_x = gamma(x, 0, false);
    const auto& u_1 = gamma(y1, d, false);
    for (std::size_t i = 0; i < ts_.size(); ++i)
      if (u_x[i] < 0 || u_1[i] < 0 || 2 * u_1[i] > u_x[i]) return false;
    const auto& b_2 = gamma(y2, 2 * d, true);
    const auto& u_2 = gamma(y2, 2 * d, false);
    for (std::size_t i = 0; i < ts_.size(); ++i)
      if (b_2[i] < 0 || u_2[i] < 0 || b_2[i] > u_1[i] || u_2[i] > b_2[i]) return false;
    const auto& b_3 = gamma(y3, 3 * d, true);
    for (std::size_t i = 0; i < ts_.size(); ++i)
      if (b_3[i] < 0 || b_3[i] > u_2[i]) return false;
    return true;
  }

 private:
  const WeightMatrix& M_;
  std::vector<double> ts_;
  std::map<std::tuple<std::size_t, int, bool>, std::vector<long>> memo_;
};

bool supplement(const WeightSequence& a, const WeightSequence& b) {
  const std::size_t K = std::min(a.k_max(), b.k_max());
  for (std::size_t j = 0; j <= K; ++j)
    for (std::size_t k = 0; j + k <= K; ++k)
      if (a.log_m(j + k) > b.log_m(j) + b.log_m(k) + 1e-12 * (1.0 + std::fabs(a.log_m(j + k))))
        return false;
  return true;
}

std::pair<double, double> chain_range(const WeightMatrix& M, std::size_t xi) {
  const auto& w = M.rows[xi];
  const std::size_t K = w.k_max();
  // Gund_x(t_lo) is about K/2; Gund_x(t_hi) = 1 boundary.
  const double t_lo = std::exp(-(w.log_m(K / 2 + 1) - w.log_m(K / 2)));
  const double t_hi = std::exp(-(w.log_m(2) - w.log_m(1)));
  return {t_lo, t_hi};
}

int exponent_of(double D) { return int(std::lround(std::log2(D))); }

}  // namespace

bool chain_holds(const WeightMatrix& M, const ChainCertificate& c, std::size_t samples) {
  ChainEval ev(M, log_space(c.t_lo, c.t_hi, samples));
  return ev.holds(M.index_of(c.x), M.index_of(c.y1), M.index_of(c.y2), M.index_of(c.y3), exponent_of(c.D)) &&
         supplement(M.row(c.x), M.row(c.y1)) && supplement(M.row(c.y1), M.row(c.y2));
}

ChainCertificate resolve_chain(const WeightMatrix& M, double x, const ConditionOptions& opt) {
  const std::size_t xi = M.index_of(x);
  const auto [t_lo, t_hi] = chain_range(M, xi);
  if (!(t_hi > t_lo)) throw Error(ErrorKind::RangeExhausted, "degenerate t range for the chain");
  ChainEval ev(M, log_space(t_lo, t_hi, opt.chain_samples));
  const auto& g = M.x_grid;
  std::map<std::pair<std::size_t, std::size_t>, bool> sup;
  const auto sup_ok = [&](std::size_t a, std::size_t b) {
    auto it = sup.find({a, b});
    if (it == sup.end()) it = sup.emplace(std::make_pair(a, b), supplement(M.rows[a], M.rows[b])).first;
    return it->second;
  };
  for (std::size_t y1 = 0; y1 < g.size(); ++y1) {
    if (g[y1] < 2 * x || !sup_ok(xi, y1)) continue;
    for (std::size_t y2 = 0; y2 < g.size(); ++y2) {
      if (g[y2] < 2 * g[y1] || !sup_ok(y1, y2)) continue;
      for (std::size_t y3 = y2; y3 < g.size(); ++y3)
        for (int d = 0; d <= opt.c_cap_exp; ++d)
          if (ev.holds(xi, y1, y2, y3, d)) {
            ChainCertificate c{x, g[y1], g[y2], g[y3], std::ldexp(1.0, d), t_lo, t_hi, opt.chain_samples, false};
            c.refined_ok = chain_holds(M, c, opt.chain_samples * opt.chain_refine);
            return c;
          }
    }
  }
  throw Error(ErrorKind::RangeExhausted, "no in-grid chain certificate for x = " + std::to_string(x));
}

}  // namespace ultrajet
