#include "ultrajet/pou.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ultrajet/error.hpp"

namespace ultrajet {

namespace {

// Coefficients of p(t + h) from those of p(u), in place.
void taylor_shift(std::vector<double>& c, double h) {
  const std::size_t n = c.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = n - 1; i > k; --i) c[i - 1] += h * c[i];
}

double horner(const double* c, std::size_t n, double t) {
  double v = 0.0;
  for (std::size_t i = n; i-- > 0;) v = v * t + c[i];
  return v;
}

std::size_t locate_piece(const PiecewisePoly& p, double x) {
  auto it = std::upper_bound(p.brk.begin(), p.brk.end(), x);
  std::size_t k = static_cast<std::size_t>(it - p.brk.begin());
  k = k == 0 ? 0 : k - 1;
  return std::min(k, p.pieces() - 1);
}

// F(base + t) as a polynomial in t, on the old piece containing `probe`.
std::vector<double> shifted(const PiecewisePoly& f, double base, double probe, unsigned deg) {
  std::vector<double> c(deg + 1, 0.0);
  if (f.pieces() == 0 || probe < f.brk.front()) {
    c[0] = f.pieces() == 0 && probe >= f.brk.front() ? f.right : f.left;
    return c;
  }
  if (probe >= f.brk.back()) {
    c[0] = f.right;
    return c;
  }
  const std::size_t q = locate_piece(f, probe);
  const std::size_t w = f.deg + 1;
  std::copy(f.coef.begin() + q * w, f.coef.begin() + (q + 1) * w, c.begin());
  taylor_shift(c, base - f.brk[q]);
  return c;
}

PiecewisePoly heaviside() {
  PiecewisePoly h;
  h.brk = {0.0};
  h.left = 0.0;
  h.right = 1.0;
  return h;
}

PiecewisePoly convolve_uniform(const PiecewisePoly& f, double r) {
  std::vector<double> nb;
  nb.reserve(2 * f.brk.size());
  for (double b : f.brk) {
    nb.push_back(b - r);
    nb.push_back(b + r);
  }
  std::sort(nb.begin(), nb.end());
  // merge breakpoints that differ only by rounding
  const double tol = 1e-14 * std::max(std::abs(nb.front()), std::abs(nb.back()));
  std::vector<double> m;
  m.reserve(nb.size());
  for (double b : nb)
    if (m.empty() || b - m.back() > tol) m.push_back(b);

  PiecewisePoly g;
  g.deg = f.deg + 1;
  g.left = f.left;
  g.right = f.right;
  g.brk = std::move(m);
  const std::size_t w = g.deg + 1;
  g.coef.assign(g.pieces() * w, 0.0);
  double acc = f.left;
  for (std::size_t k = 0; k < g.pieces(); ++k) {
    const double c0 = g.brk[k], c1 = g.brk[k + 1];
    const double mid = 0.5 * (c0 + c1);
    const auto up = shifted(f, c0 + r, mid + r, f.deg);
    const auto dn = shifted(f, c0 - r, mid - r, f.deg);
    double* e = &g.coef[k * w];
    e[0] = acc;
    for (unsigned i = 0; i <= f.deg; ++i) e[i + 1] = (up[i] - dn[i]) / (2 * r) / (i + 1);
    acc = horner(e, w, c1 - c0);
  }
  return g;
}

}  // namespace

std::vector<double> PiecewisePoly::taylor(double x, unsigned order) const {
  std::vector<double> out(order + 1, 0.0);
  if (pieces() == 0 || x < brk.front() || x > brk.back()) {
    out[0] = (pieces() == 0 ? x >= brk.front() : x > brk.back()) ? right : left;
    return out;
  }
  const std::size_t k = locate_piece(*this, x);
  const std::size_t w = deg + 1;
  std::vector<double> c(coef.begin() + k * w, coef.begin() + (k + 1) * w);
  taylor_shift(c, x - brk[k]);
  for (unsigned j = 0; j <= order && j < w; ++j) out[j] = c[j];
  return out;
}

double PiecewisePoly::eval(double x, unsigned j) const {
  const auto t = taylor(x, j);
  double f = 1.0;
  for (unsigned i = 2; i <= j; ++i) f *= i;
  return t[j] * f;
}

PiecewisePoly uniform_sum_cdf(const std::vector<double>& radii) {
  PiecewisePoly f = heaviside();
  for (double r : radii) f = convolve_uniform(f, r);
  return f;
}

Bump1D::Bump1D(double a, std::vector<double> radii) : a_(a), radii_(std::move(radii)) {
  for (double r : radii_)
    if (!(r > 0)) throw Error(ErrorKind::StageOverflow, "convolution radii must be positive");
  sum_ = 0.0;
  for (double r : radii_) sum_ += r;
  if (!(sum_ < a_)) throw Error(ErrorKind::StageOverflow, "radius sum does not fit inside the plateau");
  cdf_ = std::make_shared<const PiecewisePoly>(uniform_sum_cdf(radii_));
  auto tails = std::make_shared<std::vector<PiecewisePoly>>();
  tails->resize(radii_.size() + 1);
  (*tails)[radii_.size()] = heaviside();
  // successive suffixes reuse the previous table
  for (std::size_t j = radii_.size(); j-- > 1;) (*tails)[j] = convolve_uniform((*tails)[j + 1], radii_[j]);
  tails_ = std::move(tails);
}

std::vector<double> Bump1D::taylor(double x, unsigned order) const {
  if (order > stages()) throw Error(ErrorKind::OrderCapExceeded, "derivative order above the bump smoothness");
  auto p = cdf_->taylor(x + a_, order);
  const auto q = cdf_->taylor(x - a_, order);
  for (unsigned j = 0; j <= order; ++j) p[j] -= q[j];
  p[0] = std::clamp(p[0], 0.0, 1.0);  // the difference of CDFs can dip below 0 by rounding
  return p;
}

double Bump1D::eval(double x, unsigned j) const {
  const auto t = taylor(x, j);
  double f = 1.0;
  for (unsigned i = 2; i <= j; ++i) f *= i;
  return t[j] * f;
}

double Bump1D::eval_alternating(double x, unsigned j) const {
  if (j > stages()) throw Error(ErrorKind::OrderCapExceeded, "derivative order above the bump smoothness");
  const PiecewisePoly& tail = j == 0 ? *cdf_ : (*tails_)[j];
  double s = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << j); ++mask) {
    double y = x;
    int sign = 1;
    for (unsigned i = 0; i < j; ++i) {
      if (mask >> i & 1u) {
        y -= radii_[i];
        sign = -sign;
      } else {
        y += radii_[i];
      }
    }
    s += sign * (tail.eval(y + a_) - tail.eval(y - a_));
  }
  double scale = 1.0;
  for (unsigned i = 0; i < j; ++i) scale *= 2 * radii_[i];
  return s / scale;
}

double Bump1D::bound(unsigned j) const {
  double b = 1.0;
  for (unsigned i = 0; i < j && i < radii_.size(); ++i) b /= radii_[i];
  return j > radii_.size() ? INFINITY : b;
}

BumpBuild build_bump(const WeightSequence& seq, const BumpOptions& opt) {
  if (!seq.flags().non_quasianalytic)
    throw Error(ErrorKind::QuasianalyticInput, "'" + seq.label() + "' is quasianalytic");
  const unsigned J = opt.order_cap + opt.extra_stages;
  if (opt.extra_stages < 1) throw Error(ErrorKind::StageOverflow, "need at least order_cap + 1 stages");
  if (seq.k_max() < J) throw Error(ErrorKind::RangeExhausted, "sequence shorter than the stage count");
  double s = 0.0;
  for (unsigned j = 1; j <= J; ++j) s += std::exp(-seq.log_mu(j));
  // a hair under 1/16 keeps the plateau strictly over [-1, 1] after rounding
  const double fit = (1.0 - 1e-12) / (16.0 * s);
  BumpBuild out;
  out.delta = opt.delta > 0 ? opt.delta : fit;
  while (out.delta > fit) {
    if (!opt.auto_halve) {
      std::ostringstream os;
      os << "delta " << out.delta << " puts the radius sum above 1/16 (largest fit " << fit << ")";
      throw Error(ErrorKind::StageOverflow, os.str());
    }
    out.delta *= 0.5;
    ++out.halvings;
  }
  std::vector<double> radii(J);
  double sum = 0.0;
  for (unsigned j = 1; j <= J; ++j) sum += radii[j - 1] = out.delta * std::exp(-seq.log_mu(j));
  out.bump = Bump1D(1.125 - sum, std::move(radii));
  return out;
}

PartitionOfUnity::PartitionOfUnity(std::shared_ptr<const CubeDecomposition> dec, BumpBuild bump,
                                   unsigned order_cap)
    : dec_(std::move(dec)), bump_(std::move(bump)), order_cap_(order_cap) {
  if (bump_.bump.stages() < order_cap_ + 1)
    throw Error(ErrorKind::StageOverflow, "bump smoothness below order_cap + 1");
}

PartitionOfUnity build_pou(const CubeDecomposition& dec, const WeightSequence& seq, const BumpOptions& opt) {
  return PartitionOfUnity(std::make_shared<const CubeDecomposition>(dec), build_bump(seq, opt), opt.order_cap);
}

double PartitionOfUnity::psi(std::size_t i, const Point& x) const {
  const Cube& q = dec_->cubes[i];
  const double R = 0.5 * q.side;
  double v = 1.0;
  for (unsigned k = 0; k < dec_->dim; ++k) v *= bump_.bump.eval((x[k] - q.center[k]) / R);
  return v;
}

TruncatedJet PartitionOfUnity::psi_jet(std::size_t i, const Point& x, unsigned order) const {
  if (order > order_cap_) throw Error(ErrorKind::OrderCapExceeded, "jet order above the partition order cap");
  const unsigned n = dec_->dim;
  const Cube& q = dec_->cubes[i];
  const double R = 0.5 * q.side;
  std::vector<double> axis[2];
  for (unsigned k = 0; k < n; ++k) {
    axis[k] = bump_.bump.taylor((x[k] - q.center[k]) / R, order);
    double s = 1.0;
    for (unsigned j = 0; j <= order; ++j, s /= R) axis[k][j] *= s;
  }
  TruncatedJet jet(n, order);
  for (const auto& b : multi_indices(n, order)) {
    double v = axis[0][b.a[0]];
    if (n == 2) v *= axis[1][b.a[1]];
    jet.coef(b) = v;
  }
  return jet;
}

PartitionOfUnity::JetsWithSum PartitionOfUnity::jets_with_sum(const Point& x, unsigned order) const {
  const unsigned n = dec_->dim;
  JetsWithSum out;
  TruncatedJet rest = TruncatedJet::constant(n, order, 1.0);
  for (auto i : dec_->covering(x)) {
    TruncatedJet p = psi_jet(i, x, order);
    out.phi.emplace_back(i, p * rest);
    p *= -1.0;
    p.coef(MultiIndex{}) += 1.0;
    rest = rest * p;
  }
  rest *= -1.0;
  rest.coef(MultiIndex{}) += 1.0;
  out.sum = std::move(rest);
  return out;
}

std::vector<std::pair<std::size_t, TruncatedJet>> PartitionOfUnity::jets(const Point& x, unsigned order) const {
  return jets_with_sum(x, order).phi;
}

std::vector<std::pair<std::size_t, double>> PartitionOfUnity::values(const Point& x) const {
  std::vector<std::pair<std::size_t, double>> out;
  double rest = 1.0;
  for (auto i : dec_->covering(x)) {
    const double p = psi(i, x);
    if (p != 0.0) out.emplace_back(i, p * rest);
    rest *= 1.0 - p;
  }
  return out;
}

double PartitionOfUnity::phi(std::size_t i, const Point& x) const {
  for (const auto& [j, v] : values(x))
    if (j == i) return v;
  return 0.0;
}

double PartitionOfUnity::phi_derivative(std::size_t i, const Point& x, const MultiIndex& beta) const {
  for (const auto& [j, jet] : jets(x, beta.order()))
    if (j == i) return jet.derivative(beta);
  return 0.0;
}

TruncatedJet PartitionOfUnity::psi_majorant(std::size_t i, unsigned order) const {
  const unsigned n = dec_->dim;
  const double R = 0.5 * dec_->cubes[i].side;
  TruncatedJet m(n, order);
  for (const auto& b : multi_indices(n, order)) {
    double v = 1.0;
    for (unsigned k = 0; k < n; ++k) v *= bump_.bump.bound(b.a[k]) * std::pow(R, -double(b.a[k]));
    m.coef(b) = v / b.factorial();
  }
  return m;
}

double PartitionOfUnity::psi_bound(std::size_t i, const MultiIndex& beta) const {
  return psi_majorant(i, beta.order()).derivative(beta);
}

double PartitionOfUnity::phi_bound(std::size_t i, const MultiIndex& beta) const {
  const unsigned order = beta.order();
  TruncatedJet m = psi_majorant(i, order);
  for (auto k : dec_->neighbors[i]) {
    if (k >= i) break;
    m = m * psi_majorant(k, order);  // |1 - psi_k| <= 1 matches the zeroth majorant coefficient
  }
  return m.derivative(beta);
}

}  // namespace ultrajet
