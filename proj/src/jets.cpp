#include "ultrajet/jets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ultrajet/error.hpp"
#include "ultrajet/numeric.hpp"

namespace ultrajet {

double distance(const Point& a, const Point& b, unsigned n) {
  return n == 1 ? std::fabs(a[0] - b[0]) : std::hypot(a[0] - b[0], a[1] - b[1]);
}

double MultiIndex::factorial() const { return std::tgamma(a[0] + 1.0) * std::tgamma(a[1] + 1.0); }

std::size_t multi_count(unsigned n, unsigned order) {
  return n == 1 ? order + 1 : std::size_t(order + 1) * (order + 2) / 2;
}

std::size_t multi_position(unsigned n, const MultiIndex& alpha) {
  if (n == 1) return alpha.a[0];
  const std::size_t o = alpha.order();
  return o * (o + 1) / 2 + alpha.a[1];
}

std::vector<MultiIndex> multi_indices(unsigned n, unsigned order) {
  std::vector<MultiIndex> out;
  for (unsigned o = 0; o <= order; ++o) {
    if (n == 1) {
      out.push_back({{o, 0}});
      continue;
    }
    for (unsigned j = 0; j <= o; ++j) out.push_back({{o - j, j}});
  }
  return out;
}

// ---------------------------------------------------------------------------

TruncatedJet::TruncatedJet(unsigned n, unsigned order) : n_(n), order_(order), c_(multi_count(n, order), 0.0) {
  if (n != 1 && n != 2) throw Error(ErrorKind::InvariantViolation, "dimension must be 1 or 2");
}

TruncatedJet TruncatedJet::constant(unsigned n, unsigned order, double c) {
  TruncatedJet j(n, order);
  j.c_[0] = c;
  return j;
}

TruncatedJet& TruncatedJet::operator+=(const TruncatedJet& o) {
  if (o.n_ != n_ || o.order_ != order_) throw Error(ErrorKind::InvariantViolation, "jet shape mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TruncatedJet& TruncatedJet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

TruncatedJet operator*(const TruncatedJet& a, const TruncatedJet& b) {
  if (a.n_ != b.n_ || a.order_ != b.order_) throw Error(ErrorKind::InvariantViolation, "jet shape mismatch");
  TruncatedJet r(a.n_, a.order_);
  const unsigned P = a.order_;
  if (a.n_ == 1) {
    for (unsigned i = 0; i <= P; ++i) {
      if (a.c_[i] == 0.0) continue;
      for (unsigned j = 0; i + j <= P; ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return r;
  }
  // 2D: index (o, j) <-> alpha = (o - j, j)
  for (unsigned oa = 0; oa <= P; ++oa)
    for (unsigned ja = 0; ja <= oa; ++ja) {
      const double av = a.c_[oa * (oa + 1) / 2 + ja];
      if (av == 0.0) continue;
      for (unsigned ob = 0; oa + ob <= P; ++ob) {
        const unsigned o = oa + ob;
        const std::size_t base = std::size_t(o) * (o + 1) / 2 + ja;
        const std::size_t bb = std::size_t(ob) * (ob + 1) / 2;
        for (unsigned jb = 0; jb <= ob; ++jb) r.c_[base + jb] += av * b.c_[bb + jb];
      }
    }
  return r;
}

// ---------------------------------------------------------------------------

struct JetPreset::Node {
  enum Kind { Sin, Exp, Runge, Poly, Sum, Product } kind;
  double a = 0, b = 0;
  unsigned axis = 0;
  std::vector<std::pair<double, MultiIndex>> terms;
  std::shared_ptr<const Node> l, r;
};

namespace {

using NodeP = std::shared_ptr<const JetPreset::Node>;

// Univariate Taylor coefficients of a leaf at u.
std::vector<double> leaf_series(const JetPreset::Node& n, double u, unsigned order) {
  std::vector<double> c(order + 1, 0.0);
  switch (n.kind) {
    case JetPreset::Node::Sin: {
      double fact = 1.0, pw = 1.0;
      for (unsigned k = 0; k <= order; ++k) {
        if (k > 0) {
          fact *= k;
          pw *= n.a;
        }
        // d^k sin(a u + b) = a^k sin(a u + b + k pi/2)
        const double ph = n.a * u + n.b;
        const double s = (k % 4 == 0) ? std::sin(ph) : (k % 4 == 1) ? std::cos(ph) : (k % 4 == 2) ? -std::sin(ph) : -std::cos(ph);
        c[k] = pw * s / fact;
      }
      break;
    }
    case JetPreset::Node::Exp: {
      double v = std::exp(n.a * u);
      for (unsigned k = 0; k <= order; ++k) {
        c[k] = v;
        v *= n.a / (k + 1);
      }
      break;
    }
    case JetPreset::Node::Runge: {
      // (1 + c x^2) f = 1 around u: g0 + g1 h + g2 h^2
      const double g0 = 1 + n.a * u * u, g1 = 2 * n.a * u, g2 = n.a;
      for (unsigned k = 0; k <= order; ++k) {
        double s = (k == 0) ? 1.0 : 0.0;
        if (k >= 1) s -= g1 * c[k - 1];
        if (k >= 2) s -= g2 * c[k - 2];
        c[k] = s / g0;
      }
      break;
    }
    default:
      break;
  }
  return c;
}

double binom(unsigned n, unsigned k) {
  double r = 1.0;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

TruncatedJet node_taylor(const JetPreset::Node& nd, const Point& x0, unsigned n, unsigned order) {
  using K = JetPreset::Node;
  TruncatedJet j(n, order);
  switch (nd.kind) {
    case K::Sin:
    case K::Exp:
    case K::Runge: {
      if (nd.axis >= n) throw Error(ErrorKind::InvariantViolation, "preset axis outside the dimension");
      const auto c = leaf_series(nd, x0[nd.axis], order);
      for (unsigned k = 0; k <= order; ++k) {
        MultiIndex m;
        m.a[nd.axis] = k;
        j.coef(m) = c[k];
      }
      return j;
    }
    case K::Poly: {
      for (const auto& [coef, alpha] : nd.terms) {
        if (n == 1 && alpha.a[1] != 0) throw Error(ErrorKind::InvariantViolation, "poly term uses a missing axis");
        for (unsigned g0 = 0; g0 <= alpha.a[0]; ++g0)
          for (unsigned g1 = 0; g1 <= alpha.a[1]; ++g1) {
            if (g0 + g1 > order) continue;
            const double v = coef * binom(alpha.a[0], g0) * std::pow(x0[0], double(alpha.a[0] - g0)) *
                             binom(alpha.a[1], g1) * std::pow(x0[1], double(alpha.a[1] - g1));
            j.coef({{g0, g1}}) += v;
          }
      }
      return j;
    }
    case K::Sum:
      return node_taylor(*nd.l, x0, n, order) + node_taylor(*nd.r, x0, n, order);
    case K::Product:
      return node_taylor(*nd.l, x0, n, order) * node_taylor(*nd.r, x0, n, order);
  }
  return j;
}

double node_eval(const JetPreset::Node& nd, const Point& x) {
  using K = JetPreset::Node;
  switch (nd.kind) {
    case K::Sin:
      return std::sin(nd.a * x[nd.axis] + nd.b);
    case K::Exp:
      return std::exp(nd.a * x[nd.axis]);
    case K::Runge:
      return 1.0 / (1.0 + nd.a * x[nd.axis] * x[nd.axis]);
    case K::Poly: {
      double s = 0.0;
      for (const auto& [c, al] : nd.terms) s += c * std::pow(x[0], double(al.a[0])) * std::pow(x[1], double(al.a[1]));
      return s;
    }
    case K::Sum:
      return node_eval(*nd.l, x) + node_eval(*nd.r, x);
    case K::Product:
      return node_eval(*nd.l, x) * node_eval(*nd.r, x);
  }
  return 0.0;
}

std::string node_label(const JetPreset::Node& nd) {
  using K = JetPreset::Node;
  std::ostringstream o;
  o.precision(17);
  const char* var = nd.axis == 0 ? "x" : "y";
  switch (nd.kind) {
    case K::Sin:
      o << "sin(" << nd.a << "*" << var << "+" << nd.b << ")";
      break;
    case K::Exp:
      o << "exp(" << nd.a << "*" << var << ")";
      break;
    case K::Runge:
      o << "1/(1+" << nd.a << "*" << var << "^2)";
      break;
    case K::Poly: {
      o << "poly(";
      for (std::size_t i = 0; i < nd.terms.size(); ++i)
        o << (i ? "+" : "") << nd.terms[i].first << "*x^" << nd.terms[i].second.a[0] << "*y^"
          << nd.terms[i].second.a[1];
      o << ")";
      break;
    }
    case K::Sum:
      o << "(" << node_label(*nd.l) << "+" << node_label(*nd.r) << ")";
      break;
    case K::Product:
      o << "(" << node_label(*nd.l) << "*" << node_label(*nd.r) << ")";
      break;
  }
  return o.str();
}

int node_degree(const JetPreset::Node& nd) {
  using K = JetPreset::Node;
  switch (nd.kind) {
    case K::Poly: {
      int d = 0;
      for (const auto& t : nd.terms)
        if (t.first != 0.0) d = std::max(d, int(t.second.order()));
      return d;
    }
    case K::Sum:
    case K::Product: {
      const int a = node_degree(*nd.l), b = node_degree(*nd.r);
      if (a < 0 || b < 0) return -1;
      return nd.kind == K::Sum ? std::max(a, b) : a + b;
    }
    default:
      return -1;
  }
}

}  // namespace

JetPreset JetPreset::sin(double a, double b, unsigned axis) {
  JetPreset j;
  j.root_ = std::make_shared<Node>(Node{Node::Sin, a, b, axis, {}, nullptr, nullptr});
  return j;
}
JetPreset JetPreset::exp(double a, unsigned axis) {
  JetPreset j;
  j.root_ = std::make_shared<Node>(Node{Node::Exp, a, 0, axis, {}, nullptr, nullptr});
  return j;
}
JetPreset JetPreset::runge(double c, unsigned axis) {
  if (!(c > 0)) throw Error(ErrorKind::InvariantViolation, "runge needs c > 0");
  JetPreset j;
  j.root_ = std::make_shared<Node>(Node{Node::Runge, c, 0, axis, {}, nullptr, nullptr});
  return j;
}
JetPreset JetPreset::poly(std::vector<std::pair<double, MultiIndex>> terms) {
  JetPreset j;
  j.root_ = std::make_shared<Node>(Node{Node::Poly, 0, 0, 0, std::move(terms), nullptr, nullptr});
  return j;
}
JetPreset JetPreset::poly1(std::vector<double> coeffs, unsigned axis) {
  std::vector<std::pair<double, MultiIndex>> t;
  for (unsigned k = 0; k < coeffs.size(); ++k) {
    MultiIndex m;
    m.a[axis] = k;
    t.push_back({coeffs[k], m});
  }
  return poly(std::move(t));
}
JetPreset JetPreset::zero() { return poly({}); }

JetPreset operator+(const JetPreset& a, const JetPreset& b) {
  JetPreset j;
  j.root_ = std::make_shared<JetPreset::Node>(JetPreset::Node{JetPreset::Node::Sum, 0, 0, 0, {}, a.root_, b.root_});
  return j;
}
JetPreset operator*(const JetPreset& a, const JetPreset& b) {
  JetPreset j;
  j.root_ =
      std::make_shared<JetPreset::Node>(JetPreset::Node{JetPreset::Node::Product, 0, 0, 0, {}, a.root_, b.root_});
  return j;
}

double JetPreset::operator()(const Point& x) const { return node_eval(*root_, x); }
TruncatedJet JetPreset::taylor(const Point& x0, unsigned n, unsigned order) const {
  return node_taylor(*root_, x0, n, order);
}
std::string JetPreset::label() const { return node_label(*root_); }
int JetPreset::poly_degree() const { return node_degree(*root_); }

// ---------------------------------------------------------------------------

CompactSet CompactSet::make(unsigned dim, std::vector<Point> points, Box box) {
  if (dim != 1 && dim != 2) throw Error(ErrorKind::InvariantViolation, "dimension must be 1 or 2");
  if (points.empty()) throw Error(ErrorKind::InvariantViolation, "compact set is empty");
  for (auto& p : points) {
    if (dim == 1) p[1] = 0.0;
    for (unsigned i = 0; i < dim; ++i)
      if (!(p[i] >= box.lo[i] && p[i] <= box.hi[i]))
        throw Error(ErrorKind::InvariantViolation, "point outside the bounding box");
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) throw Error(ErrorKind::InvariantViolation, "repeated point in compact set");
  if (dim == 1) box.lo[1] = box.hi[1] = 0.0;
  return CompactSet{dim, std::move(points), box};
}

double CompactSet::distance_to(const Point& x) const { return distance(x, points[nearest(x)], dim); }

std::size_t CompactSet::nearest(const Point& x) const {
  std::size_t best = 0;
  double bd = INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = distance(x, points[i], dim);
    if (d < bd || (d == bd && points[i] < points[best])) {
      bd = d;
      best = i;
    }
  }
  return best;
}

double Ultrajet::value(std::size_t point, const MultiIndex& alpha) const {
  if (alpha.order() > order_cap)
    throw Error(ErrorKind::OrderCapExceeded, "derivative order beyond the jet's order cap");
  return values[point][multi_position(set.dim, alpha)];
}

Ultrajet jet_from_preset(const JetPreset& preset, const CompactSet& set, unsigned order_cap) {
  Ultrajet J;
  J.set = set;
  J.order_cap = order_cap;
  J.label = preset.label();
  const auto idx = multi_indices(set.dim, order_cap);
  for (const auto& p : set.points) {
    const auto t = preset.taylor(p, set.dim, order_cap);
    std::vector<double> v(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) v[i] = idx[i].factorial() * t.coefs()[i];
    J.values.push_back(std::move(v));
  }
  return J;
}

double taylor(const Ultrajet& jet, std::size_t a_index, unsigned p, const MultiIndex& alpha, const Point& x) {
  if (p > jet.order_cap) throw Error(ErrorKind::OrderCapExceeded, "Taylor degree beyond the jet's order cap");
  if (alpha.order() > p) return 0.0;
  const unsigned n = jet.set.dim;
  const Point& a = jet.set.points[a_index];
  const double h0 = x[0] - a[0], h1 = n == 2 ? x[1] - a[1] : 0.0;
  double s = 0.0;
  for (const auto& beta : multi_indices(n, p)) {
    if (!alpha.leq(beta)) continue;
    const MultiIndex g = beta - alpha;
    s += jet.values[a_index][multi_position(n, beta)] * std::pow(h0, double(g.a[0])) *
         std::pow(h1, double(g.a[1])) / g.factorial();
  }
  return s;
}

TruncatedJet taylor_jet(const Ultrajet& jet, std::size_t a_index, unsigned p, const Point& x, unsigned order,
                        unsigned from) {
  if (p > jet.order_cap) throw Error(ErrorKind::OrderCapExceeded, "Taylor degree beyond the jet's order cap");
  const unsigned n = jet.set.dim;
  TruncatedJet out(n, order);
  const Point& a = jet.set.points[a_index];
  const double h[2] = {x[0] - a[0], n == 2 ? x[1] - a[1] : 0.0};
  // powers h_i^k / k!
  std::vector<double> q0(p + 1), q1(p + 1);
  q0[0] = q1[0] = 1.0;
  for (unsigned k = 1; k <= p; ++k) {
    q0[k] = q0[k - 1] * h[0] / k;
    q1[k] = q1[k - 1] * h[1] / k;
  }
  const auto& F = jet.values[a_index];
  for (const auto& g : multi_indices(n, std::min(order, p))) {
    double s = 0.0;
    for (const auto& beta : multi_indices(n, p)) {
      if (!g.leq(beta) || beta.order() < from) continue;
      const MultiIndex d = beta - g;
      s += F[multi_position(n, beta)] * q0[d.a[0]] * (n == 2 ? q1[d.a[1]] : (d.a[1] == 0 ? 1.0 : 0.0));
    }
    out.coef(g) = s / g.factorial();
  }
  return out;
}

double remainder(const Ultrajet& jet, std::size_t a_index, unsigned p, const MultiIndex& alpha, std::size_t b_index) {
  if (p > jet.order_cap) throw Error(ErrorKind::OrderCapExceeded, "remainder degree beyond the jet's order cap");
  if (alpha.order() > p) throw Error(ErrorKind::InvariantViolation, "remainder needs |alpha| <= p");
  return jet.value(b_index, alpha) - taylor(jet, a_index, p, alpha, jet.set.points[b_index]);
}

CertifyResult certify(const Ultrajet& jet, const WeightSequence& seq, double rho, unsigned p_max) {
  if (p_max > jet.order_cap) throw Error(ErrorKind::OrderCapExceeded, "P_max beyond the jet's order cap");
  if (seq.k_max() < std::max(p_max + 1, jet.order_cap))
    throw Error(ErrorKind::RangeExhausted, "sequence too short for the certificate");
  if (!(rho > 0)) throw Error(ErrorKind::InvariantViolation, "rho must be positive");
  const unsigned n = jet.set.dim;
  const std::size_t N = jet.set.points.size();
  const double lr = std::log(rho);
  const auto all = multi_indices(n, jet.order_cap);

  struct Best {
    double v = -INFINITY;
    Binding at;
    double f = -INFINITY;
    Binding f_at;
  };
  const auto bump = [](double& v, Binding& at, double cand, const Binding& b) {
    if (cand > v) {
      v = cand;
      at = b;
    }
  };
  std::vector<Best> per(N);
  parallel_for(N, [&](std::size_t a) {
    Best& B = per[a];
    for (const auto& al : all) {
      const double x = std::fabs(jet.value(a, al));
      if (x == 0.0) continue;
      const double c = std::log(x) - al.order() * lr - seq.log_M(al.order());
      const Binding bd{1, a, a, 0, al};
      bump(B.v, B.at, c, bd);
      bump(B.f, B.f_at, c, bd);
    }
    for (std::size_t b = 0; b < N; ++b) {
      if (b == a) continue;
      const double ld = std::log(distance(jet.set.points[a], jet.set.points[b], n));
      for (unsigned p = 0; p <= p_max; ++p)
        for (const auto& al : multi_indices(n, p)) {
          const double r = std::fabs(remainder(jet, a, p, al, b));
          if (r == 0.0) continue;
          const unsigned gap = p + 1 - al.order();
          const double base = std::log(r) - (p + 1) * lr - gap * ld;
          const Binding bd{2, a, b, p, al};
          bump(B.v, B.at, base - seq.log_M(p + 1) + std::lgamma(gap + 1.0), bd);
          bump(B.f, B.f_at, base - std::lgamma(al.order() + 1.0) - seq.log_m(p + 1), bd);
        }
    }
  });
  CertifyResult res;
  res.p_max = p_max;
  double v = -INFINITY, f = -INFINITY;
  for (const auto& B : per) {
    bump(v, res.binding, B.v, B.at);
    bump(f, res.binding_factorial_form, B.f, B.f_at);
  }
  res.C = std::exp(v);
  res.C_factorial_form = std::exp(f);
  res.ok = std::isfinite(res.C);
  return res;
}

}  // namespace ultrajet
