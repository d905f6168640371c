#include "ultrajet/extend.hpp"

#include <algorithm>
#include <functional>
#include <thread>
#include <cmath>
#include <random>
#include <sstream>

#include "ultrajet/error.hpp"

namespace ultrajet {

namespace {

DegreeSchedule fill(std::shared_ptr<const CubeDecomposition> dec, std::shared_ptr<const WeightSequence> seq,
                    double L, unsigned cap, bool matrix) {
  if (!(L > 0)) throw Error(ErrorKind::InvariantViolation, "L must be positive");
  DegreeSchedule s;
  s.dec = std::move(dec);
  s.seq = std::move(seq);
  s.L = L;
  s.degree_cap = cap;
  s.matrix_mode = matrix;
  const std::size_t N = s.dec->cubes.size();
  s.p.resize(N);
  s.uncapped.resize(N);
  s.capped.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    bool c = false;
    s.p[i] = s.degree_at(s.dec->cubes[i].d_center, &c);
    s.capped[i] = c;
    const double t = L * s.dec->cubes[i].d_center;
    try {
      s.uncapped[i] = 2 * static_cast<unsigned>(gamma_bar(s.seq->view(ViewKind::m), t));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RangeExhausted) throw;
      s.uncapped[i] = 2 * static_cast<unsigned>(s.seq->k_max());
    }
  }
  return s;
}

MultiIndex unit(unsigned axis) { return axis == 0 ? MultiIndex{{1, 0}} : MultiIndex{{0, 1}}; }

}  // namespace

std::size_t DegreeSchedule::capped_count() const {
  return static_cast<std::size_t>(std::count(capped.begin(), capped.end(), true));
}

unsigned DegreeSchedule::degree_at(double d, bool* was_capped) const {
  unsigned u;
  if (!(d > 0)) {
    u = 2 * static_cast<unsigned>(seq->k_max());
  } else {
    try {
      u = 2 * static_cast<unsigned>(gamma_bar(seq->view(ViewKind::m), L * d));
    } catch (const Error& e) {
      // the infimum sits at K_max: Gbar is at least K_max, far above any jet order
      if (e.kind() != ErrorKind::RangeExhausted || degree_cap > 2 * seq->k_max()) throw;
      u = 2 * static_cast<unsigned>(seq->k_max());
    }
  }
  if (was_capped) *was_capped = u > degree_cap;
  return std::min(u, degree_cap);
}

DegreeSchedule schedule(std::shared_ptr<const CubeDecomposition> dec, const WeightSequence& seq, double L,
                        unsigned degree_cap) {
  if (!seq.flags().moderate_growth)
    throw Error(ErrorKind::InvariantViolation, "single-sequence mode needs moderate growth of '" + seq.label() + "'");
  return fill(std::move(dec), std::make_shared<const WeightSequence>(seq), L, degree_cap, false);
}

DegreeSchedule schedule(std::shared_ptr<const CubeDecomposition> dec, const WeightMatrix& matrix,
                        const ChainCertificate& chain, double L, unsigned degree_cap) {
  return fill(std::move(dec), std::make_shared<const WeightSequence>(matrix.row(chain.y3)), L, degree_cap, true);
}

ExtensionField::ExtensionField(Ultrajet jet, PartitionOfUnity pou, DegreeSchedule sched)
    : jet_(std::move(jet)), pou_(std::move(pou)), sched_(std::move(sched)) {
  if (sched_.dec.get() != pou_.decomposition_ptr().get())
    throw Error(ErrorKind::IncompatibleGeometry, "schedule and partition use different decompositions");
  if (jet_.set.dim != pou_.decomposition().dim || jet_.set.points != pou_.decomposition().set.points)
    throw Error(ErrorKind::IncompatibleGeometry, "jet and decomposition use different compact sets");
  if (sched_.degree_cap > jet_.order_cap)
    throw Error(ErrorKind::OrderCapExceeded, "degree cap above the jet's order cap");
}

ExtensionField extend(Ultrajet jet, PartitionOfUnity pou, DegreeSchedule sched) {
  return ExtensionField(std::move(jet), std::move(pou), std::move(sched));
}

unsigned ExtensionField::max_order() const { return std::min(jet_.order_cap, pou_.order_cap()); }

ExtensionField::Value ExtensionField::eval(const Point& x, unsigned order) const {
  if (order > max_order()) throw Error(ErrorKind::OrderCapExceeded, "derivative order above the field's cap");
  const unsigned n = jet_.set.dim;
  Value out;
  const std::size_t near = jet_.set.nearest(x);
  if (distance(x, jet_.set.points[near], n) == 0.0) {
    out.on_set = true;
    out.jet = TruncatedJet(n, order);
    for (const auto& a : multi_indices(n, order)) out.jet.coef(a) = jet_.value(near, a) / a.factorial();
    return out;
  }
  const auto& dec = pou_.decomposition();
  const Location loc = dec.locate(x);
  out.collar = loc.kind == Location::Collar;
  out.outside = loc.kind == Location::Outside;
  const auto pj = pou_.jets_with_sum(x, order);
  out.jet = TruncatedJet(n, order);
  if (pj.phi.empty()) return out;

  // f = S T_c + sum phi_i (T_i - T_c); equal Taylor data cancels exactly
  const std::size_t c = loc.kind == Location::Cube ? loc.index : pj.phi.front().first;
  const std::size_t ac = dec.cubes[c].nearest;
  const unsigned pc = sched_.p[c];
  const TruncatedJet Tc = taylor_jet(jet_, ac, pc, x, order);
  out.jet = pj.sum * Tc;
  for (const auto& [i, phi] : pj.phi) {
    out.capped = out.capped || sched_.capped[i];
    const std::size_t ai = dec.cubes[i].nearest;
    const unsigned pi = sched_.p[i];
    if (ai == ac && pi == pc) continue;
    TruncatedJet diff;
    if (ai == ac) {
      diff = taylor_jet(jet_, ai, std::max(pi, pc), x, order, std::min(pi, pc) + 1);
      if (pi < pc) diff *= -1.0;
    } else {
      diff = taylor_jet(jet_, ai, pi, x, order);
      TruncatedJet neg = Tc;
      neg *= -1.0;
      diff += neg;
    }
    out.jet += phi * diff;
  }
  return out;
}

double ExtensionField::derivative(const Point& x, const MultiIndex& alpha) const {
  return eval(x, alpha.order()).jet.derivative(alpha);
}

bool VerifyReport::residuals_ok() const {
  for (const auto& r : residuals)
    if (!r.monotone || !r.fit_ok) return false;
  return true;
}

GrowthCertificate growth_certificate(const ExtensionField& field, const WeightSequence& target, unsigned max_order,
                                     std::size_t per_axis, unsigned workers) {
  const auto& dec = field.decomposition();
  const unsigned n = dec.dim;
  max_order = std::min(max_order, field.max_order());
  GrowthCertificate g;
  g.max_order = max_order;
  g.sup.assign(max_order + 1, 0.0);
  const auto alphas = multi_indices(n, max_order);
  per_axis = std::max<std::size_t>(per_axis, 2);
  const std::size_t total = n == 1 ? per_axis : per_axis * per_axis;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(total, 256))));
  struct Part {
    std::vector<double> sup;
    std::size_t collar = 0;
  };
  std::vector<Part> parts(workers, Part{std::vector<double>(max_order + 1, 0.0), 0});
  auto work = [&](unsigned w) {
    Part& pt = parts[w];
    for (std::size_t idx = total * w / workers; idx < total * (w + 1) / workers; ++idx) {
      Point x{0, 0};
      const std::size_t ix = idx % per_axis, iy = idx / per_axis;
      x[0] = dec.box.lo[0] + (dec.box.hi[0] - dec.box.lo[0]) * double(ix) / double(per_axis - 1);
      if (n == 2) x[1] = dec.box.lo[1] + (dec.box.hi[1] - dec.box.lo[1]) * double(iy) / double(per_axis - 1);
      const auto v = field.eval(x, max_order);
      if (v.collar) {
        ++pt.collar;
        continue;
      }
      for (const auto& a : alphas) pt.sup[a.order()] = std::max(pt.sup[a.order()], std::abs(v.jet.derivative(a)));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& pt : parts) {
    g.collar_points += pt.collar;
    for (unsigned k = 0; k <= max_order; ++k) g.sup[k] = std::max(g.sup[k], pt.sup[k]);
  }
  g.grid_points = total;
  if (g.sup[0] > 0) {
    for (unsigned k = 1; k <= max_order; ++k) {
      const double lw = target.log_M(k) - target.log_M(0);
      g.M1 = std::max(g.M1, std::exp((std::log(g.sup[k] / g.sup[0]) - lw) / k));
    }
    if (g.M1 == 0.0) g.M1 = 1.0;  // every derivative vanished
    g.C = g.sup[0] / g.M1;
  }
  return g;
}

VerifyReport verify(const ExtensionField& field, const WeightSequence& target, const WeightSequence& source,
                    const VerifyOptions& opt) {
  VerifyReport rep;
  const auto& dec = field.decomposition();
  const auto& jet = field.jet();
  const auto& sched = field.schedule();
  const unsigned n = dec.dim;
  const unsigned top = field.max_order();
  std::vector<double> scales = opt.approach_scales;
  if (scales.empty())
    for (int j = 3; j <= 10; ++j) scales.push_back(std::ldexp(1.0, -j));
  std::sort(scales.begin(), scales.end(), std::greater<>());

  std::vector<MultiIndex> alphas;
  for (const auto& a : multi_indices(n, top))
    if (std::find(opt.orders.begin(), opt.orders.end(), a.order()) != opt.orders.end()) alphas.push_back(a);
  unsigned need = 0;
  for (const auto& a : alphas) need = std::max(need, a.order());

  std::vector<Point> dirs;
  if (n == 1) {
    dirs = {{1, 0}, {-1, 0}};
  } else {
    for (int k = 0; k < 16; ++k) dirs.push_back({std::cos(k * M_PI / 8), std::sin(k * M_PI / 8)});
  }
  const double thetas[] = {1.0, 1.0625, 1.125, 1.1875, 1.25};

  // residual tables and spot checks share the sampled points
  for (std::size_t a = 0; a < jet.set.points.size(); ++a) {
    const Point& pa = jet.set.points[a];
    std::vector<ResidualRow> rows(alphas.size());
    for (std::size_t r = 0; r < alphas.size(); ++r) {
      rows[r].a = a;
      rows[r].alpha = alphas[r];
    }
    for (double d : scales) {
      std::vector<double> worst(alphas.size(), 0.0);
      bool capped = false;
      std::size_t used = 0;
      for (const auto& u : dirs)
        for (double th : thetas) {
          const Point x{pa[0] + th * d * u[0], pa[1] + th * d * u[1]};
          if (jet.set.nearest(x) != a || dec.locate(x).kind != Location::Cube) continue;
          const auto v = field.eval(x, need);
          capped = capped || v.capped;
          ++used;
          const double dx = distance(x, pa, n);
          bool pcap = false;
          const unsigned p = sched.degree_at(dx, &pcap);
          const auto T = taylor_jet(jet, a, p, x, need);
          for (std::size_t r = 0; r < alphas.size(); ++r) {
            const auto& al = alphas[r];
            const double Fa = jet.value(a, al);
            worst[r] = std::max(worst[r], std::abs(v.jet.derivative(al) - Fa));
            const unsigned k = al.order();
            const double lead = (k + 1) * std::log(2 * sched.L);
            const double t = std::abs(T.derivative(al));
            if (t > 0)
              rep.spot.C_taylor_bound = std::max(rep.spot.C_taylor_bound, std::exp(std::log(t) - lead - source.log_M(k)));
            const double res = std::abs(T.derivative(al) - Fa);
            if (res > 0 && k + 1 <= source.k_max())
              rep.spot.C_taylor_residual =
                  std::max(rep.spot.C_taylor_residual,
                           std::exp(std::log(res) - lead - std::lgamma(k + 1.0) - source.log_m(k + 1) - std::log(dx)));
            ++rep.spot.samples;
          }
        }
      if (used == 0) {
        std::ostringstream os;
        os << "no sample points at distance " << d << " from point " << a;
        rep.warnings.push_back(os.str());
        continue;
      }
      for (std::size_t r = 0; r < alphas.size(); ++r) {
        rows[r].d.push_back(d);
        rows[r].residual.push_back(worst[r]);
        rows[r].capped.push_back(capped);
      }
    }
    for (auto& row : rows) {
      // rounding-level values count as equal; a flat row is not decreasing
      const auto& res = row.residual;
      const double top_r = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
      const double noise = 1e-12 * top_r;
      unsigned inversions = 0;
      bool big = false;
      for (std::size_t k = 1; k < res.size(); ++k)
        if (res[k] > res[k - 1] + noise) {
          ++inversions;
          big = big || res[k] > 1.1 * res[k - 1] + noise;
        }
      const bool exact = top_r == 0.0;
      row.monotone = exact || (res.size() > 1 && inversions <= 1 && !big && res.back() < res.front() - noise);
      // C' (h(K d) + d) over K = 2^j
      double bestC = INFINITY, bestK = 0.0;
      for (int j = -10; j <= 20; ++j) {
        const double K = std::ldexp(1.0, j);
        double C = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < row.d.size() && ok; ++k) {
          double h;
          try {
            h = h_assoc(sched.seq->view(ViewKind::m), K * row.d[k]).value;
          } catch (const Error&) {
            ok = false;
            break;
          }
          C = std::max(C, row.residual[k] / (h + row.d[k]));
        }
        if (ok && C < bestC) {
          bestC = C;
          bestK = K;
        }
      }
      row.fit_C = bestC;
      row.fit_K = bestK;
      row.fit_ok = std::isfinite(bestC) && bestC <= opt.fit_cap;
      rep.residuals.push_back(std::move(row));
    }
  }

  rep.growth = growth_certificate(field, target, opt.growth_order, opt.growth_grid, opt.workers);
  if (sched.capped_count() > 0) {
    std::ostringstream os;
    os << sched.capped_count() << " of " << sched.p.size() << " cube degrees capped at " << sched.degree_cap;
    rep.warnings.push_back(os.str());
  }

  // exact derivatives against sixth-order central differences of one order lower
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> ux(dec.box.lo[0], dec.box.hi[0]), uy(dec.box.lo[1], dec.box.hi[1]);
  const unsigned fd_top = std::min(opt.fd_order, top);
  const double rho_min = field.pou().bump().radii().back();
  // orders that vanish up to rounding on the growth grid have no meaningful relative error
  // (once one order vanishes, every higher one does too)
  const auto& sup = rep.growth.sup;
  std::vector<bool> gone(fd_top + 1, false);
  double below = sup.empty() ? 0.0 : sup[0];
  for (unsigned k = 1; k <= fd_top && k < sup.size(); ++k) {
    gone[k] = gone[k - 1] || sup[k] <= 1e-6 * below;
    below = std::max(below, sup[k]);
    if (gone[k]) rep.fd.skipped_orders.push_back(k);
  }
  auto vanishes = [&](unsigned k) { return gone[k]; };
  for (std::size_t s = 0; s < opt.fd_points; ++s) {
    const Point x{ux(rng), n == 2 ? uy(rng) : 0.0};
    const auto cov = dec.covering(x);
    if (cov.empty()) continue;
    double side = INFINITY;
    for (auto i : cov) side = std::min(side, dec.cubes[i].side);
    const double h = 1e-2 * rho_min * 0.5 * side;
    const auto v = field.eval(x, fd_top);
    for (const auto& al : multi_indices(n, fd_top)) {
      if (al.order() == 0 || vanishes(al.order())) continue;
      const unsigned axis = al.a[0] > 0 ? 0 : 1;
      const MultiIndex b = al - unit(axis);
      auto g = [&](double off) {
        Point y = x;
        y[axis] += off;
        return field.derivative(y, b);
      };
      const double fd = (-g(-3 * h) + 9 * g(-2 * h) - 45 * g(-h) + 45 * g(h) - 9 * g(2 * h) + g(3 * h)) / (60 * h);
      const double ex = v.jet.derivative(al);
      const double floor = 1e-6 * std::max(rep.growth.sup.size() > al.order() ? rep.growth.sup[al.order()] : 0.0, 1e-300);
      const double rel = std::abs(ex - fd) / std::max({std::abs(ex), std::abs(fd), floor});
      if (rel > rep.fd.max_rel_error) {
        rep.fd.max_rel_error = rel;
        rep.fd.worst_point = x;
        rep.fd.worst_alpha = al;
      }
    }
    ++rep.fd.points;
  }
  return rep;
}

GuardedExtension extend_guarded(const Ultrajet& jet, const PartitionOfUnity& pou,
                                const std::function<DegreeSchedule(double)>& make_schedule,
                                const WeightSequence& source, double rho, double guard, const VerifyOptions& opt) {
  GuardedExtension out;
  const double L_max = std::ldexp(rho, 16);
  for (double L = guard * rho;; L *= 2, ++out.doublings) {
    auto sched = make_schedule(L);
    const auto target = sched.seq;
    ExtensionField field = extend(jet, pou, std::move(sched));
    out.report = verify(field, *target, source, opt);
    out.L = L;
    out.ok = out.report.residuals_ok();
    out.field.emplace(std::move(field));
    if (out.ok || 2 * L > L_max) break;
  }
  return out;
}

GuardedExtension extend_guarded(const Ultrajet& jet, const PartitionOfUnity& pou, const WeightSequence& seq,
                                const WeightSequence& source, double rho, double guard, const VerifyOptions& opt,
                                unsigned degree_cap) {
  const unsigned cap = degree_cap ? degree_cap : jet.order_cap;
  return extend_guarded(
      jet, pou, [&](double L) { return schedule(pou.decomposition_ptr(), seq, L, cap); }, source, rho, guard, opt);
}

}  // namespace ultrajet
