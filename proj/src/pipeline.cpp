#include "ultrajet/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include "ultrajet/error.hpp"
#include "ultrajet/report.hpp"

namespace ultrajet {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"seq", "fn", "matrix", "check", "cubes", "pou", "extend", "verify", "all"};
  return c;
}

namespace {

// f(begin, end, chunk) over contiguous chunks; the caller reduces chunk results in order.
void parallel_chunks(std::size_t total, unsigned workers, const std::function<void(std::size_t, std::size_t, unsigned)>& f) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, total))));
  if (workers == 1) {
    f(0, total, 0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(f, total * w / workers, total * (w + 1) / workers, w);
  for (auto& t : pool) t.join();
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  const int n = static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / n));
  return out;
}

class Context {
 public:
  Context(const ExperimentConfig& cfg, fs::path dir) : cfg(cfg), dir(std::move(dir)) {}

  const ExperimentConfig& cfg;
  fs::path dir;
  json verdicts = json::array(), certificates = json::array(), residuals = json::array();
  json warnings = json::array(), errors = json::array();
  json cube_stats = nullptr;
  std::vector<std::string> artifacts;
  bool failed = false;
  std::string stage;

  void verdict(const Verdict& v) {
    json j = to_json(v);
    j["stage"] = stage;
    verdicts.push_back(j);
    if (!v.holds) failed = true;
    if (v.holds) note_finite_range(v, v.condition);
  }
  void invariant(const std::string& name, bool holds, json witness) {
    verdicts.push_back({{"stage", stage},
                        {"condition", name},
                        {"holds", holds},
                        {"witness", std::move(witness)},
                        {"finite_range", false},
                        {"counterexample", nullptr},
                        {"notes", json::array()},
                        {"parts", json::array()}});
    if (!holds) failed = true;
  }
  void certificate(const std::string& name, json body) {
    body["name"] = name;
    body["stage"] = stage;
    certificates.push_back(std::move(body));
  }
  void warn(const std::string& msg, bool finite_range = false) {
    warnings.push_back({{"stage", stage}, {"message", msg}, {"finite_range", finite_range}});
    if (finite_range && cfg.strict) {
      failed = true;
      errors.push_back({{"stage", stage}, {"kind", "StrictFiniteRange"}, {"message", msg}});
    }
  }
  void error(const std::string& kind, const std::string& msg) {
    errors.push_back({{"stage", stage}, {"kind", kind}, {"message", msg}});
    failed = true;
  }
  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
    artifacts.push_back(name);
    return CsvWriter((dir / name).string(), header);
  }

  // shared inputs, built on first use
  const WeightSequence& seq() {
    if (!seq_) seq_.emplace(make_sequence(cfg.sequence, cfg.k_max));
    return *seq_;
  }
  const WeightFunction& fn() {
    if (!fn_) fn_.emplace(make_function(cfg.function, cfg.k_max));
    return *fn_;
  }
  const WeightMatrix& matrix() {
    if (!W_) W_.emplace(weight_matrix(fn(), cfg.x_grid, cfg.k_max));
    return *W_;
  }
  const ChainCertificate& chain() {
    if (!chain_) chain_ = resolve_chain(matrix(), cfg.chain_x, cfg.conditions);
    return *chain_;
  }
  std::shared_ptr<const CubeDecomposition> dec() {
    if (!dec_) {
      DecomposeOptions o;
      o.depth_cap = cfg.depth_cap;
      if (cfg.max_collar > 0) o.max_collar = cfg.max_collar;
      dec_ = std::make_shared<const CubeDecomposition>(decompose(make_set(cfg.set), o));
    }
    return dec_;
  }
  const PartitionOfUnity& pou() {
    if (!pou_) pou_.emplace(dec(), build_bump(seq(), cfg.pou), cfg.pou.order_cap);
    return *pou_;
  }

 private:
  void note_finite_range(const Verdict& v, const std::string& path) {
    for (const auto& n : v.notes) warn(path + ": " + n, true);
    for (const auto& p : v.parts)
      if (p.holds) note_finite_range(p, path + "/" + p.condition);
  }

  std::optional<WeightSequence> seq_;
  std::optional<WeightFunction> fn_;
  std::optional<WeightMatrix> W_;
  std::optional<ChainCertificate> chain_;
  std::shared_ptr<const CubeDecomposition> dec_;
  std::optional<PartitionOfUnity> pou_;
};

json flags_json(const SequenceFlags& f) {
  return {{"log_convex", f.log_convex},
          {"weight_sequence", f.weight_sequence},
          {"strongly_log_convex", f.strongly_log_convex},
          {"non_quasianalytic", f.non_quasianalytic},
          {"moderate_growth", f.moderate_growth}};
}

void stage_seq(Context& c) {
  const auto& s = c.seq();
  const std::size_t K = s.k_max();
  c.certificate("sequence", {{"label", s.label()},
                             {"k_max", K},
                             {"flags", flags_json(s.flags())},
                             {"moderate_growth_constant", s.moderate_growth_constant()},
                             {"tail_fit", {{"c", s.tail().c}, {"p", s.tail().p}}}});
  {
    auto w = c.csv("sequence.csv", {"k", "log_M", "log_m", "log_mu", "root_M"});
    for (std::size_t k = 0; k <= K; ++k)
      w.row({double(k), s.log_M(k), s.log_m(k), s.log_mu(k), k ? std::exp(s.log_M(k) / k) : 1.0});
  }
  if (s.flags().log_convex) {
    double worst = -INFINITY;
    std::size_t at = 0;
    for (std::size_t k = 1; k <= K; ++k) {
      const double gap = s.log_M(k) / k - s.log_mu(k) - 1e-12 * std::max(1.0, std::abs(s.log_mu(k)));
      if (gap > worst) worst = gap, at = k;
    }
    c.invariant("root_below_quotient", worst <= 0, {{"worst_log_gap", worst}, {"k", at}});
  }
  {
    double worst = 0;
    json used = json::array();
    for (double t : {5.0, 50.0, 500.0}) {
      if (!(t < std::exp(s.log_mu(K)))) continue;
      try {
        const double a = counting_integral(s, t), b = omega_assoc(s, t);
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
        used.push_back(t);
      } catch (const Error& e) {
        c.warn(std::string("counting identity skipped at t = ") + format_double(t) + ": " + e.what());
      }
    }
    if (!used.empty()) c.invariant("counting_identity", worst <= 1e-6, {{"max_rel_error", worst}, {"t", used}});
  }
  c.verdict(check_almost_increasing(s, c.cfg.conditions));
  if (s.flags().non_quasianalytic) {
    c.warn("non-quasianalyticity rests on a power tail fitted over the last quarter (p = " +
               format_double(s.tail().p) + ")",
           true);
    try {
      const auto d = descendant(s);
      std::size_t bad = 0;
      for (std::size_t k = 2; k <= d.k_max(); ++k)
        if (!(d.log_mu(k) - std::log(double(k)) > d.log_mu(k - 1) - std::log(double(k - 1)))) ++bad;
      std::vector<double> head;
      for (std::size_t k = 1; k <= std::min<std::size_t>(8, d.k_max()); ++k) head.push_back(std::exp(d.log_mu(k)));
      c.certificate("descendant", {{"sigma_1_to_8", head}});
      c.invariant("descendant_quotient_increasing", bad == 0, {{"violations", bad}});
    } catch (const Error& e) {
      c.warn(std::string("descendant not built: ") + e.what());
    }
  }
}

void stage_fn(Context& c) {
  const auto& f = c.fn();
  const auto& fl = f.flags();
  c.certificate("function", {{"label", f.label()},
                             {"normalized", f.normalized()},
                             {"domain_max", f.domain_max()},
                             {"flags",
                              {{"increasing", fl.increasing},
                               {"doubling", fl.doubling},
                               {"big_o_t", fl.big_o_t},
                               {"log_little_o", fl.log_little_o},
                               {"convex_phi", fl.convex_phi},
                               {"non_quasianalytic", fl.non_quasianalytic},
                               {"concave", fl.concave},
                               {"o_of_t", fl.o_of_t}}},
                             {"doubling_constant", fl.doubling_c},
                             {"big_o_constant", fl.big_o_c}});
  c.invariant("weight_function", fl.increasing && fl.doubling && fl.big_o_t && fl.log_little_o,
              {{"increasing", fl.increasing},
               {"doubling", fl.doubling},
               {"big_o_t", fl.big_o_t},
               {"log_little_o", fl.log_little_o}});
  bool kappa_warned = false, conj_warned = false;
  {
    auto w = c.csv("function.csv", {"t", "omega", "kappa"});
    for (double t : log_grid(0.1, std::min(1e6, f.domain_max()), 16)) {
      double k = NAN;
      try {
        k = kappa(f, t);
      } catch (const Error& e) {
        if (!kappa_warned) c.warn(std::string("kappa unavailable: ") + e.what());
        kappa_warned = true;
      }
      w.row({t, f(t), k});
    }
  }
  {
    auto w = c.csv("conjugates.csv", {"x", "omega_star", "phi_star"});
    for (double x : log_grid(1e-2, 1e2, 16)) {
      double a = NAN, b = NAN;
      try {
        a = omega_conjugate(f, x);
        b = young_conjugate(f, x);
      } catch (const Error& e) {
        if (!conj_warned) c.warn(std::string("conjugate outside its grid: ") + e.what());
        conj_warned = true;
      }
      w.row({x, a, b});
    }
  }
  c.verdict(check_omega_doubling(f, c.cfg.conditions));
}

void stage_matrix(Context& c) {
  const auto& f = c.fn();
  const auto& W = c.matrix();
  {
    std::vector<std::string> head{"k"};
    for (double x : W.x_grid) head.push_back("root_W[" + format_double(x) + "]");
    auto w = c.csv("matrix.csv", head);
    for (std::size_t k = 1; k <= W.k_max(); ++k) {
      std::vector<double> row{double(k)};
      for (const auto& r : W.rows) row.push_back(std::exp(r.log_M(k) / k));
      w.row(row);
    }
  }
  c.verdict(check_good(W, &f, c.cfg.conditions));
  c.verdict(check_quotient_root(W, c.cfg.conditions));
  c.verdict(check_strong_matrix(W, &f, c.cfg.conditions));
  c.verdict(check_concave_equivalence(f, W, c.cfg.conditions));
  try {
    const auto& ch = c.chain();
    c.certificate("chain", to_json(ch));
    c.invariant("chain_refined", ch.refined_ok, {{"refine_factor", c.cfg.conditions.chain_refine}});
  } catch (const Error& e) {
    c.error(to_string(e.kind()), e.what());
  }
}

void stage_check(Context& c) {
  const auto& f = c.fn();
  if (c.cfg.heir.is_null()) {
    c.verdict(check_heir(f, f, c.cfg.conditions));
  } else {
    const auto h = make_function(c.cfg.heir, c.cfg.k_max);
    c.verdict(check_heir(f, h, c.cfg.conditions));
  }
}

void stage_cubes(Context& c) {
  const auto dec = c.dec();
  const unsigned n = dec->dim;
  std::vector<std::size_t> hist(dec->depth_cap + 1, 0);
  for (const auto& q : dec->cubes) ++hist[q.depth];
  const auto diag = cube_diagnostics(*dec, c.cfg.diagnostic_samples, c.cfg.seed);
  c.cube_stats = {{"dim", n},
                  {"depth_cap", dec->depth_cap},
                  {"cubes", dec->cubes.size()},
                  {"collar_cells", dec->collar.size()},
                  {"collar_radius", dec->collar_radius},
                  {"b1", dec->b1},
                  {"B1", dec->B1},
                  {"max_overlap", dec->max_overlap},
                  {"depth_histogram", hist},
                  {"diagnostics", to_json(diag)}};
  c.invariant("cube_distance_between_diam_and_4_diam",
              diag.worst_cube_ratio_lo >= 1.0 - 1e-12 && diag.worst_cube_ratio_hi <= 4.0 * (1 + 1e-12),
              {{"min", diag.worst_cube_ratio_lo}, {"max", diag.worst_cube_ratio_hi}});
  const double cap = std::pow(12.0, 2.0 * n);
  c.invariant("overlap_bound", double(dec->max_overlap + 1) <= cap,
              {{"max_overlap", dec->max_overlap + 1}, {"bound", cap}});
  double worst = 0;
  for (double w : diag.worst) worst = std::max(worst, w);
  c.invariant("distance_inequalities", worst <= 1 + 1e-12, {{"worst_ratio", worst}, {"samples", diag.samples}});
  auto w = c.csv("cubes.csv", {"index", "center_x", "center_y", "side", "depth", "nearest", "d_center", "d_cube"});
  for (std::size_t i = 0; i < dec->cubes.size(); ++i) {
    const auto& q = dec->cubes[i];
    w.row({double(i), q.center[0], q.center[1], q.side, double(q.depth), double(q.nearest), q.d_center, q.d_cube});
  }
}

void stage_pou(Context& c) {
  const auto& p = c.pou();
  const auto& b = p.bump();
  const auto& dec = p.decomposition();
  const unsigned top = std::min(p.order_cap(), b.stages());
  std::vector<double> bounds;
  for (unsigned j = 0; j <= top; ++j) bounds.push_back(b.bound(j));
  c.certificate("bump", {{"delta", p.delta()},
                         {"halvings", p.halvings()},
                         {"stages", b.stages()},
                         {"plateau_half_width", b.a() - b.radius_sum()},
                         {"support_half_width", b.a() + b.radius_sum()},
                         {"radii", b.radii()},
                         {"derivative_bounds", bounds}});
  if (p.halvings() > 0) c.warn("delta halved " + std::to_string(p.halvings()) + " times");

  {
    auto w = c.csv("bump.csv", {"x", "f", "d1", "d2", "d3"});
    double worst = 0;
    for (int i = 0; i <= 2400; ++i) {
      const double x = -1.2 + 2.4 * i / 2400.0;
      std::vector<double> row{x};
      for (unsigned j = 0; j <= top; ++j) {
        const double v = b.eval(x, j);
        worst = std::max(worst, std::abs(v) / bounds[j]);
        if (j <= 3) row.push_back(v);
      }
      while (row.size() < 5) row.push_back(0.0);
      w.row(row);
    }
    c.invariant("bump_within_bounds", worst <= 1 + 1e-9, {{"worst_ratio", worst}, {"orders", top}});
  }

  const std::size_t side = dec.dim == 1 ? c.cfg.sum_check_points
                                        : static_cast<std::size_t>(std::ceil(std::sqrt(double(c.cfg.sum_check_points))));
  const std::size_t total = dec.dim == 1 ? side : side * side;
  struct Part {
    double worst = 0;
    std::size_t counted = 0, out_of_range = 0;
  };
  std::vector<Part> parts(std::max(1u, c.cfg.workers));
  parallel_chunks(total, c.cfg.workers, [&](std::size_t lo, std::size_t hi, unsigned w) {
    Part& pt = parts[w];
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const std::size_t i = idx % side, j = idx / side;
      Point x{dec.box.lo[0] + (dec.box.hi[0] - dec.box.lo[0]) * (i + 0.5) / double(side), 0};
      if (dec.dim == 2) x[1] = dec.box.lo[1] + (dec.box.hi[1] - dec.box.lo[1]) * (j + 0.5) / double(side);
      if (dec.locate(x).kind != Location::Cube) continue;
      double s = 0;
      for (const auto& [k, v] : p.values(x)) {
        if (v < -1e-15 || v > 1.0 + 1e-15) ++pt.out_of_range;
        s += v;
      }
      pt.worst = std::max(pt.worst, std::abs(s - 1));
      ++pt.counted;
    }
  });
  Part all;
  for (const auto& pt : parts) {
    all.worst = std::max(all.worst, pt.worst);
    all.counted += pt.counted;
    all.out_of_range += pt.out_of_range;
  }
  c.invariant("partition_sums_to_one", all.worst < 1e-10 && all.out_of_range == 0,
              {{"max_abs_error", all.worst}, {"points", all.counted}, {"values_outside_unit_interval", all.out_of_range}});
}

void stage_extend(Context& c, bool full) {
  const auto& cfg = c.cfg;
  const auto& p = c.pou();
  const auto& S = c.seq();
  const auto jet = jet_from_preset(make_preset(cfg.jet), make_set(cfg.set), cfg.jet_order);
  const auto cert = certify(jet, S, cfg.rho, cfg.jet_order);
  c.certificate("jet", {{"preset", jet.label},
                        {"rho", cfg.rho},
                        {"C", cert.C},
                        {"C_factorial_form", cert.C_factorial_form},
                        {"binding_family", cert.binding.family},
                        {"p_max", cert.p_max}});
  c.invariant("jet_certified", cert.ok, {{"C", cert.C}, {"rho", cfg.rho}});

  VerifyOptions vo = cfg.verify;
  vo.seed = cfg.seed;
  vo.workers = cfg.workers;
  if (!full) vo.fd_points = 0;
  std::function<DegreeSchedule(double)> make;
  if (cfg.mode == "matrix") {
    const auto& W = c.matrix();
    const auto& ch = c.chain();
    c.certificate("chain", to_json(ch));
    make = [&](double L) { return schedule(p.decomposition_ptr(), W, ch, L, cfg.degree_cap); };
  } else {
    make = [&](double L) { return schedule(p.decomposition_ptr(), S, L, cfg.degree_cap); };
  }
  const auto g = extend_guarded(jet, p, make, S, cfg.rho, cfg.guard, vo);
  const auto& field = *g.field;
  const auto& sched = field.schedule();
  std::map<unsigned, std::size_t> degrees;
  for (auto d : sched.p) ++degrees[d];
  json hist = json::object();
  for (const auto& [d, k] : degrees) hist[std::to_string(d)] = k;
  c.certificate("schedule", {{"mode", cfg.mode},
                             {"sequence", sched.seq->label()},
                             {"L", g.L},
                             {"guard", cfg.guard},
                             {"doublings", g.doublings},
                             {"degree_cap", sched.degree_cap},
                             {"capped_cubes", sched.capped_count()},
                             {"degree_histogram", hist}});
  if (g.doublings > 0) c.warn("L doubled " + std::to_string(g.doublings) + " times to " + format_double(g.L));
  for (const auto& w : g.report.warnings) c.warn(w);

  auto w = c.csv("residuals.csv", {"a", "alpha_1", "alpha_2", "d", "residual", "capped"});
  for (const auto& r : g.report.residuals) {
    json j = to_json(r);
    j["stage"] = c.stage;
    c.residuals.push_back(j);
    for (std::size_t k = 0; k < r.d.size(); ++k)
      w.row({double(r.a), double(r.alpha.a[0]), double(r.alpha.a[1]), r.d[k], r.residual[k], r.capped[k] ? 1.0 : 0.0});
  }
  std::size_t mono = 0, fit = 0;
  for (const auto& r : g.report.residuals) mono += r.monotone, fit += r.fit_ok;
  c.invariant("residuals_monotone_and_fitted", g.ok,
              {{"rows", g.report.residuals.size()}, {"monotone", mono}, {"fitted", fit}});

  {
    const auto& dec = field.decomposition();
    const unsigned ord = std::min(2u, field.max_order());
    if (dec.dim == 1) {
      auto fw = c.csv("field.csv", {"x", "f", "d1", "d2", "collar"});
      for (int i = 0; i <= 2000; ++i) {
        const double x = dec.box.lo[0] + (dec.box.hi[0] - dec.box.lo[0]) * i / 2000.0;
        const auto v = field.eval({x, 0}, ord);
        fw.row({x, v.jet.derivative({{0, 0}}), ord >= 1 ? v.jet.derivative({{1, 0}}) : 0.0,
                ord >= 2 ? v.jet.derivative({{2, 0}}) : 0.0, v.collar ? 1.0 : 0.0});
      }
    } else {
      auto fw = c.csv("field.csv", {"x", "y", "f", "collar"});
      for (int j = 0; j <= 200; ++j)
        for (int i = 0; i <= 200; ++i) {
          const Point x{dec.box.lo[0] + (dec.box.hi[0] - dec.box.lo[0]) * i / 200.0,
                        dec.box.lo[1] + (dec.box.hi[1] - dec.box.lo[1]) * j / 200.0};
          const auto v = field.eval(x, 0);
          fw.row({x[0], x[1], v.jet.derivative({{0, 0}}), v.collar ? 1.0 : 0.0});
        }
    }
  }

  if (!full) return;
  const auto& gr = g.report.growth;
  c.certificate("growth", to_json(gr));
  const bool finite = std::isfinite(gr.M1) && std::isfinite(gr.C);
  c.invariant("growth_certificate_finite", finite, {{"M1", gr.M1}, {"C", gr.C}});
  {
    const auto g2 = growth_certificate(field, *sched.seq, vo.growth_order, 2 * vo.growth_grid - 1, vo.workers);
    const double dm = gr.M1 > 0 ? std::abs(g2.M1 - gr.M1) / gr.M1 : 0.0;
    const double dc = gr.C > 0 ? std::abs(g2.C - gr.C) / gr.C : 0.0;
    c.certificate("growth_refined", to_json(g2));
    c.invariant("growth_stable_under_refinement", dm < 0.05 && dc < 0.05,
                {{"rel_change_M1", dm}, {"rel_change_C", dc}});
  }
  const auto& sp = g.report.spot;
  c.certificate("taylor_field_bounds",
                {{"C_value_bound", sp.C_taylor_bound}, {"C_residual_bound", sp.C_taylor_residual}, {"samples", sp.samples}});
  const auto& fd = g.report.fd;
  c.certificate("finite_differences", {{"points", fd.points},
                                       {"max_rel_error", fd.max_rel_error},
                                       {"worst_point", fd.worst_point},
                                       {"worst_alpha", to_json(fd.worst_alpha)},
                                       {"skipped_orders", fd.skipped_orders}});
  c.invariant("leibniz_matches_finite_differences", fd.points > 0 && fd.max_rel_error < 1e-4,
              {{"max_rel_error", fd.max_rel_error}, {"points", fd.points}});
}

}  // namespace

json config_error_report(const std::string& command, const std::string& message) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"status", "config_error"},
          {"config_echo", nullptr},
          {"verdicts", json::array()},
          {"certificates", json::array()},
          {"residual_tables", json::array()},
          {"cube_stats", nullptr},
          {"warnings", json::array()},
          {"errors", json::array({{{"stage", "config"}, {"kind", "ConfigError"}, {"message", message}}})},
          {"artifacts", json::array()}};
}

RunOutcome run(const std::string& command, const ExperimentConfig& cfg, const std::string& out_dir) {
  std::vector<std::pair<std::string, std::function<void(Context&)>>> stages;
  auto add = [&](const std::string& name) {
    if (name == "seq") stages.emplace_back(name, stage_seq);
    if (name == "fn") stages.emplace_back(name, stage_fn);
    if (name == "matrix") stages.emplace_back(name, stage_matrix);
    if (name == "check") stages.emplace_back(name, stage_check);
    if (name == "cubes") stages.emplace_back(name, stage_cubes);
    if (name == "pou") stages.emplace_back(name, stage_pou);
    if (name == "extend") stages.emplace_back(name, [](Context& c) { stage_extend(c, false); });
    if (name == "verify") stages.emplace_back(name, [](Context& c) { stage_extend(c, true); });
  };
  if (command == "all") {
    for (const auto* s : {"seq", "fn", "matrix", "check", "cubes", "pou", "verify"}) add(s);
  } else if (std::find(commands().begin(), commands().end(), command) != commands().end()) {
    add(command);
  } else {
    throw Error(ErrorKind::ConfigError, "unknown command '" + command + "'");
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::ConfigError, "cannot create " + out_dir + ": " + ec.message());

  Context c(cfg, out_dir);
  for (auto& [name, fn] : stages) {
    c.stage = name;
    try {
      fn(c);
    } catch (const Error& e) {
      c.error(to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
      c.error("Exception", e.what());
    }
  }

  RunOutcome out;
  out.exit_code = c.failed ? 1 : 0;
  out.artifacts = c.artifacts;
  out.artifacts.insert(out.artifacts.begin(), cfg.report_name);
  out.report = {{"schema_version", kSchemaVersion},
                {"command", command},
                {"status", c.failed ? "fail" : "pass"},
                {"config_echo", to_json(cfg)},
                {"verdicts", c.verdicts},
                {"certificates", c.certificates},
                {"residual_tables", c.residuals},
                {"cube_stats", c.cube_stats},
                {"warnings", c.warnings},
                {"errors", c.errors},
                {"artifacts", out.artifacts}};
  write_json((fs::path(out_dir) / cfg.report_name).string(), out.report);
  return out;
}

}  // namespace ultrajet
