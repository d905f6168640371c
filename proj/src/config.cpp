#include "ultrajet/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ultrajet/error.hpp"

namespace ultrajet {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::ConfigError, path + ": " + msg);
}

// Reads keys from one object and rejects whatever was not asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() == 0) finish();
  }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  const json& raw(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) fail(at(k), "missing");
    return j_.at(k);
  }
  std::string at(const std::string& k) const { return path_ + "." + k; }

  template <class T>
  void get(const std::string& k, T& out) {
    if (!has(k)) return;
    out = convert<T>(j_.at(k), at(k));
  }
  template <class T>
  T req(const std::string& k) {
    return convert<T>(raw(k), at(k));
  }
  template <class T>
  T opt(const std::string& k, T dflt) {
    get(k, dflt);
    return dflt;
  }

  void finish() {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(path, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(path, "expected a finite number");
        return x;
      } else if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
        return static_cast<T>(v.get<unsigned long long>());
      } else if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        return v.get<int>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(path, "expected true or false");
        return v.get<bool>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
      } else {
        if (!v.is_array()) fail(path, "expected an array");
        T out;
        for (std::size_t i = 0; i < v.size(); ++i)
          out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
        return out;
      }
    } catch (const json::exception& e) {
      fail(path, e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json default_sequence() { return {{"kind", "gevrey"}, {"s", 1.0}}; }
json default_function() { return {{"kind", "power"}, {"alpha", 0.5}, {"normalized", true}}; }
json default_set() {
  return {{"dim", 1}, {"points", json::array({json::array({-1.0}), json::array({1.0})})},
          {"box", {{"lo", json::array({-2.0})}, {"hi", json::array({2.0})}}}};
}
json default_jet() { return {{"kind", "sin"}, {"a", 1.0}, {"b", 0.0}, {"axis", 0}}; }

// Validates a description by building it; normalizes defaults into the returned copy.
json normalize_sequence(const json& s, const std::string& path);
json normalize_function(const json& s, const std::string& path);
json normalize_preset(const json& s, const std::string& path);
json normalize_set(const json& s, const std::string& path);

json normalize_sequence(const json& s, const std::string& path) {
  Reader r(s, path);
  const auto kind = r.req<std::string>("kind");
  json out{{"kind", kind}};
  if (kind == "gevrey") {
    out["s"] = r.req<double>("s");
  } else if (kind == "mu" || kind == "log_M") {
    out["values"] = r.req<std::vector<double>>("values");
    if (out["values"].size() < 3) fail(r.at("values"), "need at least three entries");
  } else if (kind == "power_mu") {
    out["p"] = r.req<double>("p");
    out["c"] = r.opt<double>("c", 1.0);
  } else {
    fail(r.at("kind"), "unknown sequence kind '" + kind + "'");
  }
  if (r.has("label")) out["label"] = r.req<std::string>("label");
  return out;
}

json normalize_function(const json& s, const std::string& path) {
  Reader r(s, path);
  const auto kind = r.req<std::string>("kind");
  json out{{"kind", kind}};
  if (kind == "power") {
    out["alpha"] = r.req<double>("alpha");
    out["normalized"] = r.opt<bool>("normalized", true);
  } else if (kind == "log_power") {
    out["a"] = r.opt<double>("a", 1.0);
    out["b"] = r.opt<double>("b", 2.0);
  } else if (kind == "gevrey_dual") {
    out["s"] = r.req<double>("s");
  } else if (kind == "of_sequence") {
    out["sequence"] = normalize_sequence(r.raw("sequence"), r.at("sequence"));
  } else if (kind == "tabulated") {
    out["t"] = r.req<std::vector<double>>("t");
    out["omega"] = r.req<std::vector<double>>("omega");
    if (out["t"].size() != out["omega"].size() || out["t"].size() < 2)
      fail(path, "t and omega need equal lengths of at least two");
  } else {
    fail(r.at("kind"), "unknown function kind '" + kind + "'");
  }
  return out;
}

json normalize_preset(const json& s, const std::string& path) {
  Reader r(s, path);
  const auto kind = r.req<std::string>("kind");
  json out{{"kind", kind}};
  auto axis = [&] {
    const auto a = r.opt<unsigned>("axis", 0);
    if (a > 1) fail(r.at("axis"), "axis must be 0 or 1");
    out["axis"] = a;
  };
  if (kind == "sin") {
    out["a"] = r.req<double>("a");
    out["b"] = r.opt<double>("b", 0.0);
    axis();
  } else if (kind == "exp") {
    out["a"] = r.req<double>("a");
    axis();
  } else if (kind == "runge") {
    out["c"] = r.req<double>("c");
    axis();
  } else if (kind == "poly1") {
    out["coeffs"] = r.req<std::vector<double>>("coeffs");
    axis();
  } else if (kind == "poly") {
    const auto& terms = r.raw("terms");
    if (!terms.is_array()) fail(r.at("terms"), "expected an array");
    out["terms"] = json::array();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      Reader t(terms[i], r.at("terms") + "[" + std::to_string(i) + "]");
      const auto alpha = t.req<std::vector<unsigned>>("alpha");
      if (alpha.empty() || alpha.size() > 2) fail(t.at("alpha"), "expected one or two exponents");
      out["terms"].push_back({{"coef", t.req<double>("coef")}, {"alpha", alpha}});
    }
  } else if (kind == "sum" || kind == "product") {
    const std::string key = kind == "sum" ? "terms" : "factors";
    const auto& list = r.raw(key);
    if (!list.is_array() || list.empty()) fail(r.at(key), "expected a non-empty array");
    out[key] = json::array();
    for (std::size_t i = 0; i < list.size(); ++i)
      out[key].push_back(normalize_preset(list[i], r.at(key) + "[" + std::to_string(i) + "]"));
  } else if (kind != "zero") {
    fail(r.at("kind"), "unknown jet preset '" + kind + "'");
  }
  return out;
}

std::vector<double> coords(Reader& r, const std::string& k, unsigned dim) {
  const auto v = r.req<std::vector<double>>(k);
  if (v.size() != dim) fail(r.at(k), "expected " + std::to_string(dim) + " coordinates");
  return v;
}

json normalize_set(const json& s, const std::string& path) {
  Reader r(s, path);
  const auto dim = r.req<unsigned>("dim");
  if (dim != 1 && dim != 2) fail(r.at("dim"), "dimension must be 1 or 2");
  json out{{"dim", dim}, {"points", json::array()}, {"sampled", json::array()}};
  if (r.has("points")) {
    const auto& pts = r.raw("points");
    if (!pts.is_array()) fail(r.at("points"), "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto p = Reader::convert<std::vector<double>>(pts[i], r.at("points") + "[" + std::to_string(i) + "]");
      if (p.size() != dim) fail(r.at("points"), "point " + std::to_string(i) + " has the wrong dimension");
      out["points"].push_back(p);
    }
  }
  if (r.has("sampled")) {
    const auto& sm = r.raw("sampled");
    if (!sm.is_array()) fail(r.at("sampled"), "expected an array");
    for (std::size_t i = 0; i < sm.size(); ++i) {
      Reader q(sm[i], r.at("sampled") + "[" + std::to_string(i) + "]");
      const auto count = q.req<unsigned>("count");
      if (count < 1) fail(q.at("count"), "must be positive");
      out["sampled"].push_back({{"lo", coords(q, "lo", dim)}, {"hi", coords(q, "hi", dim)}, {"count", count}});
    }
  }
  Reader b(r.raw("box"), r.at("box"));
  out["box"] = {{"lo", coords(b, "lo", dim)}, {"hi", coords(b, "hi", dim)}};
  return out;
}

}  // namespace

WeightSequence make_sequence(const json& s, std::size_t k_max) {
  const auto kind = s.at("kind").get<std::string>();
  const std::string label = s.value("label", std::string());
  if (kind == "gevrey") {
    auto q = WeightSequence::gevrey(s.at("s").get<double>(), k_max);
    return label.empty() ? q : WeightSequence::from_log_M(std::vector<double>(q.log_M_table().begin(),
                                                                             q.log_M_table().end()),
                                                         label);
  }
  if (kind == "mu") return WeightSequence::from_mu(s.at("values").get<std::vector<double>>(), label);
  if (kind == "log_M") return WeightSequence::from_log_M(s.at("values").get<std::vector<double>>(), label);
  // power_mu: mu_0 = 1, mu_k = c k^p
  const double p = s.at("p").get<double>(), c = s.at("c").get<double>();
  std::vector<double> lmu(k_max + 1, 0.0);
  for (std::size_t k = 1; k <= k_max; ++k) lmu[k] = std::log(c) + p * std::log(double(k));
  std::ostringstream os;
  os.precision(17);
  os << "mu_k = " << c << " k^" << p;
  return WeightSequence::from_log_mu(std::move(lmu), label.empty() ? os.str() : label);
}

WeightFunction make_function(const json& s, std::size_t k_max) {
  const auto kind = s.at("kind").get<std::string>();
  if (kind == "power")
    return WeightFunction::power(s.at("alpha").get<double>(),
                                 s.at("normalized").get<bool>() ? Normalization::normalized : Normalization::raw);
  if (kind == "log_power") return WeightFunction::log_power(s.at("a").get<double>(), s.at("b").get<double>());
  if (kind == "gevrey_dual") return WeightFunction::gevrey_dual(s.at("s").get<double>());
  if (kind == "of_sequence")
    return WeightFunction::of_sequence(std::make_shared<const WeightSequence>(make_sequence(s.at("sequence"), k_max)));
  return WeightFunction::tabulated(s.at("t").get<std::vector<double>>(), s.at("omega").get<std::vector<double>>());
}

JetPreset make_preset(const json& s) {
  const auto kind = s.at("kind").get<std::string>();
  const unsigned axis = s.value("axis", 0u);
  if (kind == "sin") return JetPreset::sin(s.at("a").get<double>(), s.at("b").get<double>(), axis);
  if (kind == "exp") return JetPreset::exp(s.at("a").get<double>(), axis);
  if (kind == "runge") return JetPreset::runge(s.at("c").get<double>(), axis);
  if (kind == "poly1") return JetPreset::poly1(s.at("coeffs").get<std::vector<double>>(), axis);
  if (kind == "zero") return JetPreset::zero();
  if (kind == "poly") {
    std::vector<std::pair<double, MultiIndex>> terms;
    for (const auto& t : s.at("terms")) {
      const auto a = t.at("alpha").get<std::vector<unsigned>>();
      terms.push_back({t.at("coef").get<double>(), MultiIndex{{a[0], a.size() > 1 ? a[1] : 0u}}});
    }
    return JetPreset::poly(std::move(terms));
  }
  const bool sum = kind == "sum";
  const auto& list = s.at(sum ? "terms" : "factors");
  JetPreset acc = make_preset(list[0]);
  for (std::size_t i = 1; i < list.size(); ++i) acc = sum ? acc + make_preset(list[i]) : acc * make_preset(list[i]);
  return acc;
}

CompactSet make_set(const json& s) {
  const unsigned dim = s.at("dim").get<unsigned>();
  auto pt = [&](const json& v) {
    Point p{0, 0};
    for (unsigned i = 0; i < dim; ++i) p[i] = v[i].get<double>();
    return p;
  };
  std::vector<Point> pts;
  for (const auto& p : s.at("points")) pts.push_back(pt(p));
  for (const auto& q : s.at("sampled")) {
    const Point lo = pt(q.at("lo")), hi = pt(q.at("hi"));
    const unsigned c = q.at("count").get<unsigned>();
    auto at = [&](unsigned i, unsigned k) { return c == 1 ? 0.5 * (lo[k] + hi[k]) : lo[k] + (hi[k] - lo[k]) * i / (c - 1.0); };
    if (dim == 1) {
      for (unsigned i = 0; i < c; ++i) pts.push_back({at(i, 0), 0});
    } else {
      for (unsigned j = 0; j < c; ++j)
        for (unsigned i = 0; i < c; ++i) pts.push_back({at(i, 0), at(j, 1)});
    }
  }
  return CompactSet::make(dim, std::move(pts), Box{pt(s.at("box").at("lo")), pt(s.at("box").at("hi"))});
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  c.sequence = normalize_sequence(default_sequence(), "default.sequence");
  c.function = normalize_function(default_function(), "default.function");
  c.set = normalize_set(default_set(), "default.set");
  c.jet = normalize_preset(default_jet(), "default.jet");
  c.x_grid = default_x_grid();
  c.verify.growth_grid = 20001;
  {
    Reader r(j, "config");
    const int v = r.req<int>("schema_version");
    if (v != kSchemaVersion) fail("config.schema_version", "unsupported version " + std::to_string(v));
    r.get("k_max", c.k_max);
    if (c.k_max < 8) fail("config.k_max", "must be at least 8");
    r.get("seed", c.seed);
    r.get("strict", c.strict);
    if (r.has("sequence")) c.sequence = normalize_sequence(r.raw("sequence"), "config.sequence");
    if (r.has("function")) c.function = normalize_function(r.raw("function"), "config.function");
    if (r.has("heir")) c.heir = normalize_function(r.raw("heir"), "config.heir");
    r.get("x_grid", c.x_grid);
    if (r.has("conditions")) {
      Reader q(r.raw("conditions"), "config.conditions");
      q.get("t_lo", c.conditions.t_lo);
      q.get("t_hi", c.conditions.t_hi);
      q.get("per_decade", c.conditions.per_decade);
      q.get("c_cap_exp", c.conditions.c_cap_exp);
      q.get("trend_slack", c.conditions.trend_slack);
      q.get("chain_samples", c.conditions.chain_samples);
      q.get("chain_refine", c.conditions.chain_refine);
      q.get("chain_x", c.chain_x);
      if (!(c.conditions.t_lo > 0 && c.conditions.t_hi > c.conditions.t_lo))
        fail("config.conditions", "need 0 < t_lo < t_hi");
    }
    if (r.has("set")) c.set = normalize_set(r.raw("set"), "config.set");
    if (r.has("jet")) {
      Reader q(r.raw("jet"), "config.jet");
      if (q.has("preset")) c.jet = normalize_preset(q.raw("preset"), "config.jet.preset");
      q.get("order", c.jet_order);
    }
    if (r.has("decomposition")) {
      Reader q(r.raw("decomposition"), "config.decomposition");
      q.get("depth_cap", c.depth_cap);
      q.get("max_collar", c.max_collar);
      q.get("diagnostic_samples", c.diagnostic_samples);
    }
    if (r.has("pou")) {
      Reader q(r.raw("pou"), "config.pou");
      q.get("delta", c.pou.delta);
      q.get("order_cap", c.pou.order_cap);
      q.get("extra_stages", c.pou.extra_stages);
      q.get("auto_halve", c.pou.auto_halve);
      q.get("sum_check_points", c.sum_check_points);
    }
    if (r.has("extension")) {
      Reader q(r.raw("extension"), "config.extension");
      q.get("mode", c.mode);
      if (c.mode != "single" && c.mode != "matrix") fail(q.at("mode"), "expected 'single' or 'matrix'");
      q.get("rho", c.rho);
      q.get("guard", c.guard);
      q.get("degree_cap", c.degree_cap);
      q.get("orders", c.verify.orders);
      q.get("approach_scales", c.verify.approach_scales);
      q.get("growth_grid", c.verify.growth_grid);
      q.get("growth_order", c.verify.growth_order);
      q.get("fd_points", c.verify.fd_points);
      q.get("fd_order", c.verify.fd_order);
      q.get("fit_cap", c.verify.fit_cap);
    }
    if (r.has("output")) {
      Reader q(r.raw("output"), "config.output");
      q.get("report", c.report_name);
    }
  }
  if (c.verify.approach_scales.empty())
    for (int k = 3; k <= 10; ++k) c.verify.approach_scales.push_back(std::ldexp(1.0, -k));
  if (c.degree_cap == 0) c.degree_cap = c.jet_order;
  if (c.degree_cap > c.jet_order) fail("config.extension.degree_cap", "exceeds jet.order");
  if (!(c.rho > 0) || !(c.guard > 0)) fail("config.extension", "rho and guard must be positive");
  if (c.x_grid.empty()) fail("config.x_grid", "must not be empty");
  for (unsigned k : c.verify.orders)
    if (k > c.jet_order) fail("config.extension.orders", "order above jet.order");

  // build every object once so bad parameters surface as config errors
  try {
    make_sequence(c.sequence, c.k_max);
    make_function(c.function, c.k_max);
    if (!c.heir.is_null()) make_function(c.heir, c.k_max);
    make_preset(c.jet);
    make_set(c.set);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  const auto& v = c.verify;
  return {
      {"schema_version", kSchemaVersion},
      {"k_max", c.k_max},
      {"seed", c.seed},
      {"strict", c.strict},
      {"sequence", c.sequence},
      {"function", c.function},
      {"heir", c.heir},
      {"x_grid", c.x_grid},
      {"conditions",
       {{"t_lo", c.conditions.t_lo},
        {"t_hi", c.conditions.t_hi},
        {"per_decade", c.conditions.per_decade},
        {"c_cap_exp", c.conditions.c_cap_exp},
        {"trend_slack", c.conditions.trend_slack},
        {"chain_samples", c.conditions.chain_samples},
        {"chain_refine", c.conditions.chain_refine},
        {"chain_x", c.chain_x}}},
      {"set", c.set},
      {"jet", {{"preset", c.jet}, {"order", c.jet_order}}},
      {"decomposition",
       {{"depth_cap", c.depth_cap}, {"max_collar", c.max_collar}, {"diagnostic_samples", c.diagnostic_samples}}},
      {"pou",
       {{"delta", c.pou.delta},
        {"order_cap", c.pou.order_cap},
        {"extra_stages", c.pou.extra_stages},
        {"auto_halve", c.pou.auto_halve},
        {"sum_check_points", c.sum_check_points}}},
      {"extension",
       {{"mode", c.mode},
        {"rho", c.rho},
        {"guard", c.guard},
        {"degree_cap", c.degree_cap},
        {"orders", v.orders},
        {"approach_scales", v.approach_scales},
        {"growth_grid", v.growth_grid},
        {"growth_order", v.growth_order},
        {"fd_points", v.fd_points},
        {"fd_order", v.fd_order},
        {"fit_cap", v.fit_cap}}},
      {"output", {{"report", c.report_name}}},
  };
}

}  // namespace ultrajet
