#include "hmlab/cli/config.hpp"

#include <set>
#include <sstream>

#include "hmlab/core/errors.hpp"
#include "hmlab/flow/trajectory.hpp"
#include "hmlab/io/csv.hpp"
#include "hmlab/kernels/heat_kernel.hpp"

namespace hmlab::cli {

using nlohmann::json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::analyze: return "analyze";
    case Mode::kernel_verify: return "kernel-verify";
    case Mode::barrier_verify: return "barrier-verify";
    case Mode::sweep: return "sweep";
  }
  return "";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::simulate, Mode::analyze, Mode::kernel_verify, Mode::barrier_verify, Mode::sweep})
    if (to_string(m) == s) return m;
  throw ConfigError("mode", "expected one of simulate, analyze, kernel-verify, barrier-verify, sweep; got '" + s + "'");
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"mass", 1e-5},          {"pde", 1e-3},         {"bessel_ode", 1e-5},       {"sandwich_spread", 1e3},
      {"envelope_ceiling", 50.0}, {"dissipation", 1e-2}, {"stress", 1e-2},        {"energy_increase", 1e-8},
      {"exponent_margin", 0.05},  {"exponent_tol", 0.1}, {"schedule", 1e-12}};
  return t;
}

double RunConfig::tolerance(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

BarrierConfig default_barrier_config() {
  struct Row {
    double A, nu, b0, b1, g0, g1;
  };
  BarrierConfig c;
  for (const Row& r : {Row{1.0, 0.95, 0.5, 0.5, 0.2, 0.2}, Row{2.0, 0.9, 0.3, 0.6, 0.1, 0.3},
                       Row{1.5, 0.92, 0.4, 0.7, 0.2, 0.5}}) {
    parabolic::SupersolutionSpec s;
    s.A = r.A;
    s.nu = r.nu;
    s.beta0 = r.b0;
    s.beta1 = r.b1;
    s.gamma0 = r.g0;
    s.gamma1 = r.g1;
    s.rho = 1e-3;
    s.rho1 = 1e-2;
    s.kappa = 0.25;
    c.f_fixtures.push_back(s);
    s.B = 1.0;
    c.g_fixtures.push_back(s);
  }
  return c;
}

namespace {

// Strict reader for one JSON object: typed getters, and finish() rejects unread keys.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "(root)" : path_, "expected an object");
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void num(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(name(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class I>
  void integer(const std::string& key, I& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || (std::is_unsigned_v<I> && v->get<long long>() < 0))
        throw ConfigError(name(key), std::is_unsigned_v<I> ? "expected a non-negative integer" : "expected an integer");
      out = v->get<I>();
    }
  }

  void str(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(name(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void nums(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(name(key), "expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) throw ConfigError(name(key), "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  void finish() const {
    for (const auto& [key, v] : j_.items())
      if (!seen_.count(key)) throw ConfigError(name(key), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

void parse_flow(const json& j, FlowRunConfig& f) {
  Obj o(j, "flow");
  json step = json::object();
  for (const auto& [key, v] : j.items())
    if (key != "k" && key != "grid" && key != "initial" && key != "stop") step[key] = v;
  o.integer("k", f.k);
  require(f.k >= 1, "flow.k", "must be >= 1");
  if (const json* g = o.find("grid")) {
    Obj go(*g, "flow.grid");
    go.num("r_min", f.r_min);
    go.num("r_max", f.r_max);
    go.num("nodes_per_decade", f.nodes_per_decade);
    go.finish();
  }
  require(f.r_min > 0.0, "flow.grid.r_min", "must be positive");
  require(f.r_max > f.r_min, "flow.grid.r_max", "must exceed r_min");
  require(f.nodes_per_decade >= 3.0, "flow.grid.nodes_per_decade", "must be >= 3");
  if (const json* g = o.find("initial")) {
    Obj io(*g, "flow.initial");
    io.str("kind", f.initial.kind);
    io.num("boundary_value", f.initial.boundary_value);
    io.num("sigma", f.initial.sigma);
    io.str("path", f.initial.path);
    io.finish();
  }
  require(f.initial.kind == "ramp" || f.initial.kind == "bubble" || f.initial.kind == "file", "flow.initial.kind",
          "expected ramp, bubble or file");
  require(f.initial.kind != "file" || !f.initial.path.empty(), "flow.initial.path", "required for kind = file");
  require(f.initial.sigma > 0.0, "flow.initial.sigma", "must be positive");
  require(std::isfinite(f.initial.boundary_value), "flow.initial.boundary_value", "must be finite");
  if (const json* g = o.find("stop")) {
    Obj so(*g, "flow.stop");
    so.num("t_ceiling", f.t_ceiling);
    so.num("lambda_stop", f.lambda_stop);
    so.num("grad_ceiling", f.grad_ceiling);
    so.num("stationary_tol", f.stationary_tol);
    so.integer("max_steps", f.max_steps);
    so.num("snapshot_ratio", f.snapshot_ratio);
    so.nums("snapshot_times", f.snapshot_times);
    so.finish();
  }
  require(f.t_ceiling > 0.0, "flow.stop.t_ceiling", "must be positive");
  require(f.lambda_stop >= 0.0, "flow.stop.lambda_stop", "must be non-negative");
  require(f.grad_ceiling >= 0.0, "flow.stop.grad_ceiling", "must be non-negative");
  require(f.stationary_tol > 0.0, "flow.stop.stationary_tol", "must be positive");
  require(f.max_steps > 0, "flow.stop.max_steps", "must be positive");
  require(f.snapshot_ratio > 0.0 && f.snapshot_ratio < 1.0, "flow.stop.snapshot_ratio", "must lie in (0, 1)");
  for (double t : f.snapshot_times) require(t > 0.0, "flow.stop.snapshot_times", "must be positive");
  f.step = flow::flow_config_from_json(step);
}

void parse_neck(const json& j, NeckConfig& n) {
  Obj o(j, "neck");
  o.num("alpha", n.alpha);
  o.num("kappa", n.kappa);
  o.num("epsilon", n.epsilon);
  o.num("R", n.R);
  o.num("nu", n.nu);
  std::vector<double> ann{n.annulus_lo, n.annulus_hi};
  o.nums("annulus", ann);
  o.finish();
  require(n.alpha > 0.0 && n.alpha <= 1.0, "neck.alpha", "must lie in (0, 1]");
  require(n.kappa > 0.0 && n.kappa <= 0.5, "neck.kappa", "must lie in (0, 1/2]");
  require(n.epsilon > 0.0, "neck.epsilon", "must be positive");
  require(n.R >= 0.0, "neck.R", "must be non-negative (0 selects automatically)");
  require(n.nu > 0.0 && n.nu <= 1.0, "neck.nu", "must lie in (0, 1]");
  require(ann.size() == 2 && ann[0] > 0.0 && ann[0] < ann[1], "neck.annulus", "expected [lo, hi] with 0 < lo < hi");
  n.annulus_lo = ann[0];
  n.annulus_hi = ann[1];
}

void parse_kernel(const json& j, KernelConfig& k) {
  Obj o(j, "kernel");
  if (const json* c = o.find("cases")) {
    require(c->is_array(), "kernel.cases", "expected an array");
    k.cases.clear();
    for (std::size_t i = 0; i < c->size(); ++i) {
      const std::string path = "kernel.cases[" + std::to_string(i) + "]";
      KernelCase kc;
      Obj co((*c)[i], path);
      co.num("mu", kc.mu);
      co.num("rho", kc.rho);
      co.num("R", kc.R);
      co.num("k", kc.k);
      co.finish();
      try {
        kernels::KernelParams::make(kc.mu, kc.rho, kc.R);
      } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
      }
      require(kc.rho > 0.0, path + ".rho", "must be positive for the Dirichlet solvers");
      k.cases.push_back(kc);
    }
  }
  o.integer("nodes", k.nodes);
  o.num("t_end", k.t_end);
  o.integer("samples", k.samples);
  o.integer("sandwich_points", k.sandwich_points);
  o.finish();
  require(k.nodes >= 3, "kernel.nodes", "must be >= 3");
  require(k.t_end > 0.0, "kernel.t_end", "must be positive");
  require(k.samples >= 1, "kernel.samples", "must be >= 1");
  require(k.sandwich_points >= 2, "kernel.sandwich_points", "must be >= 2");
}

parabolic::SupersolutionSpec parse_spec(const json& j, const std::string& path, bool g) {
  parabolic::SupersolutionSpec s;
  Obj o(j, path);
  o.num("A", s.A);
  o.num("B", s.B);
  o.num("nu", s.nu);
  o.num("beta0", s.beta0);
  o.num("beta1", s.beta1);
  o.num("gamma0", s.gamma0);
  o.num("gamma1", s.gamma1);
  o.num("rho", s.rho);
  o.num("rho1", s.rho1);
  o.num("kappa", s.kappa);
  o.finish();
  try {
    g ? s.validate_g() : s.validate_f();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return s;
}

void parse_barrier(const json& j, BarrierConfig& b) {
  Obj o(j, "barrier");
  for (const auto* key : {"f_fixtures", "g_fixtures"}) {
    if (const json* arr = o.find(key)) {
      const std::string path = std::string("barrier.") + key;
      require(arr->is_array(), path, "expected an array");
      auto& out = key[0] == 'f' ? b.f_fixtures : b.g_fixtures;
      out.clear();
      for (std::size_t i = 0; i < arr->size(); ++i)
        out.push_back(parse_spec((*arr)[i], path + "[" + std::to_string(i) + "]", key[0] == 'g'));
    }
  }
  o.num("nodes_per_decade", b.nodes_per_decade);
  o.num("t_end", b.t_end);
  o.finish();
  require(b.nodes_per_decade >= 3.0, "barrier.nodes_per_decade", "must be >= 3");
  require(b.t_end > 0.0, "barrier.t_end", "must be positive");
}

void parse_sweep(const json& j, SweepConfig& s) {
  Obj o(j, "sweep");
  std::string child = to_string(s.child);
  o.str("mode", child);
  try {
    s.child = mode_from_string(child);
  } catch (const ConfigError& e) {
    throw ConfigError("sweep.mode", e.what());
  }
  require(s.child != Mode::sweep, "sweep.mode", "sweeps do not nest");
  if (const json* p = o.find("parameters")) {
    require(p->is_object(), "sweep.parameters", "expected an object of arrays");
    s.parameters.clear();
    for (const auto& [key, v] : p->items()) {
      require(v.is_array() && !v.empty(), "sweep.parameters." + key, "expected a non-empty array");
      s.parameters[key] = std::vector<json>(v.begin(), v.end());
    }
  }
  o.integer("threads", s.threads);
  o.finish();
}

json spec_json(const parabolic::SupersolutionSpec& s) {
  return {{"A", s.A},           {"B", s.B},           {"nu", s.nu},   {"beta0", s.beta0},
          {"beta1", s.beta1},   {"gamma0", s.gamma0}, {"gamma1", s.gamma1}, {"rho", s.rho},
          {"rho1", s.rho1},     {"kappa", s.kappa}};
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Obj o(j, "");
  std::string mode;
  o.str("mode", mode);
  require(!mode.empty(), "mode", "required");
  c.mode = mode_from_string(mode);
  o.str("output_dir", c.output_dir);
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  o.integer("seed", c.seed);
  if (const json* v = o.find("flow")) parse_flow(*v, c.flow);
  if (const json* v = o.find("neck")) parse_neck(*v, c.neck);
  if (const json* v = o.find("kernel")) parse_kernel(*v, c.kernel);
  if (const json* v = o.find("barrier")) parse_barrier(*v, c.barrier);
  if (const json* v = o.find("sweep")) parse_sweep(*v, c.sweep);
  if (const json* v = o.find("tolerances")) {
    Obj to(*v, "tolerances");
    for (const auto& [name, def] : default_tolerances()) {
      double x = def;
      to.num(name, x);
      require(x > 0.0, "tolerances." + name, "must be positive");
      c.tolerances[name] = x;
    }
    to.finish();
  }
  o.finish();
  for (const auto& [name, def] : default_tolerances()) c.tolerances.emplace(name, def);

  if (c.mode == Mode::kernel_verify) require(!c.kernel.cases.empty(), "kernel.cases", "required for kernel-verify");
  if (c.mode == Mode::barrier_verify)
    require(!c.barrier.f_fixtures.empty() || !c.barrier.g_fixtures.empty(), "barrier.f_fixtures",
            "required for barrier-verify");
  if (c.mode == Mode::sweep) require(!c.sweep.parameters.empty(), "sweep.parameters", "required for sweep");
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

json to_json(const RunConfig& c) {
  json flow = flow::to_json(c.flow.step);
  flow["k"] = c.flow.k;
  flow["grid"] = {{"r_min", c.flow.r_min}, {"r_max", c.flow.r_max}, {"nodes_per_decade", c.flow.nodes_per_decade}};
  flow["initial"] = {{"kind", c.flow.initial.kind},
                     {"boundary_value", c.flow.initial.boundary_value},
                     {"sigma", c.flow.initial.sigma},
                     {"path", c.flow.initial.path}};
  flow["stop"] = {{"t_ceiling", c.flow.t_ceiling},       {"lambda_stop", c.flow.lambda_stop},
                  {"grad_ceiling", c.flow.grad_ceiling}, {"stationary_tol", c.flow.stationary_tol},
                  {"max_steps", c.flow.max_steps},       {"snapshot_ratio", c.flow.snapshot_ratio},
                  {"snapshot_times", c.flow.snapshot_times}};
  json cases = json::array();
  for (const auto& k : c.kernel.cases) cases.push_back({{"mu", k.mu}, {"rho", k.rho}, {"R", k.R}, {"k", k.k}});
  json ff = json::array(), gf = json::array();
  for (const auto& s : c.barrier.f_fixtures) ff.push_back(spec_json(s));
  for (const auto& s : c.barrier.g_fixtures) gf.push_back(spec_json(s));
  json params = json::object();
  for (const auto& [k, v] : c.sweep.parameters) params[k] = v;
  return {{"mode", to_string(c.mode)},
          {"output_dir", c.output_dir},
          {"seed", c.seed},
          {"flow", flow},
          {"neck",
           {{"alpha", c.neck.alpha},
            {"kappa", c.neck.kappa},
            {"epsilon", c.neck.epsilon},
            {"R", c.neck.R},
            {"nu", c.neck.nu},
            {"annulus", {c.neck.annulus_lo, c.neck.annulus_hi}}}},
          {"kernel",
           {{"cases", cases},
            {"nodes", c.kernel.nodes},
            {"t_end", c.kernel.t_end},
            {"samples", c.kernel.samples},
            {"sandwich_points", c.kernel.sandwich_points}}},
          {"barrier",
           {{"f_fixtures", ff},
            {"g_fixtures", gf},
            {"nodes_per_decade", c.barrier.nodes_per_decade},
            {"t_end", c.barrier.t_end}}},
          {"sweep", {{"mode", to_string(c.sweep.child)}, {"parameters", params}, {"threads", c.sweep.threads}}},
          {"tolerances", c.tolerances}};
}

std::string config_hash(const RunConfig& c) { return io::sha256_hex(to_json(c).dump()); }

std::vector<SweepChild> expand_sweep(const RunConfig& c) {
  if (c.sweep.parameters.empty()) throw ConfigError("sweep.parameters", "nothing to sweep");
  std::vector<std::pair<std::string, std::vector<json>>> axes(c.sweep.parameters.begin(), c.sweep.parameters.end());
  std::size_t total = 1;
  for (const auto& [k, v] : axes) total *= v.size();

  json base = to_json(c);
  base["mode"] = to_string(c.sweep.child);
  base["sweep"] = to_json(RunConfig{})["sweep"];
  std::vector<SweepChild> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    json child = base;
    json assignment = json::object();
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const auto& [path, values] = axes[a];
      json* node = &child;
      std::stringstream ss(path);
      std::string part;
      std::vector<std::string> parts;
      while (std::getline(ss, part, '.')) parts.push_back(part);
      for (std::size_t p = 0; p < parts.size(); ++p) {
        if (!node->is_object() || !node->contains(parts[p]) || parts[p] == "mode" || parts[p] == "sweep" ||
            parts[p] == "output_dir")
          throw ConfigError("sweep.parameters." + path, "not a sweepable config key");
        node = &(*node)[parts[p]];
      }
      *node = values[idx[a]];
      assignment[path] = values[idx[a]];
    }
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", n);
    child["output_dir"] = (std::filesystem::path(c.output_dir) / name).string();
    try {
      out.push_back({config_from_json(child), assignment});
    } catch (const ConfigError& e) {
      throw ConfigError("sweep.parameters", std::string("child ") + name + ": " + e.what());
    }
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace hmlab::cli
