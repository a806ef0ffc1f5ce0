#include "plsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "plsim/bound_checks.hpp"

namespace plsim {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  void error(const std::string& path, const std::string& what) {
    errors.push_back(path + ": " + what);
  }
};

// Reads keys of one JSON object, records violations, and reports keys
// that were never consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, Diagnostics& d)
      : j_(j), path_(std::move(path)), d_(d) {
    if (!j_.is_object()) {
      d_.error(path_.empty() ? "<root>" : path_, "expected an object");
      valid_ = false;
    }
  }
  ObjectReader(const ObjectReader&) = delete;
  ~ObjectReader() {
    if (!valid_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) d_.error(child(key), "unknown key");
    }
  }

  bool valid() const { return valid_; }
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool has(const std::string& key) const {
    return valid_ && j_.contains(key);
  }
  const json* get(const std::string& key, bool required) {
    seen_.insert(key);
    if (!valid_) return nullptr;
    auto it = j_.find(key);
    if (it == j_.end()) {
      if (required) d_.error(child(key), "missing required key");
      return nullptr;
    }
    return &*it;
  }

  // Finite number; `check` returns an empty string or a constraint message.
  template <class Check>
  void number(const std::string& key, double& out, bool required, Check check) {
    const json* v = get(key, required);
    if (!v) return;
    if (!v->is_number() || !std::isfinite(v->get<double>())) {
      d_.error(child(key), "expected a finite number");
      return;
    }
    const double x = v->get<double>();
    const std::string why = check(x);
    if (!why.empty()) {
      d_.error(child(key), why + " (got " + json(x).dump() + ")");
      return;
    }
    out = x;
  }
  void number(const std::string& key, double& out, bool required) {
    number(key, out, required, [](double) { return std::string(); });
  }

  template <class Int>
  void integer(const std::string& key, Int& out, bool required, long long min) {
    const json* v = get(key, required);
    if (!v) return;
    if (!v->is_number_integer()) {
      d_.error(child(key), "expected an integer");
      return;
    }
    const long long x = v->is_number_unsigned()
                            ? static_cast<long long>(v->get<unsigned long long>())
                            : v->get<long long>();
    if (x < min) {
      d_.error(child(key), "must be >= " + std::to_string(min) + " (got " +
                               std::to_string(x) + ")");
      return;
    }
    out = static_cast<Int>(x);
  }

  void string(const std::string& key, std::string& out, bool required) {
    const json* v = get(key, required);
    if (!v) return;
    if (!v->is_string()) {
      d_.error(child(key), "expected a string");
      return;
    }
    out = v->get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  Diagnostics& d_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

std::string positive(double x) { return x > 0.0 ? "" : "must be positive"; }
std::string nonnegative(double x) { return x >= 0.0 ? "" : "must be nonnegative"; }

void read_bump(ObjectReader& r, BumpSpec& b, double length) {
  b.center = 0.5 * length;
  r.number("center", b.center, false);
  r.number("width", b.width, true, positive);
  r.number("height", b.height, true, nonnegative);
}

// Compact-support check shared by pump and reservoir bumps.
void warn_support(const BumpSpec& b, double length, const std::string& path,
                  Diagnostics& d) {
  const double fraction = b.width / length;
  if (fraction > 1.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%s: bump width %.6g exceeds the box length %.6g (support "
                  "fraction %.3g); compact-support assumption violated",
                  path.c_str(), b.width, length, fraction);
    d.warnings.emplace_back(buf);
  } else if (path == "params.pump" && fraction > 0.125) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%s: pump width %.6g is more than 1/8 of the box length %.6g; "
                  "the periodic box may feel its own images",
                  path.c_str(), b.width, length);
    d.warnings.emplace_back(buf);
  }
}

void read_profile(const json& j, const std::string& path, ScalarProfile& p,
                  double length, bool allow_zero, Diagnostics& d) {
  ObjectReader r(j, path, d);
  if (!r.valid()) return;
  std::string type;
  r.string("type", type, true);
  if (type == "constant") {
    p.kind = ScalarProfile::Kind::constant;
    r.number("value", p.value, true, nonnegative);
  } else if (type == "bump") {
    p.kind = ScalarProfile::Kind::bump;
    read_bump(r, p.bump, length);
    warn_support(p.bump, length, path, d);
  } else if (type == "zero" && allow_zero) {
    p.kind = ScalarProfile::Kind::zero;
  } else if (!type.empty()) {
    d.error(r.child("type"), "unknown profile '" + type + "' (expected " +
                                 (allow_zero ? "constant, bump or zero)"
                                             : "constant or bump)"));
  }
}

void read_condensate(const json& j, const std::string& path,
                     CondensatePreset& u, Diagnostics& d) {
  ObjectReader r(j, path, d);
  if (!r.valid()) return;
  std::string type;
  r.string("type", type, true);
  if (type == "flat") {
    u.kind = CondensatePreset::Kind::flat;
    r.number("rho", u.rho, true, nonnegative);
    r.number("theta", u.theta, false);
  } else if (type == "gaussian") {
    u.kind = CondensatePreset::Kind::gaussian;
    r.number("amplitude", u.amplitude, false);
    r.number("width", u.width, false, positive);
    double c = 0.0;
    if (r.has("center")) {
      r.number("center", c, true);
      u.center = c;
    }
  } else if (type == "random") {
    u.kind = CondensatePreset::Kind::random;
    r.integer("seed", u.seed, false, 0);
    r.integer("band", u.band, false, 0);
    double m = 0.0;
    if (r.has("mass")) {
      r.number("mass", m, true, positive);
      u.mass = m;
    }
  } else if (!type.empty()) {
    d.error(r.child("type"),
            "unknown preset '" + type + "' (expected flat, gaussian or random)");
  }
}

void read_params(const json& j, RunConfig& c, Diagnostics& d) {
  ObjectReader r(j, "params", d);
  if (!r.valid()) return;
  if (c.model == Model::cgpe) {
    r.number("xi", c.cgpe.xi, false, positive);
    r.number("sigma", c.cgpe.sigma, false, positive);
    return;
  }
  r.number("g", c.g, true);
  r.number("lambda", c.lambda, true);
  r.number("R", c.R, true, positive);
  r.number("alpha", c.alpha, true, positive);
  r.number("beta", c.beta, true, positive);
  if (const json* pump = r.get("pump", true))
    read_profile(*pump, "params.pump", c.pump, c.length, false, d);
}

}  // namespace

ParseResult parse_config(std::string_view text) {
  ParseResult result;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    result.errors.push_back(std::string("<document>: not valid JSON: ") + e.what());
    return result;
  }

  Diagnostics d;
  RunConfig c;
  {
    ObjectReader r(root, "", d);
    if (!r.valid()) {
      result.errors = d.errors;
      return result;
    }
    double version = kSchemaVersion;
    r.number("schema_version", version, false, [](double v) {
      return v == kSchemaVersion ? "" : "unsupported schema version";
    });

    std::string model;
    r.string("model", model, true);
    if (model == "ep") {
      c.model = Model::ep;
    } else if (model != "cgpe" && !model.empty()) {
      d.error("model", "expected 'cgpe' or 'ep' (got '" + model + "')");
    }

    if (const json* grid = r.get("grid", false)) {
      ObjectReader g(*grid, "grid", d);
      g.integer("n_points", c.n_points, false, 4);
      g.number("length", c.length, false, positive);
    }

    if (const json* params = r.get("params", c.model == Model::ep)) {
      read_params(*params, c, d);
    }

    if (const json* initial = r.get("initial", false)) {
      ObjectReader in(*initial, "initial", d);
      if (const json* u = in.get("u", false)) read_condensate(*u, "initial.u", c.u, d);
      if (const json* n = in.get("n", false)) {
        if (c.model == Model::cgpe)
          d.error("initial.n", "reservoir data is only valid for model 'ep'");
        else
          read_profile(*n, "initial.n", c.n, c.length, true, d);
      }
    }

    r.number("dt", c.dt, false, positive);
    r.number("t_end", c.t_end, false, positive);
    r.integer("sample_every", c.sample_every, false, 1);
    r.integer("checkpoint_every", c.checkpoint_every, false, 0);
    r.string("output", c.output, false);
    r.string("inject_fault", c.inject_fault, false);
    if (!c.inject_fault.empty() && c.inject_fault != "mass_jump")
      d.error("inject_fault", "unknown fault '" + c.inject_fault + "'");

    if (const json* checks = r.get("checks", false)) {
      if (!checks->is_array()) {
        d.error("checks", "expected an array of check names");
      } else {
        for (std::size_t i = 0; i < checks->size(); ++i) {
          const json& item = (*checks)[i];
          const std::string path = "checks[" + std::to_string(i) + "]";
          if (!item.is_string()) {
            d.error(path, "expected a string");
            continue;
          }
          const std::string name = item.get<std::string>();
          const auto& known = check_names();
          if (std::find(known.begin(), known.end(), name) == known.end()) {
            d.error(path, "unknown check '" + name + "'");
          } else if (is_cgpe_check(name) != (c.model == Model::cgpe)) {
            d.error(path, "check '" + name + "' does not apply to this model");
          } else {
            c.checks.push_back(name);
          }
        }
      }
    }
  }

  if (c.dt > 0.0 && c.t_end > 0.0 && !(c.dt < c.t_end))
    d.error("dt", "must be smaller than t_end");
  if (c.u.kind == CondensatePreset::Kind::random &&
      c.u.band > static_cast<long>(c.n_points / 2) - 1)
    d.error("initial.u.band", "must be below n_points / 2");

  result.warnings = std::move(d.warnings);
  result.errors = std::move(d.errors);
  if (result.errors.empty()) result.config = std::move(c);
  return result;
}

namespace {

json profile_json(const ScalarProfile& p) {
  switch (p.kind) {
    case ScalarProfile::Kind::constant:
      return {{"type", "constant"}, {"value", p.value}};
    case ScalarProfile::Kind::bump:
      return {{"type", "bump"},
              {"center", p.bump.center},
              {"width", p.bump.width},
              {"height", p.bump.height}};
    case ScalarProfile::Kind::zero:
      break;
  }
  return {{"type", "zero"}};
}

json condensate_json(const CondensatePreset& u) {
  switch (u.kind) {
    case CondensatePreset::Kind::flat:
      return {{"type", "flat"}, {"rho", u.rho}, {"theta", u.theta}};
    case CondensatePreset::Kind::gaussian: {
      json j{{"type", "gaussian"}, {"amplitude", u.amplitude}, {"width", u.width}};
      if (u.center) j["center"] = *u.center;
      return j;
    }
    case CondensatePreset::Kind::random: {
      json j{{"type", "random"}, {"seed", u.seed}, {"band", u.band}};
      if (u.mass) j["mass"] = *u.mass;
      return j;
    }
  }
  return {};
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = c.model == Model::cgpe ? "cgpe" : "ep";
  j["grid"] = {{"n_points", c.n_points}, {"length", c.length}};
  if (c.model == Model::cgpe) {
    j["params"] = {{"xi", c.cgpe.xi}, {"sigma", c.cgpe.sigma}};
  } else {
    j["params"] = {{"g", c.g},         {"lambda", c.lambda}, {"R", c.R},
                   {"alpha", c.alpha}, {"beta", c.beta},     {"pump", profile_json(c.pump)}};
  }
  j["initial"] = {{"u", condensate_json(c.u)}};
  if (c.model == Model::ep) j["initial"]["n"] = profile_json(c.n);
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["sample_every"] = c.sample_every;
  j["checkpoint_every"] = c.checkpoint_every;
  j["checks"] = c.checks;
  j["output"] = c.output;
  if (!c.inject_fault.empty()) j["inject_fault"] = c.inject_fault;
  return j;
}

std::uint64_t config_hash(const RunConfig& c) {
  json j = to_json(c);
  j.erase("output");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void override_seed(RunConfig& c, std::uint64_t seed) {
  if (c.u.kind == CondensatePreset::Kind::random) c.u.seed = seed;
}

Grid1D make_run_grid(const RunConfig& c) { return make_grid(c.n_points, c.length); }

RealField make_profile(const ScalarProfile& p, const Grid1D& g) {
  switch (p.kind) {
    case ScalarProfile::Kind::constant:
      return RealField::constant(g, p.value);
    case ScalarProfile::Kind::bump:
      return RealField::from_function(g, [&](double x) {
        double dist = std::remainder(x - p.bump.center, g.length());
        const double r = 2.0 * std::abs(dist) / p.bump.width;
        return r < 1.0 ? p.bump.height * std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
      });
    case ScalarProfile::Kind::zero:
      break;
  }
  return RealField::zeros(g);
}

EpParams make_ep_params(const RunConfig& c, const Grid1D& g) {
  return EpParams{c.g, c.lambda, c.R, c.alpha, c.beta, make_profile(c.pump, g)};
}

Field random_condensate(const Grid1D& g, std::uint64_t seed, long band,
                        std::optional<double> mass) {
  std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(sseq);
  std::normal_distribution<double> normal;
  Field spec = Field::zeros(g, Representation::spectral);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::labs(g.mode_index(i)) <= band) {
      const double re = normal(rng);
      const double im = normal(rng);
      spec[i] = {re, im};
    }
  }
  Field u = to_physical(spec);
  if (mass) {
    double m = 0.0;
    for (const auto& z : u.values()) m += std::norm(z);
    m *= g.dx();
    if (m > 0.0) {
      const double scale = std::sqrt(*mass / m);
      for (auto& z : u.values()) z *= scale;
    }
  }
  return u;
}

Field make_initial_condensate(const CondensatePreset& p, const Grid1D& g) {
  switch (p.kind) {
    case CondensatePreset::Kind::flat:
      return Field::from_function(g, [&](double) { return std::polar(p.rho, p.theta); });
    case CondensatePreset::Kind::gaussian: {
      const double c = p.center.value_or(0.5 * g.length());
      return Field::from_function(g, [&](double x) {
        const double d = std::remainder(x - c, g.length()) / p.width;
        return cplx{p.amplitude * std::exp(-d * d), 0.0};
      });
    }
    case CondensatePreset::Kind::random:
      return random_condensate(g, p.seed, p.band, p.mass);
  }
  return Field::zeros(g);
}

namespace {

const std::map<std::string, std::string>& builtins() {
  static const std::map<std::string, std::string> docs{
      {"flat_cgpe", R"({
  "model": "cgpe",
  "grid": {"n_points": 64},
  "params": {"xi": 1.0, "sigma": 1.0},
  "initial": {"u": {"type": "flat", "rho": 0.1}},
  "t_end": 5.0, "sample_every": 10,
  "checks": ["f1", "abs_set"]
})"},
      {"gaussian_cgpe", R"({
  "model": "cgpe",
  "initial": {"u": {"type": "gaussian", "amplitude": 1.0, "width": 0.5}},
  "t_end": 5.0, "sample_every": 10,
  "checks": ["f1", "abs_set"]
})"},
      {"ep_default", R"({
  "model": "ep",
  "grid": {"n_points": 128, "length": 40.0},
  "params": {"g": 1.0, "lambda": 1.0, "R": 1.0, "alpha": 0.5, "beta": 2.0,
             "pump": {"type": "bump", "center": 20.0, "width": 5.0, "height": 3.0}},
  "initial": {"u": {"type": "random", "seed": 7, "band": 8, "mass": 4.0},
              "n": {"type": "constant", "value": 0.5}},
  "dt": 5e-3, "t_end": 10.0, "sample_every": 10,
  "checks": ["lyapunov", "reservoir"]
})"},
      {"fault_injection", R"({
  "model": "cgpe",
  "grid": {"n_points": 64},
  "initial": {"u": {"type": "flat", "rho": 3.0}},
  "t_end": 2.0, "sample_every": 10,
  "checks": ["f1", "abs_set"],
  "inject_fault": "mass_jump"
})"},
  };
  return docs;
}

}  // namespace

std::string builtin_config(const std::string& name) {
  const auto& docs = builtins();
  auto it = docs.find(name);
  if (it == docs.end()) throw std::out_of_range("no built-in config '" + name + "'");
  return it->second;
}

std::vector<std::string> builtin_config_names() {
  std::vector<std::string> names;
  for (const auto& [name, doc] : builtins()) names.push_back(name);
  return names;
}

}  // namespace plsim
