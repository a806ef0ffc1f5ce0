#pragma once

// Run configuration: a strict JSON schema (unknown keys are errors) with
// documented defaults. See README.md for the schema reference.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plsim/model_dynamics.hpp"

namespace plsim {

enum class Model { cgpe, ep };

/// Compact bump h exp(1 - 1/(1 - r^2)), r = 2 d / width with d the periodic
/// distance to the centre; zero for |r| >= 1.
struct BumpSpec {
  double center = 0.0;
  double width = 1.0;
  double height = 1.0;
};

struct ScalarProfile {
  enum class Kind { constant, bump, zero } kind = Kind::zero;
  double value = 0.0;  // constant only
  BumpSpec bump;       // bump only
};

struct CondensatePreset {
  enum class Kind { flat, gaussian, random } kind = Kind::gaussian;
  double rho = 1.0, theta = 0.0;                          // flat
  double amplitude = 1.0, width = 0.5;                    // gaussian
  std::optional<double> center;                           // gaussian, default L/2
  std::uint64_t seed = 1;                                 // random
  long band = 16;                                         // random
  std::optional<double> mass;                             // random
};

struct RunConfig {
  Model model = Model::cgpe;
  std::size_t n_points = 256;
  double length = 6.283185307179586;
  CgpeParams cgpe;
  // EP parameters; the pump profile lives in `pump`.
  double g = 0.0, lambda = 0.0, R = 0.0, alpha = 0.0, beta = 0.0;
  ScalarProfile pump;
  CondensatePreset u;
  ScalarProfile n;
  double dt = 1e-3;
  double t_end = 1.0;
  std::size_t sample_every = 1;
  std::size_t checkpoint_every = 0;  // in samples, 0 disables
  std::vector<std::string> checks;
  std::string output = "plsim_out";
  std::string inject_fault;  // "" or "mass_jump"
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;    // every violation found
  std::vector<std::string> warnings;  // valid but suspicious settings
  bool ok() const { return config.has_value(); }
};

ParseResult parse_config(std::string_view text);

/// Canonical JSON form; parse_config(to_json(c).dump()) reproduces c.
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a 64 of the canonical JSON dump without the output directory.
std::uint64_t config_hash(const RunConfig& c);
std::string hash_hex(std::uint64_t h);

/// Replaces the seed of a random condensate preset (no-op otherwise).
void override_seed(RunConfig& c, std::uint64_t seed);

Grid1D make_run_grid(const RunConfig& c);
RealField make_profile(const ScalarProfile& p, const Grid1D& g);
EpParams make_ep_params(const RunConfig& c, const Grid1D& g);
Field make_initial_condensate(const CondensatePreset& p, const Grid1D& g);

/// Seeded band-limited complex Gaussian coefficients on |m| <= band,
/// optionally rescaled to the requested mass.
Field random_condensate(const Grid1D& g, std::uint64_t seed, long band,
                        std::optional<double> mass = std::nullopt);

/// Built-in documents: "flat_cgpe", "gaussian_cgpe", "ep_default",
/// "fault_injection". Throws std::out_of_range for other names.
std::string builtin_config(const std::string& name);
std::vector<std::string> builtin_config_names();

}  // namespace plsim
