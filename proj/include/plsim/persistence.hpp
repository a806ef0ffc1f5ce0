#pragma once

// On-disk formats: checkpoints, diagnostics CSV and check reports.
//
// Checkpoint layout:
//   "PLSIM1" | uint32 LE header length | JSON header | payload
// where the payload holds little-endian float64 (re, im) pairs of u
// followed, when present, by float64 values of n.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plsim/bound_checks.hpp"
#include "plsim/diagnostics.hpp"
#include "plsim/spectral_grid.hpp"

namespace plsim {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::uint64_t config_hash = 0;
  double time = 0.0;
  Field u;
  std::optional<RealField> n;
};

inline constexpr int kCheckpointVersion = 1;

std::string encode_checkpoint(const Checkpoint& c);

/// Validates magic, header fields and payload length; with
/// `expected_hash` also the producing configuration. Throws FormatError.
Checkpoint decode_checkpoint(std::string_view bytes,
                             std::optional<std::uint64_t> expected_hash = {});

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_hash = {});

/// Header row t,mass,l4_fourth[,n_integral,n_sq_integral,n_min]; values
/// printed with 17 significant digits.
std::string diagnostics_csv(const DiagnosticsSeries& d);
DiagnosticsSeries parse_diagnostics_csv(std::string_view text);

nlohmann::json report_json(const CheckReport& r);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames; throws std::runtime_error
/// naming the path on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace plsim
