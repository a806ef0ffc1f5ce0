#include "plsim/persistence.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "plsim/config.hpp"

namespace plsim {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "PLSIM1";

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::string_view in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
  return v;
}

double get_f64(std::string_view in, std::size_t at) {
  return std::bit_cast<double>(get_u64(in, at));
}

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  const Field u = to_physical(c.u);
  const Grid1D& g = u.grid();
  if (c.n && !(c.n->grid() == g))
    throw std::invalid_argument("checkpoint: reservoir grid differs from condensate grid");
  const std::size_t payload = g.size() * 16 + (c.n ? g.size() * 8 : 0);
  const json header{{"format_version", kCheckpointVersion},
                    {"config_hash", hash_hex(c.config_hash)},
                    {"time", c.time},
                    {"grid", {{"n_points", g.size()}, {"length", g.length()}}},
                    {"has_reservoir", c.n.has_value()},
                    {"payload_bytes", payload}};
  const std::string text = header.dump();

  std::string out(kMagic);
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((len >> (8 * b)) & 0xff));
  out += text;
  out.reserve(out.size() + payload);
  for (const auto& z : u.values()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  if (c.n) {
    for (double x : c.n->values()) put_f64(out, x);
  }
  return out;
}

Checkpoint decode_checkpoint(std::string_view bytes,
                             std::optional<std::uint64_t> expected_hash) {
  if (bytes.size() < kMagic.size() + 4 || bytes.substr(0, kMagic.size()) != kMagic)
    throw FormatError("checkpoint: bad magic bytes");
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b)
    len |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[kMagic.size() + b]))
           << (8 * b);
  const std::size_t header_at = kMagic.size() + 4;
  if (bytes.size() < header_at + len) throw FormatError("checkpoint: truncated header");

  json h;
  try {
    h = json::parse(bytes.substr(header_at, len));
    if (h.at("format_version").get<int>() != kCheckpointVersion)
      throw FormatError("checkpoint: unsupported format version");
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: malformed header: ") + e.what());
  }

  std::uint64_t hash = 0;
  double time = 0.0;
  std::size_t n_points = 0;
  double length = 0.0;
  bool has_reservoir = false;
  std::size_t payload = 0;
  try {
    hash = std::stoull(h.at("config_hash").get<std::string>(), nullptr, 16);
    time = h.at("time").get<double>();
    n_points = h.at("grid").at("n_points").get<std::size_t>();
    length = h.at("grid").at("length").get<double>();
    has_reservoir = h.at("has_reservoir").get<bool>();
    payload = h.at("payload_bytes").get<std::size_t>();
  } catch (const std::exception& e) {
    throw FormatError(std::string("checkpoint: malformed header: ") + e.what());
  }
  const std::size_t expected = n_points * 16 + (has_reservoir ? n_points * 8 : 0);
  if (payload != expected)
    throw FormatError("checkpoint: payload size inconsistent with grid");
  if (bytes.size() - header_at - len != payload)
    throw FormatError("checkpoint: payload length does not match header");
  if (expected_hash && *expected_hash != hash)
    throw FormatError("checkpoint: config hash " + hash_hex(hash) +
                      " does not match " + hash_hex(*expected_hash));

  if (n_points < 4 || n_points % 2 != 0 || !(length > 0.0))
    throw FormatError("checkpoint: invalid grid in header");
  const Grid1D g = make_grid(n_points, length);
  std::size_t at = header_at + len;
  std::vector<cplx> u(n_points);
  for (auto& z : u) {
    z = {get_f64(bytes, at), get_f64(bytes, at + 8)};
    at += 16;
  }
  Checkpoint c{hash, time, Field(g, std::move(u)), std::nullopt};
  if (has_reservoir) {
    std::vector<double> n(n_points);
    for (auto& x : n) {
      x = get_f64(bytes, at);
      at += 8;
    }
    c.n = RealField(g, std::move(n));
  }
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_file(path, encode_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_hash) {
  try {
    return decode_checkpoint(read_file(path), expected_hash);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string diagnostics_csv(const DiagnosticsSeries& d) {
  std::string out = d.has_reservoir()
                        ? "t,mass,l4_fourth,n_integral,n_sq_integral,n_min\n"
                        : "t,mass,l4_fourth\n";
  char buf[64];
  auto cell = [&](double x, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
    out += last ? '\n' : ',';
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool r = d.has_reservoir();
    cell(d.times[i], false);
    cell(d.mass[i], false);
    cell(d.l4_fourth[i], !r);
    if (r) {
      cell(d.n_integral[i], false);
      cell(d.n_sq_integral[i], false);
      cell(d.n_min[i], true);
    }
  }
  return out;
}

DiagnosticsSeries parse_diagnostics_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw FormatError("diagnostics CSV: empty input");
  bool reservoir = false;
  if (line == "t,mass,l4_fourth,n_integral,n_sq_integral,n_min") {
    reservoir = true;
  } else if (line != "t,mass,l4_fourth") {
    throw FormatError("diagnostics CSV: unexpected header '" + line + "'");
  }
  const std::size_t columns = reservoir ? 6 : 3;
  DiagnosticsSeries d;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0')
        throw FormatError("diagnostics CSV: bad number '" + cell + "' on line " +
                          std::to_string(row));
      v.push_back(x);
    }
    if (v.size() != columns)
      throw FormatError("diagnostics CSV: wrong column count on line " +
                        std::to_string(row));
    d.times.push_back(v[0]);
    d.mass.push_back(v[1]);
    d.l4_fourth.push_back(v[2]);
    if (reservoir) {
      d.n_integral.push_back(v[3]);
      d.n_sq_integral.push_back(v[4]);
      d.n_min.push_back(v[5]);
    }
  }
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("diagnostics CSV: ") + e.what());
  }
  return d;
}

json report_json(const CheckReport& r) {
  json j{{"name", r.name},
         {"passed", r.passed},
         {"worst_margin", r.worst_margin},
         {"location", r.location},
         {"tolerance", r.tolerance}};
  if (!r.parts.empty()) {
    j["parts"] = json::array();
    for (const auto& p : r.parts) j["parts"].push_back(report_json(p));
  }
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw std::runtime_error("read error on " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write error on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() +
                                   ": " + ec.message());
}

}  // namespace plsim
