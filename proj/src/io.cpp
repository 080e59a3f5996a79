#include "dsqg/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "dsqg/errors.hpp"

namespace dsqg {
namespace {

constexpr char kMagic[4] = {'S', 'Q', 'G', 'B'};

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T take(std::istream& in, const std::string& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigurationError("truncated checkpoint " + path);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Checkpoint make_checkpoint(const SolverState& state, std::uint64_t config_hash) {
  const Geometry& g = state.theta.geometry();
  return {g.grid_size(), g.side_length(), state.t, static_cast<std::uint64_t>(state.step), config_hash,
          state.theta.coefficients()};
}

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write checkpoint " + path);
  out.write(kMagic, 4);
  put<std::uint8_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.n));
  put<double>(out, c.side_length);
  put<double>(out, c.t);
  put<std::uint64_t>(out, c.step);
  put<std::uint64_t>(out, c.config_hash);
  put<std::uint64_t>(out, c.coefficients.size());
  for (double v : c.coefficients) put<double>(out, v);
  if (!out) throw ConfigurationError("failed writing checkpoint " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open checkpoint " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ConfigurationError(path + " is not a checkpoint");
  const auto version = take<std::uint8_t>(in, path);
  if (version != kCheckpointVersion)
    throw ConfigurationError("checkpoint version " + std::to_string(version) + " is not supported");
  Checkpoint c;
  c.n = static_cast<int>(take<std::uint32_t>(in, path));
  c.side_length = take<double>(in, path);
  c.t = take<double>(in, path);
  c.step = take<std::uint64_t>(in, path);
  c.config_hash = take<std::uint64_t>(in, path);
  const auto count = take<std::uint64_t>(in, path);
  const std::uint64_t expected = static_cast<std::uint64_t>(c.n - 1) * static_cast<std::uint64_t>(c.n - 1);
  if (c.n < 2 || count != expected) throw ConfigurationError("checkpoint " + path + " has inconsistent size");
  c.coefficients.resize(count);
  for (auto& v : c.coefficients) v = take<double>(in, path);
  return c;
}

SpectralField checkpoint_field(const Checkpoint& c) {
  return SpectralField(build_square_geometry(c.n, c.side_length), c.coefficients);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> diagnostics_columns(const DiagnosticsParams& params) {
  std::vector<std::string> cols{"t", "sup_norm", "energy", "half_norm", "lipschitz"};
  for (double p : params.ps) cols.push_back("b1_l" + format_double(p));
  for (int m : params.ms) cols.push_back("weighted_m" + std::to_string(m));
  for (double a : params.alphas) cols.push_back("holder_" + format_double(a));
  cols.insert(cols.end(), {"holder_skipped", "u_sup", "normal_rate"});
  return cols;
}

std::vector<std::string> diagnostics_units(const DiagnosticsParams& params) {
  // theta carries [theta]; w1 is L^2-normalized, so it carries 1/L and b1 carries [theta] L
  std::vector<std::string> units{"time", "theta", "theta^2 L^2", "theta^2 L", "theta"};
  for (double p : params.ps)
    units.push_back(std::isinf(p) ? "theta L" : "theta L^" + format_double(1.0 + kDimension / p));
  for (int m : params.ms) units.push_back("theta L^" + format_double(1.0 + 1.0 / (2.0 * m)));
  for (double a : params.alphas) units.push_back("theta L^-" + format_double(a));
  units.insert(units.end(), {"count", "theta", "1"});
  return units;
}

std::string diagnostics_row(const DiagnosticsRecord& r, const DiagnosticsParams& params) {
  std::string row = format_double(r.t);
  auto add = [&](double v) { row += "," + format_double(v); };
  add(r.sup_norm);
  add(r.energy);
  add(r.half_norm);
  add(r.lipschitz);
  for (double p : params.ps) add(r.b1_lp.at(p));
  for (int m : params.ms) add(r.weighted_norm.at(m));
  for (double a : params.alphas) add(r.holder.at(a));
  row += "," + std::to_string(r.holder_skipped);
  add(r.u_sup);
  add(r.normal_rate);
  return row;
}

void write_diagnostics_header(std::ostream& out, const DiagnosticsParams& params, std::uint64_t seed,
                              const std::string& description) {
  out << "# dsqg diagnostics v1 seed=" << seed << "\n";
  if (!description.empty()) out << "# " << description << "\n";
  const auto units = diagnostics_units(params);
  out << "# units:";
  for (std::size_t i = 0; i < units.size(); ++i) out << (i ? "," : " ") << units[i];
  out << "\n";
  const auto cols = diagnostics_columns(params);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
}

std::string report_json(const InequalityReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["min_margin"] = number(r.min_margin);
  j["tolerance"] = r.tolerance;
  j["sample_plan"] = r.sample_plan;
  j["seed"] = r.seed;
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [k, v] : r.fitted_constants) constants[k] = number(v);
  j["fitted_constants"] = constants;
  if (r.regression) {
    j["regression"] = {{"slope", number(r.regression->slope)},
                       {"intercept", number(r.regression->intercept)},
                       {"r_squared", number(r.regression->r_squared)},
                       {"samples", r.regression->samples}};
  }
  j["notes"] = r.notes;
  return j.dump(2);
}

void write_report(const std::string& directory, const InequalityReport& r) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory + "/" + r.name + ".json");
    if (!out) throw ConfigurationError("cannot write report in " + directory);
    out << report_json(r) << "\n";
  }
  std::ofstream out(directory + "/" + r.name + "_margins.csv");
  out << "# " << r.name << " seed=" << r.seed << "\nlabel,margin\n";
  for (const auto& m : r.margins) out << m.label << "," << format_double(m.value) << "\n";
}

void write_grid_csv(const std::string& path, const GridField& field) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot write " + path);
  const Geometry& g = field.geometry();
  out << "x,y,value\n";
  for (int i = 1; i < g.grid_size(); ++i)
    for (int j = 1; j < g.grid_size(); ++j)
      out << format_double(g.node(i)) << "," << format_double(g.node(j)) << "," << format_double(field.at(i, j)) << "\n";
}

}  // namespace dsqg
