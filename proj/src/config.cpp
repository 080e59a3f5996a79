#include "dsqg/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "dsqg/inequalities.hpp"

namespace dsqg {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"", {"schema_version"}},
      {"geometry", {"n", "side_length", "corner_radius"}},
      {"solver",
       {"dt", "cfl", "t_end", "dealias", "dissipation_power", "rotation_sign", "output_interval",
        "overshoot_tolerance", "max_halvings", "seed", "checkpoint_every"}},
      {"initial", {"kind", "amplitude", "perturbation", "m", "n", "max_mode", "seed"}},
      {"drift", {"kind", "amplitude"}},
      {"diagnostics", {"alphas", "ps", "ms", "normal_rate", "normal_l0", "holder_alpha", "holder_p"}},
      {"verify", {"names", "family_size", "max_mode", "seed", "kernel_samples", "phi", "p"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <class T>
  void get(const std::string& key, T& target) {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!node) return;
    const std::string text = trim(*node);
    if constexpr (std::is_same_v<T, std::string>) {
      target = text;
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") target = true;
      else if (text == "false" || text == "0") target = false;
      else errors.push_back(key + ": expected true or false, got '" + text + "'");
    } else {
      std::istringstream in(text);
      T value{};
      in >> value;
      if (in.fail() || !in.eof()) {
        errors.push_back(key + ": cannot parse '" + text + "'");
        return;
      }
      target = value;
    }
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& target) {
    const auto node = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!node) return;
    std::vector<T> values;
    for (const std::string& item : split_list(*node)) {
      if constexpr (std::is_same_v<T, std::string>) {
        values.push_back(item);
      } else {
        std::istringstream in(item);
        T value{};
        in >> value;
        if (in.fail() || !in.eof()) {
          errors.push_back(key + ": cannot parse list item '" + item + "'");
          continue;
        }
        values.push_back(value);
      }
    }
    target = std::move(values);
  }

  std::vector<std::string> errors;

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree, std::vector<std::string>& errors) {
  const auto& keys = known_keys();
  for (const auto& [name, child] : tree) {
    if (child.empty()) {
      if (!keys.at("").count(name)) errors.push_back("unknown key '" + name + "'");
      continue;
    }
    const auto section = keys.find(name);
    if (section == keys.end() || name.empty()) {
      errors.push_back("unknown section [" + name + "]");
      continue;
    }
    for (const auto& [key, value] : child)
      if (!section->second.count(key)) errors.push_back("unknown key '" + key + "' in [" + name + "]");
  }
}

[[noreturn]] void fail(const std::vector<std::string>& errors) {
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  " + e;
  throw ConfigurationError(msg);
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "schema_version=" << schema_version << "\n";
  out << "geometry.n=" << geometry.n << "\ngeometry.side_length=" << geometry.side_length << "\n";
  if (geometry.corner_radius) out << "geometry.corner_radius=" << *geometry.corner_radius << "\n";
  out << "solver.dt=" << solver.dt << "\nsolver.cfl=" << solver.cfl << "\nsolver.t_end=" << solver.t_end
      << "\nsolver.dealias=" << solver.dealias << "\nsolver.dissipation_power=" << solver.dissipation_power
      << "\nsolver.rotation_sign=" << solver.rotation_sign << "\nsolver.output_interval=" << solver.output_interval
      << "\nsolver.overshoot_tolerance=" << solver.overshoot_tolerance
      << "\nsolver.max_halvings=" << solver.max_halvings << "\nsolver.seed=" << solver.seed << "\n";
  out << "initial.kind=" << initial.kind << "\ninitial.amplitude=" << initial.amplitude
      << "\ninitial.perturbation=" << initial.perturbation << "\ninitial.m=" << initial.m << "\ninitial.n="
      << initial.n << "\ninitial.max_mode=" << initial.max_mode << "\ninitial.seed=" << initial.seed << "\n";
  out << "drift.kind=" << drift.kind << "\ndrift.amplitude=" << drift.amplitude << "\n";
  return out.str();
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  if (c.schema_version != kSchemaVersion)
    e.push_back("schema_version " + std::to_string(c.schema_version) + " is not supported (expected " +
                std::to_string(kSchemaVersion) + ")");
  if (c.geometry.n < 8) e.push_back("geometry.n: N >= 8 required");
  if (!(c.geometry.side_length > 0.0) || !std::isfinite(c.geometry.side_length))
    e.push_back("geometry.side_length: L > 0 required");
  if (c.geometry.corner_radius && !(*c.geometry.corner_radius > 0.0 && *c.geometry.corner_radius < c.geometry.side_length / 2))
    e.push_back("geometry.corner_radius: must lie in (0, L/2)");
  const SolverConfig& s = c.solver;
  if (!(s.dt > 0.0)) e.push_back("solver.dt: must be positive");
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) e.push_back("solver.cfl: must lie in (0, 1]");
  if (!(s.t_end >= 0.0)) e.push_back("solver.t_end: must be >= 0");
  if (!(s.dealias >= 1.5)) e.push_back("solver.dealias: must be >= 1.5");
  if (!(s.dissipation_power > 0.0 && s.dissipation_power <= 2.0)) e.push_back("solver.dissipation_power: must lie in (0, 2]");
  if (s.rotation_sign != 1 && s.rotation_sign != -1) e.push_back("solver.rotation_sign: must be +1 or -1");
  if (!(s.output_interval > 0.0)) e.push_back("solver.output_interval: must be positive");
  if (!(s.overshoot_tolerance >= 0.0)) e.push_back("solver.overshoot_tolerance: must be >= 0");
  if (s.max_halvings < 0) e.push_back("solver.max_halvings: must be >= 0");
  if (c.checkpoint_every < 0) e.push_back("solver.checkpoint_every: must be >= 0");
  static const std::set<std::string> initial_kinds{"ground_state", "perturbed", "truncated_constant", "mode", "random"};
  if (!initial_kinds.count(c.initial.kind)) e.push_back("initial.kind: unknown kind '" + c.initial.kind + "'");
  if (c.initial.m < 1 || c.initial.n < 1 || c.initial.m >= c.geometry.n || c.initial.n >= c.geometry.n)
    e.push_back("initial.m, initial.n: modes must lie in [1, N-1]");
  if (c.initial.max_mode < 1 || c.initial.max_mode >= c.geometry.n) e.push_back("initial.max_mode: must lie in [1, N-1]");
  if (c.drift.kind != "none" && c.drift.kind != "stream21") e.push_back("drift.kind: must be none or stream21");
  if (!std::isfinite(c.drift.amplitude)) e.push_back("drift.amplitude: must be finite");
  for (double a : c.diagnostics.alphas)
    if (!(a > 0.0 && a < 1.0)) e.push_back("diagnostics.alphas: each alpha must lie in (0, 1)");
  for (double p : c.diagnostics.ps)
    if (!(p >= 1.0)) e.push_back("diagnostics.ps: each p must be >= 1");
  for (int m : c.diagnostics.ms)
    if (m < 1) e.push_back("diagnostics.ms: each m must be >= 1");
  if (!(c.holder_alpha > 0.0 && c.holder_alpha < 1.0)) e.push_back("diagnostics.holder_alpha: must lie in (0, 1)");
  if (!(c.holder_p >= 1.0)) e.push_back("diagnostics.holder_p: must be >= 1");
  if (c.verify.family_size < 1) e.push_back("verify.family_size: must be >= 1");
  if (c.verify.max_mode < 1 || c.verify.max_mode >= c.geometry.n) e.push_back("verify.max_mode: must lie in [1, N-1]");
  if (c.verify.kernel_samples < 2) e.push_back("verify.kernel_samples: must be >= 2");
  if (!(c.verify.p > 2.0)) e.push_back("verify.p: must be > 2");
  if (c.output_dir.empty()) e.push_back("output.dir: must not be empty");
  return e;
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& err) {
    throw ConfigurationError(std::string("config syntax error: ") + err.message() + " (line " +
                             std::to_string(err.line()) + ")");
  }
  std::vector<std::string> errors;
  check_keys(tree, errors);

  RunConfig c;
  Reader r(tree);
  r.get("schema_version", c.schema_version);
  r.get("geometry.n", c.geometry.n);
  r.get("geometry.side_length", c.geometry.side_length);
  if (tree.get_optional<std::string>("geometry.corner_radius")) {
    double radius = 0.0;
    r.get("geometry.corner_radius", radius);
    c.geometry.corner_radius = radius;
  }
  r.get("solver.dt", c.solver.dt);
  r.get("solver.cfl", c.solver.cfl);
  r.get("solver.t_end", c.solver.t_end);
  r.get("solver.dealias", c.solver.dealias);
  r.get("solver.dissipation_power", c.solver.dissipation_power);
  r.get("solver.rotation_sign", c.solver.rotation_sign);
  r.get("solver.output_interval", c.solver.output_interval);
  r.get("solver.overshoot_tolerance", c.solver.overshoot_tolerance);
  r.get("solver.max_halvings", c.solver.max_halvings);
  r.get("solver.seed", c.solver.seed);
  r.get("solver.checkpoint_every", c.checkpoint_every);
  r.get("initial.kind", c.initial.kind);
  r.get("initial.amplitude", c.initial.amplitude);
  r.get("initial.perturbation", c.initial.perturbation);
  r.get("initial.m", c.initial.m);
  r.get("initial.n", c.initial.n);
  r.get("initial.max_mode", c.initial.max_mode);
  r.get("initial.seed", c.initial.seed);
  r.get("drift.kind", c.drift.kind);
  r.get("drift.amplitude", c.drift.amplitude);
  r.get_list("diagnostics.alphas", c.diagnostics.alphas);
  r.get_list("diagnostics.ps", c.diagnostics.ps);
  r.get_list("diagnostics.ms", c.diagnostics.ms);
  r.get("diagnostics.normal_rate", c.diagnostics.normal_rate);
  r.get("diagnostics.normal_l0", c.diagnostics.normal_l0);
  r.get("diagnostics.holder_alpha", c.holder_alpha);
  r.get("diagnostics.holder_p", c.holder_p);
  r.get_list("verify.names", c.verify.names);
  r.get("verify.family_size", c.verify.family_size);
  r.get("verify.max_mode", c.verify.max_mode);
  r.get("verify.seed", c.verify.seed);
  r.get("verify.kernel_samples", c.verify.kernel_samples);
  r.get("verify.phi", c.verify.phi);
  r.get("verify.p", c.verify.p);
  r.get("output.dir", c.output_dir);
  errors.insert(errors.end(), r.errors.begin(), r.errors.end());

  const auto range = validate(c);
  errors.insert(errors.end(), range.begin(), range.end());
  if (!errors.empty()) fail(errors);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig c = parse_config(text.str());
  if (const char* dir = std::getenv("SQG_OUTPUT_DIR"); dir && *dir) c.output_dir = dir;
  return c;
}

GeometryPtr make_geometry(const RunConfig& config) {
  return build_square_geometry(config.geometry.n, config.geometry.side_length, config.geometry.corner_radius);
}

SpectralField make_initial(const GeometryPtr& geometry, const InitialSettings& s) {
  if (s.kind == "ground_state") return SpectralField::mode(geometry, 1, 1, s.amplitude);
  if (s.kind == "perturbed")
    return SpectralField::mode(geometry, 1, 1, s.amplitude) + SpectralField::mode(geometry, 1, 2, s.perturbation);
  if (s.kind == "mode") return SpectralField::mode(geometry, s.m, s.n, s.amplitude);
  if (s.kind == "truncated_constant") return s.amplitude * truncated_constant(geometry);
  if (s.kind == "random") return s.amplitude * random_family(geometry, 1, s.max_mode, s.seed).front();
  throw ConfigurationError("unknown initial kind '" + s.kind + "'");
}

std::optional<SpectralField> make_drift(const GeometryPtr& geometry, const DriftSettings& s) {
  if (s.kind == "none") return std::nullopt;
  if (s.kind == "stream21") return SpectralField::mode(geometry, 2, 1, s.amplitude);
  throw ConfigurationError("unknown drift kind '" + s.kind + "'");
}

SolverConfig make_solver_config(const RunConfig& config, const GeometryPtr& geometry) {
  SolverConfig s = config.solver;
  s.drift_stream = make_drift(geometry, config.drift);
  s.mode = s.drift_stream ? DriftMode::kPrescribed : DriftMode::kSqg;
  return s;
}

}  // namespace dsqg
