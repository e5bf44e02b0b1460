#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "platehom/cli.hpp"

namespace platehom::cli {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "microstructure", "generator", "d",     "N",       "phase_a",
      "phase_b",        "fraction",  "axis",  "radius",  "reference",
      "lambda0",        "tolerance", "max_iterations",   "E0",
      "out",            "seed",      "power_iterations", "y",
      "cutoff",         "field"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::pair<std::string, std::string> split_assignment(const std::string& line) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("expected key=value, got '" + line + "'");
  }
  std::string key = trim(std::string_view(line).substr(0, eq));
  std::string value = trim(std::string_view(line).substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key in '" + line + "'");
  if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
  return {std::move(key), std::move(value)};
}

double to_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return value;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(key + ": '" + text + "' is not an integer");
  }
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const long long v = to_integer(key, text);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": value out of range");
  }
  return static_cast<int>(v);
}

// Numbers separated by whitespace or commas.
std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::string spaced = text;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream in(spaced);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(to_double(key, token));
  if (out.empty()) throw ConfigError(key + ": empty value");
  return out;
}

StiffTensor4 to_phase(const std::string& key, const std::string& text, int dim) {
  const std::vector<double> v = to_list(key, text);
  const int m = mandel_size(dim);
  if (v.size() == 1) return StiffTensor4::scalar(dim, v[0]);
  if (static_cast<int>(v.size()) != m * (m + 1) / 2) {
    throw ConfigError(key + ": expected 1 or " + std::to_string(m * (m + 1) / 2) +
                      " numbers");
  }
  MandelMatrix c(m, m);
  std::size_t next = 0;
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) c(a, b) = c(b, a) = v[next++];
  }
  return StiffTensor4::from_mandel(c);
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto [key, value] = split_assignment(line);
    values[key] = value;
  }
  return values;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_key_values(in);
}

void apply_override(KeyValues& values, const std::string& assignment) {
  auto [key, value] = split_assignment(assignment);
  values[key] = value;
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig sc;
  sc.tolerance = tolerance;
  sc.max_iterations = max_iterations;
  sc.macro_curvature = macro_curvature;
  return sc;
}

RunConfig build_config(const KeyValues& values) {
  RunConfig cfg;
  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };

  if (auto v = get("d")) cfg.dim = to_int("d", *v);
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("d must be 2 or 3");
  if (auto v = get("N")) cfg.n = to_int("N", *v);
  if (cfg.n < 2) throw ConfigError("N must be >= 2");

  if (auto v = get("microstructure")) {
    if (v->empty()) throw ConfigError("microstructure: empty path");
    cfg.microstructure_file = *v;
  }
  if (auto v = get("generator")) {
    GeneratorSpec gen;
    gen.kind = *v;
    static const std::set<std::string> kinds{"homogeneous", "laminate",
                                             "chessboard", "inclusion"};
    if (!kinds.count(gen.kind)) throw ConfigError("unknown generator '" + gen.kind + "'");
    const std::string* a = get("phase_a");
    if (!a) throw ConfigError("generator '" + gen.kind + "' needs phase_a");
    gen.phase_a = to_phase("phase_a", *a, cfg.dim);
    if (gen.kind != "homogeneous") {
      const std::string* b = get("phase_b");
      if (!b) throw ConfigError("generator '" + gen.kind + "' needs phase_b");
      gen.phase_b = to_phase("phase_b", *b, cfg.dim);
    }
    if (auto f = get("fraction")) gen.fraction = to_double("fraction", *f);
    if (auto f = get("axis")) gen.axis = to_int("axis", *f);
    if (auto f = get("radius")) gen.radius = to_double("radius", *f);
    cfg.generator = gen;
  }
  if (cfg.microstructure_file && cfg.generator) {
    throw ConfigError("give either microstructure or generator, not both");
  }

  if (auto v = get("reference")) {
    try {
      cfg.strategy = parse_reference_strategy(*v);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = get("lambda0")) {
    cfg.lambda0 = to_double("lambda0", *v);
    if (!(*cfg.lambda0 > 0.0)) throw ConfigError("lambda0 must be positive");
  }
  if (cfg.strategy == ReferenceStrategy::manual && !cfg.lambda0) {
    throw ConfigError("reference=manual needs lambda0");
  }
  if (cfg.strategy != ReferenceStrategy::manual && cfg.lambda0) {
    throw ConfigError("lambda0 is only used with reference=manual");
  }

  if (auto v = get("tolerance")) cfg.tolerance = to_double("tolerance", *v);
  if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (auto v = get("max_iterations")) cfg.max_iterations = to_int("max_iterations", *v);
  if (cfg.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");

  const int m = mandel_size(cfg.dim);
  cfg.macro_curvature = SymTensor2::basis(cfg.dim, 0);
  if (auto v = get("E0")) {
    const std::vector<double> e = to_list("E0", *v);
    if (static_cast<int>(e.size()) != m) {
      throw ConfigError("E0 needs " + std::to_string(m) + " Mandel components");
    }
    cfg.macro_curvature = SymTensor2::from_mandel(
        cfg.dim, Eigen::Map<const Eigen::VectorXd>(e.data(), m));
  }

  if (auto v = get("out")) cfg.output_dir = *v;
  if (auto v = get("seed")) {
    const long long s = to_integer("seed", *v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("power_iterations")) cfg.power_iterations = to_int("power_iterations", *v);
  if (cfg.power_iterations < 10) throw ConfigError("power_iterations must be >= 10");

  cfg.point.assign(static_cast<std::size_t>(cfg.dim), 0.0);
  if (auto v = get("y")) {
    cfg.point = to_list("y", *v);
    if (static_cast<int>(cfg.point.size()) != cfg.dim) {
      throw ConfigError("y needs " + std::to_string(cfg.dim) + " coordinates");
    }
  }
  if (auto v = get("cutoff")) cfg.cutoff = to_int("cutoff", *v);
  if (cfg.cutoff < 1) throw ConfigError("cutoff must be >= 1");
  if (auto v = get("field")) cfg.field_file = *v;
  return cfg;
}

CoefficientField make_microstructure(const RunConfig& config) {
  if (config.microstructure_file) {
    if (!std::filesystem::is_regular_file(*config.microstructure_file)) {
      throw ConfigError("microstructure file '" +
                        config.microstructure_file->string() + "' not found");
    }
    return load_microstructure(*config.microstructure_file);
  }
  if (!config.generator) {
    throw ConfigError("no microstructure: set microstructure or generator");
  }
  const GeneratorSpec& g = *config.generator;
  if (g.kind == "homogeneous") return generate_homogeneous(g.phase_a, config.n);
  if (g.kind == "laminate") {
    return generate_laminate(g.phase_a, g.phase_b, g.fraction, g.axis, config.n);
  }
  if (g.kind == "chessboard") return generate_chessboard(g.phase_a, g.phase_b, config.n);
  return generate_inclusion(g.phase_a, g.phase_b, g.radius, config.n);
}

}  // namespace platehom::cli
