#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "platehom/microstructure.hpp"
#include "platehom/solver.hpp"
#include "platehom/tensor_core.hpp"

namespace platehom::cli {

/// Exit codes of the command-line front end.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

class ConfigError : public Error {
 public:
  using Error::Error;
};

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` lines; blank lines and `#` comments are ignored.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Applies a `key=value` override.
void apply_override(KeyValues& values, const std::string& assignment);

struct GeneratorSpec {
  std::string kind;  // homogeneous | laminate | chessboard | inclusion
  StiffTensor4 phase_a{2};
  StiffTensor4 phase_b{2};
  double fraction = 0.5;
  int axis = 0;
  double radius = 0.25;
};

struct RunConfig {
  std::optional<std::filesystem::path> microstructure_file;
  std::optional<GeneratorSpec> generator;
  int dim = 2;
  int n = 32;
  ReferenceStrategy strategy = ReferenceStrategy::arithmetic;
  std::optional<double> lambda0;
  double tolerance = 1e-8;
  int max_iterations = 5000;
  SymTensor2 macro_curvature = SymTensor2::basis(2, 0);
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
  int power_iterations = 200;
  std::vector<double> point{0.0, 0.0};
  int cutoff = 8;
  std::optional<std::filesystem::path> field_file;

  SolverConfig solver_config() const;
};

/// Recognized keys: microstructure, generator, d, N, phase_a, phase_b,
/// fraction, axis, radius, reference, lambda0, tolerance, max_iterations, E0,
/// out, seed, power_iterations, y, cutoff, field. A phase is either one
/// number c (c times the identity) or the m(m+1)/2 upper-triangle entries of
/// its Mandel matrix; E0 is given by its m Mandel components.
RunConfig build_config(const KeyValues& values);

/// Builds the coefficient field from the configured source. Requires exactly
/// one source.
CoefficientField make_microstructure(const RunConfig& config);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace platehom::cli
