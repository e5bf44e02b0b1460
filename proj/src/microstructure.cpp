#include "platehom/microstructure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>

namespace platehom {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

void check_resolution(int n) {
  if (n < 2) throw InvalidArgument("grid resolution N must be >= 2");
}

std::array<int, 3> unravel(std::size_t voxel, int dim, int n) {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(voxel % n);
    voxel /= n;
  }
  return idx;
}

PhaseTable two_phase_table(const StiffTensor4& a, const StiffTensor4& b) {
  if (a.dim() != b.dim()) throw DimensionError("phase dimension mismatch");
  return PhaseTable({{kPhaseA, a}, {kPhaseB, b}});
}

}  // namespace

PhaseTable::PhaseTable(std::map<int, StiffTensor4> phases,
                       std::optional<double> alpha)
    : dim_{0}, alpha_{0.0}, phases_{std::move(phases)} {
  if (phases_.empty()) throw InvalidArgument("phase table is empty");
  dim_ = phases_.begin()->second.dim();
  double mu_min = std::numeric_limits<double>::infinity();
  double mu_max = 0.0;
  for (const auto& [id, c] : phases_) {
    if (c.dim() != dim_) throw DimensionError("phase dimension mismatch");
    const auto mu = eigenvalues(c);
    if (!(mu.front() > 0.0)) {
      throw InvalidArgument("phase " + std::to_string(id) +
                            " is not positive definite");
    }
    mu_min = std::min(mu_min, mu.front());
    mu_max = std::max(mu_max, mu.back());
  }
  const double admissible = std::min(mu_min, 1.0 / mu_max);
  if (alpha) {
    constexpr double slack = 1e-12;
    if (!(*alpha > 0.0) || *alpha > admissible * (1.0 + slack)) {
      throw InvalidArgument("declared ellipticity constant violated by phases");
    }
    alpha_ = *alpha;
  } else {
    alpha_ = admissible;
  }
}

const StiffTensor4& PhaseTable::at(int id) const {
  auto it = phases_.find(id);
  if (it == phases_.end()) {
    throw InvalidArgument("unknown phase id " + std::to_string(id));
  }
  return it->second;
}

// ---------------------------------------------------------------------------

CoefficientField::CoefficientField(int dim, int n, std::vector<int> phase_map,
                                   PhaseTable table)
    : dim_{dim}, n_{n}, phase_map_{std::move(phase_map)},
      table_{std::move(table)} {
  check_resolution(n);
  if (dim != table_.dim()) {
    throw DimensionError("field dimension differs from phase table");
  }
  if (phase_map_.size() != ipow(n, dim)) {
    throw InvalidArgument("phase map has " + std::to_string(phase_map_.size()) +
                          " entries, expected " + std::to_string(ipow(n, dim)));
  }
  for (int id : phase_map_) {
    if (!table_.contains(id)) {
      throw InvalidArgument("phase map references unknown phase " +
                            std::to_string(id));
    }
  }
}

std::array<int, 3> CoefficientField::voxel_index(std::size_t voxel) const {
  return unravel(voxel, dim_, n_);
}

std::size_t CoefficientField::flat_index(std::array<int, 3> index) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int i = ((index[a] % n_) + n_) % n_;
    flat = flat * n_ + static_cast<std::size_t>(i);
  }
  return flat;
}

std::array<double, 3> CoefficientField::voxel_center(std::size_t voxel) const {
  const auto idx = voxel_index(voxel);
  std::array<double, 3> y{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) y[a] = (idx[a] + 0.5) / n_;
  return y;
}

std::map<int, double> CoefficientField::volume_fractions() const {
  std::map<int, std::size_t> counts;
  for (int id : phase_map_) ++counts[id];
  std::map<int, double> out;
  for (const auto& [id, count] : counts) {
    out[id] = static_cast<double>(count) / static_cast<double>(voxel_count());
  }
  return out;
}

bool operator==(const CoefficientField& a, const CoefficientField& b) {
  if (a.dim_ != b.dim_ || a.n_ != b.n_ || a.phase_map_ != b.phase_map_) {
    return false;
  }
  return a.table_.phases() == b.table_.phases();
}

// ---------------------------------------------------------------------------

CoefficientField generate_homogeneous(const StiffTensor4& c, int n) {
  check_resolution(n);
  return CoefficientField(c.dim(), n,
                          std::vector<int>(ipow(n, c.dim()), kPhaseA),
                          PhaseTable({{kPhaseA, c}}));
}

CoefficientField generate_laminate(const StiffTensor4& c_a,
                                   const StiffTensor4& c_b,
                                   double volume_fraction, int axis, int n) {
  check_resolution(n);
  const int dim = c_a.dim();
  if (axis < 0 || axis >= dim) throw InvalidArgument("laminate axis out of range");
  if (!(volume_fraction > 0.0 && volume_fraction < 1.0)) {
    throw InvalidArgument("volume fraction must lie in (0, 1)");
  }
  const double slabs = volume_fraction * n;
  const double rounded = std::round(slabs);
  if (std::abs(slabs - rounded) > 1e-9 * n) {
    throw InvalidArgument("volume fraction " + std::to_string(volume_fraction) +
                          " is not representable on N = " + std::to_string(n));
  }
  const int count_a = static_cast<int>(rounded);
  auto table = two_phase_table(c_a, c_b);
  std::vector<int> map(ipow(n, dim));
  for (std::size_t v = 0; v < map.size(); ++v) {
    map[v] = unravel(v, dim, n)[axis] < count_a ? kPhaseA : kPhaseB;
  }
  return CoefficientField(dim, n, std::move(map), std::move(table));
}

CoefficientField generate_chessboard(const StiffTensor4& c_a,
                                     const StiffTensor4& c_b, int n) {
  check_resolution(n);
  if (n % 2 != 0) throw InvalidArgument("chessboard requires even N");
  if (c_a.dim() != 2) throw DimensionError("chessboard is defined for d = 2");
  std::vector<int> map(ipow(n, 2));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int parity = (2 * i / n + 2 * j / n) % 2;
      map[static_cast<std::size_t>(i) * n + j] = parity == 0 ? kPhaseA : kPhaseB;
    }
  }
  return CoefficientField(2, n, std::move(map), two_phase_table(c_a, c_b));
}

CoefficientField generate_inclusion(const StiffTensor4& c_matrix,
                                    const StiffTensor4& c_inclusion,
                                    double radius, int n) {
  check_resolution(n);
  if (!(radius > 0.0 && radius < 0.5)) {
    throw InvalidArgument("inclusion radius must lie in (0, 0.5)");
  }
  const int dim = c_matrix.dim();
  auto table = two_phase_table(c_matrix, c_inclusion);
  std::vector<int> map(ipow(n, dim), kPhaseA);
  for (std::size_t v = 0; v < map.size(); ++v) {
    const auto idx = unravel(v, dim, n);
    double dist2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      double delta = std::abs((idx[a] + 0.5) / n - 0.5);
      delta = std::min(delta, 1.0 - delta);
      dist2 += delta * delta;
    }
    if (dist2 <= radius * radius) map[v] = kPhaseB;
  }
  return CoefficientField(dim, n, std::move(map), std::move(table));
}

// ---------------------------------------------------------------------------

CoefficientField load_microstructure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open microstructure file " + path.string());

  std::string line;
  if (!std::getline(in, line) || line.rfind("plate-micro v1", 0) != 0) {
    throw FormatError("missing 'plate-micro v1' header");
  }
  if (!std::getline(in, line)) throw FormatError("missing size line");
  int dim = 0, n = 0, phase_count = 0;
  {
    std::istringstream ls(line);
    std::string kd, kn, kp;
    if (!(ls >> kd >> dim >> kn >> n >> kp >> phase_count) || kd != "d" ||
        kn != "N" || kp != "phases") {
      throw FormatError("malformed size line: '" + line + "'");
    }
    if ((dim != 2 && dim != 3) || n < 2 || phase_count < 1) {
      throw FormatError("invalid sizes in header: '" + line + "'");
    }
  }

  const int m = mandel_size(dim);
  std::map<int, StiffTensor4> phases;
  for (int p = 0; p < phase_count; ++p) {
    if (!std::getline(in, line)) throw FormatError("missing phase row");
    std::istringstream ls(line);
    std::string key;
    int id = 0;
    if (!(ls >> key >> id) || key != "phase") {
      throw FormatError("malformed phase row: '" + line + "'");
    }
    MandelMatrix c(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        if (!(ls >> c(a, b))) {
          throw FormatError("phase " + std::to_string(id) +
                            " has too few coefficients");
        }
        c(b, a) = c(a, b);
      }
    }
    std::string extra;
    if (ls >> extra) {
      throw FormatError("phase " + std::to_string(id) +
                        " has too many coefficients");
    }
    if (!phases.emplace(id, StiffTensor4::from_mandel(c)).second) {
      throw FormatError("duplicate phase " + std::to_string(id));
    }
  }

  const std::size_t expected = ipow(n, dim);
  std::vector<int> map;
  map.reserve(expected);
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw FormatError("non-integer phase map entry '" + token + "'");
    }
    map.push_back(id);
  }
  if (map.size() != expected) {
    throw FormatError("phase map has " + std::to_string(map.size()) +
                      " entries, expected " + std::to_string(expected));
  }
  for (int id : map) {
    if (phases.count(id) == 0) {
      throw FormatError("phase map references undefined phase " +
                        std::to_string(id));
    }
  }
  return CoefficientField(dim, n, std::move(map), PhaseTable(std::move(phases)));
}

void save_microstructure(const CoefficientField& field,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write microstructure file " + path.string());
  const int dim = field.dim();
  const int n = field.resolution();
  const int m = mandel_size(dim);
  const auto& phases = field.phase_table().phases();
  out << "plate-micro v1\n";
  out << "d " << dim << " N " << n << " phases " << phases.size() << '\n';
  out << std::setprecision(17);
  for (const auto& [id, c] : phases) {
    out << "phase " << id;
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) out << ' ' << c.mandel()(a, b);
    }
    out << '\n';
  }
  const auto& map = field.phase_map();
  for (std::size_t v = 0; v < map.size(); ++v) {
    out << map[v] << ((v + 1) % n == 0 ? '\n' : ' ');
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

std::pair<double, double> eigen_range(const CoefficientField& field) {
  std::set<int> used(field.phase_map().begin(), field.phase_map().end());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int id : used) {
    const auto mu = eigenvalues(field.phase_table().at(id));
    lo = std::min(lo, mu.front());
    hi = std::max(hi, mu.back());
  }
  return {lo, hi};
}

}  // namespace platehom
