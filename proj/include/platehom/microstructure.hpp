#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "platehom/tensor_core.hpp"

namespace platehom {

/// Phase id -> stiffness tensor, with an ellipticity constant alpha such that
/// every phase has its Mandel eigenvalues in [alpha, 1/alpha].
class PhaseTable {
 public:
  /// alpha defaults to the largest admissible value,
  /// min(mu_min, 1 / mu_max) over all phases.
  explicit PhaseTable(std::map<int, StiffTensor4> phases,
                      std::optional<double> alpha = std::nullopt);

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  const std::map<int, StiffTensor4>& phases() const { return phases_; }
  bool contains(int id) const { return phases_.count(id) != 0; }
  const StiffTensor4& at(int id) const;

 private:
  int dim_;
  double alpha_;
  std::map<int, StiffTensor4> phases_;
};

/// Periodic unit cell [0,1)^d sampled on N^d voxels. Voxel (i_1, ..., i_d)
/// has center ((i_1 + 1/2)/N, ...); the phase map is row-major with axis 0
/// slowest.
class CoefficientField {
 public:
  CoefficientField(int dim, int n, std::vector<int> phase_map,
                   PhaseTable table);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  std::size_t voxel_count() const { return phase_map_.size(); }
  const std::vector<int>& phase_map() const { return phase_map_; }
  const PhaseTable& phase_table() const { return table_; }

  int phase_at(std::size_t voxel) const { return phase_map_[voxel]; }
  const StiffTensor4& tensor_at(std::size_t voxel) const {
    return table_.at(phase_map_[voxel]);
  }

  /// Multi-index of a flat voxel index.
  std::array<int, 3> voxel_index(std::size_t voxel) const;
  /// Flat index of a multi-index; components are taken modulo N.
  std::size_t flat_index(std::array<int, 3> index) const;
  std::array<double, 3> voxel_center(std::size_t voxel) const;

  /// Fraction of voxels per phase id (phases absent from the map are omitted).
  std::map<int, double> volume_fractions() const;

  friend bool operator==(const CoefficientField& a, const CoefficientField& b);

 private:
  int dim_;
  int n_;
  std::vector<int> phase_map_;
  PhaseTable table_;
};

/// Phase ids used by the generators.
inline constexpr int kPhaseA = 0;
inline constexpr int kPhaseB = 1;

CoefficientField generate_homogeneous(const StiffTensor4& c, int n);

/// Phase A fills the first round(fraction * N) slabs along `axis`.
CoefficientField generate_laminate(const StiffTensor4& c_a,
                                   const StiffTensor4& c_b,
                                   double volume_fraction, int axis, int n);

/// Two-by-two chess pattern per period (d = 2).
CoefficientField generate_chessboard(const StiffTensor4& c_a,
                                     const StiffTensor4& c_b, int n);

/// Disc (ball) of phase B around the cell center, phase A elsewhere.
CoefficientField generate_inclusion(const StiffTensor4& c_matrix,
                                    const StiffTensor4& c_inclusion,
                                    double radius, int n);

CoefficientField load_microstructure(const std::filesystem::path& path);
void save_microstructure(const CoefficientField& field,
                         const std::filesystem::path& path);

/// Extremal Mandel eigenvalues over all voxels (mu_min, mu_max).
std::pair<double, double> eigen_range(const CoefficientField& field);

}  // namespace platehom
