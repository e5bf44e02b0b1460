#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "platehom/tensor_core.hpp"

namespace platehom {

using Complex = std::complex<double>;

/// Integer frequencies of an N^d periodic grid in DFT layout: along each axis
/// index k maps to k for k < ceil(N/2) and to k - N otherwise, so components
/// range over {-floor(N/2), ..., ceil(N/2) - 1}.
class FrequencyGrid {
 public:
  FrequencyGrid(int dim, int n);

  int dim() const { return dim_; }
  int resolution() const { return n_; }
  std::size_t size() const { return size_; }

  std::array<int, 3> frequency(std::size_t flat) const;
  /// Flat index of a frequency; components are reduced modulo N.
  std::size_t flat_index(std::array<int, 3> freq) const;
  /// Flat index of -n.
  std::size_t negated(std::size_t flat) const;

  /// False for Nyquist frequencies of even grids (some component equal to
  /// -N/2). Those modes alias with their conjugate partners, so no
  /// real-consistent symbol with odd powers of a single component exists
  /// there; the Green operator treats them as unresolved.
  bool resolved(std::size_t flat) const;

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// Real-space field with m components per voxel, stored voxel-major
/// (data[voxel * m + k]). Tensor fields use m = d(d+1)/2 Mandel components.
struct TensorField {
  int dim = 2;
  int n = 0;
  int m = 0;
  std::vector<double> data;

  TensorField() = default;
  TensorField(int dim_, int n_, int m_);

  std::size_t voxel_count() const { return m == 0 ? 0 : data.size() / m; }
  std::span<double> at(std::size_t voxel) {
    return {data.data() + voxel * m, static_cast<std::size_t>(m)};
  }
  std::span<const double> at(std::size_t voxel) const {
    return {data.data() + voxel * m, static_cast<std::size_t>(m)};
  }
  /// Cell average of each component.
  MandelVector mean() const;
  /// Fills every voxel with the same component vector.
  static TensorField constant(int dim, int n, const MandelVector& value);
};

/// Fourier coefficients of a TensorField, same layout as the real-space data
/// with voxels replaced by FrequencyGrid entries.
struct SpectralField {
  int dim = 2;
  int n = 0;
  int m = 0;
  std::vector<Complex> data;

  SpectralField() = default;
  SpectralField(int dim_, int n_, int m_);

  std::size_t size() const { return m == 0 ? 0 : data.size() / m; }
  std::span<Complex> at(std::size_t freq) {
    return {data.data() + freq * m, static_cast<std::size_t>(m)};
  }
  std::span<const Complex> at(std::size_t freq) const {
    return {data.data() + freq * m, static_cast<std::size_t>(m)};
  }
  FrequencyGrid grid() const { return {dim, n}; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
};

/// Multidimensional DFT on an N^d grid. Forward transform is unnormalized,
/// the inverse carries 1/N^d. Owns its FFTW plans and work buffer.
class FourierTransform {
 public:
  FourierTransform(int dim, int n);
  ~FourierTransform();
  FourierTransform(FourierTransform&&) noexcept;
  FourierTransform& operator=(FourierTransform&&) noexcept;
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  int dim() const;
  int resolution() const;

  SpectralField forward(const TensorField& field) const;
  /// Returns the real part; the discarded imaginary part is negligible for
  /// conjugate-symmetric input.
  TensorField inverse(const SpectralField& field) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Cell average <a : b> evaluated in Fourier space (discrete Parseval).
double l2_inner(const SpectralField& a, const SpectralField& b);
double l2_norm(const SpectralField& a);

/// Cell average <a : b> evaluated voxel-wise.
double l2_inner(const TensorField& a, const TensorField& b);
double l2_norm(const TensorField& a);

/// Largest |g(-n) - conj g(n)| relative to the largest |g(n)|.
double conjugate_asymmetry(const SpectralField& field);

/// Text dump: header `plate-field v1 d <d> N <N> m <m>` then one line of m
/// reals per voxel, row-major.
void save_field(const TensorField& field, const std::filesystem::path& path);
TensorField load_field(const std::filesystem::path& path);

}  // namespace platehom
