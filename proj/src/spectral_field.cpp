#include "platehom/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace platehom {

namespace {

std::size_t grid_size(int dim, int n) {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

void check_grid(int dim, int n) {
  if (dim < 1 || dim > 3) throw DimensionError("grid dimension must be 1..3");
  if (n < 1) throw InvalidArgument("grid resolution must be positive");
}

template <class Field>
void check_compatible(const Field& a, const Field& b) {
  if (a.dim != b.dim || a.n != b.n || a.m != b.m) {
    throw DimensionError("field layouts differ");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FrequencyGrid::FrequencyGrid(int dim, int n)
    : dim_{dim}, n_{n}, size_{grid_size(dim, n)} {
  check_grid(dim, n);
}

std::array<int, 3> FrequencyGrid::frequency(std::size_t flat) const {
  std::array<int, 3> freq{0, 0, 0};
  const int half = (n_ + 1) / 2;
  for (int a = dim_ - 1; a >= 0; --a) {
    const int k = static_cast<int>(flat % n_);
    flat /= n_;
    freq[a] = k < half ? k : k - n_;
  }
  return freq;
}

std::size_t FrequencyGrid::flat_index(std::array<int, 3> freq) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) {
    const int k = ((freq[a] % n_) + n_) % n_;
    flat = flat * n_ + static_cast<std::size_t>(k);
  }
  return flat;
}

std::size_t FrequencyGrid::negated(std::size_t flat) const {
  auto f = frequency(flat);
  for (int a = 0; a < dim_; ++a) f[a] = -f[a];
  return flat_index(f);
}

bool FrequencyGrid::resolved(std::size_t flat) const {
  if (n_ % 2 != 0) return true;
  const auto f = frequency(flat);
  for (int a = 0; a < dim_; ++a) {
    if (f[a] == -n_ / 2) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

TensorField::TensorField(int dim_, int n_, int m_) : dim{dim_}, n{n_}, m{m_} {
  check_grid(dim_, n_);
  data.assign(grid_size(dim_, n_) * static_cast<std::size_t>(m_), 0.0);
}

MandelVector TensorField::mean() const {
  const std::size_t count = voxel_count();
  MandelVector out = MandelVector::Zero(m);
  if (count == 0) return out;
  // Neumaier summation per component; a uniform component is returned as is.
  for (int k = 0; k < m; ++k) {
    const double first = data[k];
    bool uniform = true;
    double sum = 0.0, carry = 0.0;
    for (std::size_t v = 0; v < count; ++v) {
      const double x = data[v * m + k];
      uniform = uniform && x == first;
      const double t = sum + x;
      carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    out(k) = uniform ? first : (sum + carry) / static_cast<double>(count);
  }
  return out;
}

TensorField TensorField::constant(int dim, int n, const MandelVector& value) {
  TensorField f(dim, n, static_cast<int>(value.size()));
  for (std::size_t v = 0; v < f.voxel_count(); ++v) {
    for (int k = 0; k < f.m; ++k) f.data[v * f.m + k] = value(k);
  }
  return f;
}

SpectralField::SpectralField(int dim_, int n_, int m_) : dim{dim_}, n{n_}, m{m_} {
  check_grid(dim_, n_);
  data.assign(grid_size(dim_, n_) * static_cast<std::size_t>(m_), Complex{});
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_compatible(*this, other);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += other.data[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_compatible(*this, other);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= other.data[i];
  return *this;
}

// ---------------------------------------------------------------------------

struct FourierTransform::Impl {
  int dim;
  int n;
  std::size_t size;
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Impl(int dim_, int n_) : dim{dim_}, n{n_}, size{grid_size(dim_, n_)} {
    buffer = fftw_alloc_complex(size);
    if (buffer == nullptr) throw Error("FFTW buffer allocation failed");
    std::array<int, 3> dims{n, n, n};
    forward = fftw_plan_dft(dim, dims.data(), buffer, buffer, FFTW_FORWARD,
                            FFTW_ESTIMATE);
    backward = fftw_plan_dft(dim, dims.data(), buffer, buffer, FFTW_BACKWARD,
                             FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) {
      release();
      throw Error("FFTW planning failed");
    }
  }
  ~Impl() { release(); }

  void release() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
    forward = backward = nullptr;
    buffer = nullptr;
  }

  Complex* data() { return reinterpret_cast<Complex*>(buffer); }
};

FourierTransform::FourierTransform(int dim, int n) {
  check_grid(dim, n);
  impl_ = std::make_unique<Impl>(dim, n);
}

FourierTransform::~FourierTransform() = default;
FourierTransform::FourierTransform(FourierTransform&&) noexcept = default;
FourierTransform& FourierTransform::operator=(FourierTransform&&) noexcept =
    default;

int FourierTransform::dim() const { return impl_->dim; }
int FourierTransform::resolution() const { return impl_->n; }

SpectralField FourierTransform::forward(const TensorField& field) const {
  if (field.dim != impl_->dim || field.n != impl_->n) {
    throw DimensionError("field grid does not match the transform");
  }
  SpectralField out(field.dim, field.n, field.m);
  Complex* buf = impl_->data();
  const std::size_t m = static_cast<std::size_t>(field.m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t v = 0; v < impl_->size; ++v) buf[v] = field.data[v * m + k];
    fftw_execute(impl_->forward);
    for (std::size_t v = 0; v < impl_->size; ++v) out.data[v * m + k] = buf[v];
  }
  return out;
}

TensorField FourierTransform::inverse(const SpectralField& field) const {
  if (field.dim != impl_->dim || field.n != impl_->n) {
    throw DimensionError("field grid does not match the transform");
  }
  TensorField out(field.dim, field.n, field.m);
  Complex* buf = impl_->data();
  const std::size_t m = static_cast<std::size_t>(field.m);
  const double scale = 1.0 / static_cast<double>(impl_->size);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t v = 0; v < impl_->size; ++v) buf[v] = field.data[v * m + k];
    fftw_execute(impl_->backward);
    for (std::size_t v = 0; v < impl_->size; ++v) {
      out.data[v * m + k] = buf[v].real() * scale;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double l2_inner(const SpectralField& a, const SpectralField& b) {
  check_compatible(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    sum += (std::conj(a.data[i]) * b.data[i]).real();
  }
  const double count = static_cast<double>(a.size());
  return sum / (count * count);
}

double l2_norm(const SpectralField& a) { return std::sqrt(l2_inner(a, a)); }

double l2_inner(const TensorField& a, const TensorField& b) {
  check_compatible(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) sum += a.data[i] * b.data[i];
  return sum / static_cast<double>(a.voxel_count());
}

double l2_norm(const TensorField& a) { return std::sqrt(l2_inner(a, a)); }

double conjugate_asymmetry(const SpectralField& field) {
  const auto grid = field.grid();
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t f = 0; f < grid.size(); ++f) {
    const std::size_t g = grid.negated(f);
    for (int k = 0; k < field.m; ++k) {
      const Complex a = field.at(f)[k];
      worst = std::max(worst, std::abs(field.at(g)[k] - std::conj(a)));
      scale = std::max(scale, std::abs(a));
    }
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

// ---------------------------------------------------------------------------

void save_field(const TensorField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write field file " + path.string());
  out << "plate-field v1 d " << field.dim << " N " << field.n << " m "
      << field.m << '\n';
  out << std::setprecision(17);
  for (std::size_t v = 0; v < field.voxel_count(); ++v) {
    const auto row = field.at(v);
    for (int k = 0; k < field.m; ++k) out << (k ? " " : "") << row[k];
    out << '\n';
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

TensorField load_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open field file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty field file");
  std::istringstream hs(line);
  std::string magic, version, kd, kn, km;
  int dim = 0, n = 0, m = 0;
  if (!(hs >> magic >> version >> kd >> dim >> kn >> n >> km >> m) ||
      magic != "plate-field" || version != "v1" || kd != "d" || kn != "N" ||
      km != "m" || dim < 1 || dim > 3 || n < 1 || m < 1) {
    throw FormatError("malformed field header: '" + line + "'");
  }
  TensorField field(dim, n, m);
  for (double& x : field.data) {
    if (!(in >> x)) throw FormatError("field file has too few values");
  }
  std::string extra;
  if (in >> extra) throw FormatError("field file has too many values");
  return field;
}

}  // namespace platehom
