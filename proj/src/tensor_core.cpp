#include "platehom/tensor_core.hpp"

#include <algorithm>
#include <cmath>

namespace platehom {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSymmetryTolerance = 1e-12;

void check_dim(int dim) {
  if (dim != 2 && dim != 3) {
    throw DimensionError("tensor dimension must be 2 or 3, got " +
                         std::to_string(dim));
  }
}

void check_same_dim(int a, int b) {
  if (a != b) {
    throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace

IndexPair mandel_pair(int dim, int k) {
  check_dim(dim);
  if (k < 0 || k >= mandel_size(dim)) {
    throw DimensionError("Mandel index out of range");
  }
  if (k < dim) return {k, k};
  if (dim == 2) return {0, 1};
  // d = 3: 23, 13, 12
  static constexpr IndexPair off[3] = {{1, 2}, {0, 2}, {0, 1}};
  return off[k - 3];
}

int mandel_index(int dim, int i, int j) {
  check_dim(dim);
  if (i == j) return i;
  if (i > j) std::swap(i, j);
  if (dim == 2) return 2;
  return 3 + (2 - (i + j - 1));  // (1,2)->3, (0,2)->4, (0,1)->5
}

double mandel_weight(int dim, int k) { return k < dim ? 1.0 : kSqrt2; }

// ---------------------------------------------------------------------------

SymTensor2::SymTensor2(int dim) : dim_{dim} {
  check_dim(dim);
  v_ = MandelVector::Zero(mandel_size(dim));
}

SymTensor2 SymTensor2::from_mandel(int dim, const MandelVector& components) {
  SymTensor2 t(dim);
  if (components.size() != t.size()) {
    throw DimensionError("Mandel vector has wrong length");
  }
  t.v_ = components;
  return t;
}

SymTensor2 SymTensor2::from_dense(const DenseMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw DimensionError("dense tensor must be square");
  }
  const int dim = static_cast<int>(matrix.rows());
  SymTensor2 t(dim);
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() >
      kSymmetryTolerance * scale) {
    throw InvalidArgument("dense tensor is not symmetric");
  }
  for (int k = 0; k < t.size(); ++k) {
    const auto [i, j] = mandel_pair(dim, k);
    t.v_(k) = mandel_weight(dim, k) * 0.5 * (matrix(i, j) + matrix(j, i));
  }
  return t;
}

SymTensor2 SymTensor2::identity(int dim) {
  SymTensor2 t(dim);
  for (int k = 0; k < dim; ++k) t.v_(k) = 1.0;
  return t;
}

SymTensor2 SymTensor2::basis(int dim, int k) {
  SymTensor2 t(dim);
  if (k < 0 || k >= t.size()) throw DimensionError("basis index out of range");
  t.v_(k) = 1.0;
  return t;
}

double SymTensor2::component(int i, int j) const {
  const int k = mandel_index(dim_, i, j);
  return v_(k) / mandel_weight(dim_, k);
}

DenseMatrix SymTensor2::dense() const {
  DenseMatrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) m(i, j) = component(i, j);
  }
  return m;
}

double SymTensor2::trace() const { return v_.head(dim_).sum(); }

SymTensor2& SymTensor2::operator+=(const SymTensor2& other) {
  check_same_dim(dim_, other.dim_);
  v_ += other.v_;
  return *this;
}

SymTensor2& SymTensor2::operator-=(const SymTensor2& other) {
  check_same_dim(dim_, other.dim_);
  v_ -= other.v_;
  return *this;
}

SymTensor2& SymTensor2::operator*=(double s) {
  v_ *= s;
  return *this;
}

double inner(const SymTensor2& a, const SymTensor2& b) {
  check_same_dim(a.dim(), b.dim());
  return a.mandel().dot(b.mandel());
}

// ---------------------------------------------------------------------------

StiffTensor4::StiffTensor4(int dim) : dim_{dim} {
  check_dim(dim);
  m_ = MandelMatrix::Zero(mandel_size(dim), mandel_size(dim));
}

StiffTensor4 StiffTensor4::from_mandel(const MandelMatrix& matrix) {
  int dim = 0;
  for (int d : {2, 3}) {
    if (matrix.rows() == mandel_size(d) && matrix.cols() == mandel_size(d)) {
      dim = d;
    }
  }
  if (dim == 0) throw DimensionError("Mandel matrix must be 3x3 or 6x6");
  const double scale = std::max(matrix.cwiseAbs().maxCoeff(), 1e-300);
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() >
      kSymmetryTolerance * scale) {
    throw InvalidArgument("Mandel matrix is not symmetric (major symmetry)");
  }
  StiffTensor4 c(dim);
  c.m_ = 0.5 * (matrix + matrix.transpose());
  return c;
}

StiffTensor4 StiffTensor4::identity(int dim) { return scalar(dim, 1.0); }

StiffTensor4 StiffTensor4::scalar(int dim, double c) {
  StiffTensor4 t(dim);
  t.m_.diagonal().setConstant(c);
  return t;
}

StiffTensor4 StiffTensor4::trace_reference(int dim, double lambda0) {
  StiffTensor4 t(dim);
  t.m_.topLeftCorner(dim, dim).setConstant(lambda0);
  return t;
}

double StiffTensor4::component(int i, int j, int k, int l) const {
  const int a = mandel_index(dim_, i, j);
  const int b = mandel_index(dim_, k, l);
  return m_(a, b) / (mandel_weight(dim_, a) * mandel_weight(dim_, b));
}

double StiffTensor4::operator_norm() const {
  const auto mu = eigenvalues(*this);
  return std::max(std::abs(mu.front()), std::abs(mu.back()));
}

StiffTensor4& StiffTensor4::operator+=(const StiffTensor4& other) {
  check_same_dim(dim_, other.dim_);
  m_ += other.m_;
  return *this;
}

StiffTensor4& StiffTensor4::operator-=(const StiffTensor4& other) {
  check_same_dim(dim_, other.dim_);
  m_ -= other.m_;
  return *this;
}

StiffTensor4& StiffTensor4::operator*=(double s) {
  m_ *= s;
  return *this;
}

SymTensor2 double_contract(const StiffTensor4& c, const SymTensor2& e) {
  check_same_dim(c.dim(), e.dim());
  return SymTensor2::from_mandel(e.dim(), c.mandel() * e.mandel());
}

std::vector<double> eigenvalues(const StiffTensor4& c) {
  Eigen::SelfAdjointEigenSolver<MandelMatrix> solver(c.mandel(),
                                                     Eigen::EigenvaluesOnly);
  const auto& mu = solver.eigenvalues();
  std::vector<double> out(mu.data(), mu.data() + mu.size());
  std::sort(out.begin(), out.end());
  return out;
}

StiffTensor4 invert(const StiffTensor4& c) {
  Eigen::SelfAdjointEigenSolver<MandelMatrix> solver(c.mandel());
  const auto& mu = solver.eigenvalues();
  const double largest = mu.cwiseAbs().maxCoeff();
  if (largest == 0.0 || mu.cwiseAbs().minCoeff() <= 1e-12 * largest) {
    throw SingularTensorError("stiffness tensor is singular");
  }
  const auto& q = solver.eigenvectors();
  MandelMatrix inv = q * mu.cwiseInverse().asDiagonal() * q.transpose();
  return StiffTensor4::from_mandel(0.5 * (inv + inv.transpose()));
}

}  // namespace platehom
